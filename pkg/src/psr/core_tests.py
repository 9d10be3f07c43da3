"""
Core-test extraction

A core-test sample anchored at timestep t of an episode is
    (history h_t = positions 0..t, test actions a_t..a_{t+k-1}, targets o_{t+1}..o_{t+k})
By default the only anchor is the episode's marked test step; dense
extraction anchors at every t whose k targets end at or before the terminal
observation o_L.
"""

from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np
import torch

from ..environment.trajectory import Trajectory, TrajectoryBatch, collate


@dataclass(frozen=True)
class CoreTestSpec:
    """Prediction horizon k and extraction density"""
    k: int = 1
    dense: bool = False

    def __post_init__(self):
        if self.k < 1:
            raise ValueError(f"core test horizon k must be >= 1, got {self.k}")


@dataclass
class CoreTestSample:
    episode_id: int
    anchor: int  # history covers positions 0..anchor
    test_actions: np.ndarray  # [k]
    target_discrete: np.ndarray  # [k, C]
    target_continuous: np.ndarray  # [k, Cc]

    @property
    def history_length(self) -> int:
        return self.anchor + 1


@dataclass
class PSRBatch:
    """Episodes plus the core-test samples anchored in them"""
    episodes: TrajectoryBatch
    episode_index: torch.Tensor  # [N] row of `episodes` each sample belongs to
    anchors: torch.Tensor  # [N]
    test_actions: torch.Tensor  # [N, k]
    target_discrete: torch.Tensor  # [N, k, C]
    target_continuous: torch.Tensor  # [N, k, Cc]

    def __len__(self) -> int:
        return int(self.anchors.shape[0])


def _anchors(trajectory: Trajectory, spec: CoreTestSpec) -> List[int]:
    length = trajectory.length
    if spec.dense:
        return list(range(0, length - spec.k + 1))
    if trajectory.test_step is None:
        raise ValueError(f"episode {trajectory.episode_id} has no marked test step")
    t = trajectory.test_step
    return [t] if t + spec.k <= length else []


def extract_core_tests(trajectory: Trajectory, spec: CoreTestSpec) -> List[CoreTestSample]:
    """
    Core-test samples of one episode

    Args:
        trajectory: Padded episode with a marked test step
        spec: Horizon and density

    Returns:
        Samples whose targets end at or before the terminal observation o_L (others are dropped)
    """
    discrete, continuous = trajectory.observations_through_end()
    samples = []
    for t in _anchors(trajectory, spec):
        samples.append(CoreTestSample(
            episode_id=trajectory.episode_id,
            anchor=t,
            test_actions=trajectory.actions[t:t + spec.k].copy(),
            target_discrete=discrete[t + 1:t + 1 + spec.k].copy(),
            target_continuous=continuous[t + 1:t + 1 + spec.k].copy(),
        ))
    return samples


def build_psr_batch(
    trajectories: Sequence[Trajectory],
    spec: CoreTestSpec,
    device: str = "cpu",
) -> Optional[PSRBatch]:
    """Collate episodes and their core-test samples; None if no sample survives"""
    index, samples = [], []
    for row, trajectory in enumerate(trajectories):
        for sample in extract_core_tests(trajectory, spec):
            index.append(row)
            samples.append(sample)
    if not samples:
        return None

    return PSRBatch(
        episodes=collate(trajectories, device),
        episode_index=torch.tensor(index, dtype=torch.long, device=device),
        anchors=torch.tensor([s.anchor for s in samples], dtype=torch.long, device=device),
        test_actions=torch.as_tensor(np.stack([s.test_actions for s in samples]), dtype=torch.long, device=device),
        target_discrete=torch.as_tensor(
            np.stack([s.target_discrete for s in samples]), dtype=torch.long, device=device
        ),
        target_continuous=torch.as_tensor(
            np.stack([s.target_continuous for s in samples]), dtype=torch.float32, device=device
        ),
    )
