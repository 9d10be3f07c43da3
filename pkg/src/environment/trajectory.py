"""
Trajectories

A trajectory is one episode padded to the horizon H. Position t holds the
observation o_t seen before acting, the action a_t, the reward r_t it earned,
and whether the episode ended after it. Every position after the final step
is padding. The observation returned by the final step, o_L, is kept
separately so predictions from the last anchors have a target.

Each episode carries one marked timestep, drawn uniformly from [0, H), at
which the action came from the environment's test-action sampler instead of
the policy. A mark that lands in padding means the test action was never
taken.
"""

from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
import torch
from loguru import logger

from .base import EnvSpec, Observation
from .reward_codes import sign_code

@dataclass
class Trajectory:
    """One padded episode"""
    episode_id: int
    obs_discrete: np.ndarray  # [H, C] int64
    obs_continuous: np.ndarray  # [H, Cc] float32
    actions: np.ndarray  # [H] int64
    rewards: np.ndarray  # [H] float32
    reward_codes: np.ndarray  # [H] int64, sign code of rewards
    dones: np.ndarray  # [H] bool
    padding_mask: np.ndarray  # [H] bool, True at padded positions
    final_discrete: np.ndarray  # [C] int64, o_L
    final_continuous: np.ndarray  # [Cc] float32, o_L
    test_step: Optional[int]  # marked timestep (0-based)

    @property
    def length(self) -> int:
        return int((~self.padding_mask).sum())

    @property
    def episode_return(self) -> float:
        return float(self.rewards[~self.padding_mask].sum())

    def observations_through_end(self) -> Tuple[np.ndarray, np.ndarray]:
        """
        Observations o_0..o_L with o_L at row L

        Returns:
            Discrete [H + 1, C] and continuous [H + 1, Cc] arrays; rows after L are zero
        """
        L = self.length
        discrete = np.zeros((len(self.actions) + 1, self.obs_discrete.shape[1]), dtype=np.int64)
        continuous = np.zeros((len(self.actions) + 1, self.obs_continuous.shape[1]), dtype=np.float32)
        discrete[:L] = self.obs_discrete[:L]
        continuous[:L] = self.obs_continuous[:L]
        discrete[L] = self.final_discrete
        continuous[L] = self.final_continuous
        return discrete, continuous

    def validate(self, spec: EnvSpec):
        """Raise ValueError if the padding layout is inconsistent"""
        H = spec.horizon
        if self.actions.shape != (H,) or self.obs_discrete.shape != (H, spec.num_discrete):
            raise ValueError(f"episode {self.episode_id}: arrays do not match horizon {H}")
        if self.final_discrete.shape != (spec.num_discrete,) or self.final_continuous.shape != (spec.num_continuous,):
            raise ValueError(f"episode {self.episode_id}: final observation does not match the channel layout")
        L = self.length
        if L < 1 or self.padding_mask[:L].any():
            raise ValueError(f"episode {self.episode_id}: padding must be a suffix after at least one step")
        if not self.dones[L - 1] or self.dones[: L - 1].any():
            raise ValueError(f"episode {self.episode_id}: the last unpadded step must be the only done step")
        if self.test_step is not None and not 0 <= self.test_step < H:
            raise ValueError(f"episode {self.episode_id}: test_step {self.test_step} outside [0, {H})")

    def to_records(self) -> List[Dict]:
        """One record per timestep (CSV dump layout), with o_{t+1} in the next_* columns"""
        next_discrete, next_continuous = self.observations_through_end()
        records = []
        for t in range(len(self.actions)):
            record = {"episode_id": self.episode_id, "t": t}
            for i, symbol in enumerate(self.obs_discrete[t]):
                record[f"ch_{i}"] = int(symbol)
            for i, value in enumerate(self.obs_continuous[t]):
                record[f"cont_{i}"] = float(value)
            for i, symbol in enumerate(next_discrete[t + 1]):
                record[f"next_ch_{i}"] = int(symbol)
            for i, value in enumerate(next_continuous[t + 1]):
                record[f"next_cont_{i}"] = float(value)
            record.update({
                "action": int(self.actions[t]),
                "reward": float(self.rewards[t]),
                "done": bool(self.dones[t]),
                "is_test_action": self.test_step == t,
                "is_padding": bool(self.padding_mask[t]),
            })
            records.append(record)
        return records

class TrajectoryBuilder:
    """Accumulates one episode step by step and pads it to H"""

    def __init__(self, spec: EnvSpec, episode_id: int, test_step: Optional[int]):
        self.spec = spec
        self.episode_id = episode_id
        self.test_step = test_step
        self.observations: List[Observation] = []
        self.actions: List[int] = []
        self.rewards: List[float] = []
        self.final: Optional[Observation] = None
        self.done = False

    @property
    def t(self) -> int:
        return len(self.actions)

    def add(self, observation: Observation, action: int, reward: float, done: bool,
            next_observation: Optional[Observation] = None):
        """
        Record one step

        Args:
            observation: o_t seen before acting
            action: a_t
            reward: r_t
            done: whether the episode ended after this step
            next_observation: o_{t+1}; required on the final step
        """
        if self.done:
            raise RuntimeError(f"episode {self.episode_id} already finished")
        if done and next_observation is None:
            raise ValueError(f"episode {self.episode_id}: the final step needs the observation it returned")
        self.observations.append(observation)
        self.actions.append(int(action))
        self.rewards.append(float(reward))
        self.done = bool(done)
        if self.done:
            self.final = next_observation

    def build(self) -> Trajectory:
        if not self.done:
            raise RuntimeError(f"episode {self.episode_id} is not finished")
        H, L = self.spec.horizon, len(self.actions)

        obs_discrete = np.zeros((H, self.spec.num_discrete), dtype=np.int64)
        obs_continuous = np.zeros((H, self.spec.num_continuous), dtype=np.float32)
        for t, obs in enumerate(self.observations):
            obs_discrete[t] = obs.discrete
            obs_continuous[t] = obs.continuous

        actions = np.zeros(H, dtype=np.int64)
        actions[:L] = self.actions
        rewards = np.zeros(H, dtype=np.float32)
        rewards[:L] = self.rewards
        reward_codes = np.array([sign_code(r) for r in rewards], dtype=np.int64)
        dones = np.zeros(H, dtype=bool)
        dones[L - 1] = True
        padding_mask = np.arange(H) >= L

        return Trajectory(
            episode_id=self.episode_id,
            obs_discrete=obs_discrete,
            obs_continuous=obs_continuous,
            actions=actions,
            rewards=rewards,
            reward_codes=reward_codes,
            dones=dones,
            padding_mask=padding_mask,
            final_discrete=np.asarray(self.final.discrete, dtype=np.int64).reshape(self.spec.num_discrete),
            final_continuous=np.asarray(self.final.continuous, dtype=np.float32).reshape(self.spec.num_continuous),
            test_step=self.test_step,
        )

@dataclass
class TrajectoryBatch:
    """Stacked trajectories as tensors"""
    obs_discrete: torch.Tensor  # [B, H, C]
    obs_continuous: torch.Tensor  # [B, H, Cc]
    actions: torch.Tensor  # [B, H]
    rewards: torch.Tensor  # [B, H]
    reward_codes: torch.Tensor  # [B, H]
    dones: torch.Tensor  # [B, H] float
    padding_mask: torch.Tensor  # [B, H] bool
    test_steps: torch.Tensor  # [B], -1 when unmarked
    episode_ids: List[int]

    def __len__(self) -> int:
        return len(self.episode_ids)

def collate(trajectories: Sequence[Trajectory], device: Union[str, torch.device] = "cpu") -> TrajectoryBatch:
    def stack(attr, dtype):
        return torch.as_tensor(np.stack([getattr(tr, attr) for tr in trajectories]), dtype=dtype, device=device)

    return TrajectoryBatch(
        obs_discrete=stack("obs_discrete", torch.long),
        obs_continuous=stack("obs_continuous", torch.float32),
        actions=stack("actions", torch.long),
        rewards=stack("rewards", torch.float32),
        reward_codes=stack("reward_codes", torch.long),
        dones=stack("dones", torch.float32),
        padding_mask=stack("padding_mask", torch.bool),
        test_steps=torch.tensor(
            [-1 if tr.test_step is None else tr.test_step for tr in trajectories], dtype=torch.long, device=device
        ),
        episode_ids=[tr.episode_id for tr in trajectories],
    )

def dump_trajectories(trajectories: Sequence[Trajectory], path: Union[str, Path]) -> Path:
    """Write trajectories as one CSV record per timestep"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    records = [record for tr in trajectories for record in tr.to_records()]
    pd.DataFrame.from_records(records).to_csv(path, index=False)
    logger.debug(f"Dumped {len(trajectories)} trajectories to {path}")
    return path

def load_trajectories(path: Union[str, Path], spec: EnvSpec) -> List[Trajectory]:
    """Read a CSV written by dump_trajectories"""
    frame = pd.read_csv(path)
    ch_cols = [f"ch_{i}" for i in range(spec.num_discrete)]
    cont_cols = [f"cont_{i}" for i in range(spec.num_continuous)]
    next_ch_cols = [f"next_{c}" for c in ch_cols]
    next_cont_cols = [f"next_{c}" for c in cont_cols]

    trajectories = []
    for episode_id, rows in frame.groupby("episode_id", sort=False):
        rows = rows.sort_values("t")
        marked = rows.index[rows["is_test_action"].astype(bool)]
        rewards = rows["reward"].to_numpy(dtype=np.float32)
        last = rows[~rows["is_padding"].astype(bool)].iloc[-1]
        trajectories.append(Trajectory(
            episode_id=int(episode_id),
            obs_discrete=rows[ch_cols].to_numpy(dtype=np.int64),
            obs_continuous=rows[cont_cols].to_numpy(dtype=np.float32).reshape(len(rows), len(cont_cols)),
            actions=rows["action"].to_numpy(dtype=np.int64),
            rewards=rewards,
            reward_codes=np.array([sign_code(r) for r in rewards], dtype=np.int64),
            dones=rows["done"].to_numpy(dtype=bool),
            padding_mask=rows["is_padding"].to_numpy(dtype=bool),
            final_discrete=last[next_ch_cols].to_numpy(dtype=np.int64),
            final_continuous=last[next_cont_cols].to_numpy(dtype=np.float32),
            test_step=int(rows.loc[marked[0], "t"]) if len(marked) else None,
        ))
    for tr in trajectories:
        tr.validate(spec)
    return trajectories
