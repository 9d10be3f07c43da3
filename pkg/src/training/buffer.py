"""
Replay Buffer

Bounded FIFO of padded trajectories; the oldest episode is evicted first.
"""

from collections import deque
from typing import Deque, Iterable, List

import numpy as np
from loguru import logger

from ..environment.trajectory import Trajectory

BUFFER_TIMESTEPS = 30_000


def default_capacity(horizon: int) -> int:
    """Episodes holding about 30,000 timesteps"""
    return max(1, BUFFER_TIMESTEPS // horizon)


class ReplayBuffer:
    """FIFO store of whole episodes shared by PSR and RL updates"""

    def __init__(self, capacity: int):
        if capacity < 1:
            raise ValueError(f"capacity must be >= 1, got {capacity}")
        self.capacity = capacity
        self.episodes: Deque[Trajectory] = deque(maxlen=capacity)
        self.total_added = 0
        logger.info(f"ReplayBuffer initialized (capacity={capacity} episodes)")

    def __len__(self) -> int:
        return len(self.episodes)

    def add(self, trajectory: Trajectory):
        self.episodes.append(trajectory)
        self.total_added += 1

    def extend(self, trajectories: Iterable[Trajectory]):
        for trajectory in trajectories:
            self.add(trajectory)

    def sample(self, batch_size: int, rng: np.random.Generator) -> List[Trajectory]:
        """Uniform sample of episodes, without replacement when the buffer is large enough"""
        if not self.episodes:
            raise RuntimeError("Cannot sample from an empty replay buffer")
        replace = batch_size > len(self.episodes)
        indices = rng.choice(len(self.episodes), size=batch_size, replace=replace)
        return [self.episodes[int(i)] for i in indices]

    def marked_steps(self) -> np.ndarray:
        """Marked test step of every stored episode (-1 if none)"""
        return np.array([-1 if tr.test_step is None else tr.test_step for tr in self.episodes], dtype=np.int64)
