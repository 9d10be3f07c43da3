"""
Noisy GridWorld

The agent must reach a hidden target on a square grid within a short
horizon. Each observation carries:
- the agent position (x, y)
- a binary indicator of whether the last move reduced the Manhattan distance
  to the target, correct with probability `indicator_accuracy`
- a uniform noise scalar in [0, 1] with no information

A memoryless agent cannot integrate the indicator over time, which is what
separates it from history-conditioned agents here.
"""

from typing import Tuple

import numpy as np

from .base import EnvSpec, Observation, PartiallyObservableEnv

# up, down, left, right
MOVES = np.array([[0, 1], [0, -1], [-1, 0], [1, 0]], dtype=np.int64)


class GridWorld(PartiallyObservableEnv):
    """Reward 1 on reaching the target (episode ends), 0 otherwise"""

    def __init__(
        self,
        size: int = 7,
        horizon: int = 9,
        indicator_accuracy: float = 0.9,
        name: str = "gridworld",
        test_action_rule: str = "designed",
    ):
        if not 0.0 <= indicator_accuracy <= 1.0:
            raise ValueError(f"indicator_accuracy must be in [0, 1], got {indicator_accuracy}")
        spec = EnvSpec(
            name=name,
            action_cardinality=len(MOVES),
            horizon=horizon,
            channel_cardinalities=(size, size, 2),
            continuous_bounds=((0.0, 1.0),),
        )
        super().__init__(spec, test_action_rule)

        self.size = size
        self.indicator_accuracy = indicator_accuracy
        self.position = np.zeros(2, dtype=np.int64)
        self.target = np.zeros(2, dtype=np.int64)
        self.last_indicator_truth = False

    def _observe(self, indicator: int) -> Observation:
        noise = self.np_random.uniform(0.0, 1.0)
        return Observation(
            discrete=[int(self.position[0]), int(self.position[1]), indicator],
            continuous=[noise],
        )

    def _distance(self) -> int:
        return int(np.abs(self.position - self.target).sum())

    def _reset(self) -> Observation:
        cells = self.np_random.choice(self.size * self.size, size=2, replace=False)
        self.position = np.array(divmod(int(cells[0]), self.size), dtype=np.int64)
        self.target = np.array(divmod(int(cells[1]), self.size), dtype=np.int64)
        self.last_indicator_truth = False
        return self._observe(0)

    def _step(self, action: int) -> Tuple[Observation, float, bool]:
        before = self._distance()
        self.position = np.clip(self.position + MOVES[action], 0, self.size - 1)
        after = self._distance()

        self.last_indicator_truth = after < before
        correct = self.np_random.random() < self.indicator_accuracy
        indicator = int(self.last_indicator_truth if correct else not self.last_indicator_truth)

        reached = after == 0
        return self._observe(indicator), float(reached), reached
