"""
Temporal Credit Assignment Environments

- DelayedCatch: catch a sequence of falling balls; every catch outcome is
  withheld and paid out as one reward at the final step
- DarkKeyToDoor: find an invisible key, then an invisible door, in a dark room
"""

from typing import Tuple

import numpy as np

from .base import EnvSpec, Observation, PartiallyObservableEnv

# left, stay, right
PADDLE_MOVES = (-1, 0, 1)

# up, down, left, right
ROOM_MOVES = np.array([[0, 1], [0, -1], [-1, 0], [1, 0]], dtype=np.int64)


class DelayedCatch(PartiallyObservableEnv):
    """
    Observation: (ball column, ball row, paddle column)
    Action: move the paddle left, stay, or right
    Each ball drops from a uniformly random column and reaches the bottom row
    after size-1 steps; a catch scores +1 and a miss -1. The sum is released
    as the reward of the final step, every other reward is 0.
    """

    def __init__(
        self,
        size: int = 7,
        num_catches: int = 4,
        name: str = "delayed_catch",
        test_action_rule: str = "designed",
    ):
        if num_catches < 1:
            raise ValueError(f"num_catches must be >= 1, got {num_catches}")
        spec = EnvSpec(
            name=name,
            action_cardinality=len(PADDLE_MOVES),
            horizon=num_catches * (size - 1),
            channel_cardinalities=(size, size, size),
        )
        super().__init__(spec, test_action_rule)

        self.size = size
        self.num_catches = num_catches
        self.ball = np.zeros(2, dtype=np.int64)  # (column, row)
        self.paddle = size // 2
        self.pending_reward = 0.0
        self.catches = 0

    def _observe(self) -> Observation:
        return Observation(discrete=[int(self.ball[0]), int(self.ball[1]), self.paddle])

    def _drop_ball(self):
        self.ball = np.array([int(self.np_random.integers(self.size)), 0], dtype=np.int64)

    def _reset(self) -> Observation:
        self.paddle = self.size // 2
        self.pending_reward = 0.0
        self.catches = 0
        self._drop_ball()
        return self._observe()

    def _step(self, action: int) -> Tuple[Observation, float, bool]:
        self.paddle = int(np.clip(self.paddle + PADDLE_MOVES[action], 0, self.size - 1))
        self.ball[1] += 1

        if self.ball[1] == self.size - 1:
            self.pending_reward += 1.0 if self.paddle == self.ball[0] else -1.0
            self.catches += 1
            if self.catches == self.num_catches:
                return self._observe(), self.pending_reward, True
            self._drop_ball()

        return self._observe(), 0.0, False


class DarkKeyToDoor(PartiallyObservableEnv):
    """
    Observation: the agent position only
    Reward: +1 the first time the key cell is entered; +1 on entering the door
    cell while holding the key, which ends the episode. Returns are 0, 1 or 2.
    """

    def __init__(
        self,
        size: int = 9,
        horizon: int = 50,
        name: str = "dark_key_to_door",
        test_action_rule: str = "designed",
    ):
        spec = EnvSpec(
            name=name,
            action_cardinality=len(ROOM_MOVES),
            horizon=horizon,
            channel_cardinalities=(size, size),
        )
        super().__init__(spec, test_action_rule)

        self.size = size
        self.position = np.zeros(2, dtype=np.int64)
        self.key = np.zeros(2, dtype=np.int64)
        self.door = np.zeros(2, dtype=np.int64)
        self.has_key = False

    def _observe(self) -> Observation:
        return Observation(discrete=[int(self.position[0]), int(self.position[1])])

    def _reset(self) -> Observation:
        cells = self.np_random.choice(self.size * self.size, size=3, replace=False)
        self.position, self.key, self.door = (
            np.array(divmod(int(c), self.size), dtype=np.int64) for c in cells
        )
        self.has_key = False
        return self._observe()

    def _step(self, action: int) -> Tuple[Observation, float, bool]:
        self.position = np.clip(self.position + ROOM_MOVES[action], 0, self.size - 1)

        if not self.has_key and np.array_equal(self.position, self.key):
            self.has_key = True
            return self._observe(), 1.0, False
        if self.has_key and np.array_equal(self.position, self.door):
            return self._observe(), 1.0, True
        return self._observe(), 0.0, False
