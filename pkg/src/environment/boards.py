"""
Hidden-Board Games

- Battleship: fire at cells of a board hiding randomly placed ships
- Minesweeper: reveal cells of a board hiding randomly placed mines

In both games the agent never sees the board; the only feedback is the
outcome of the last action.
"""

from typing import Optional, Sequence, Tuple

import numpy as np

from .base import EnvSpec, Observation, PartiallyObservableEnv
from .reward_codes import MINE_PENALTY, NUM_REWARD_CODES, encode_reward_channel

# Battleship shot results
SHOT_NONE, SHOT_MISS, SHOT_HIT, SHOT_REPEAT = 0, 1, 2, 3


class Battleship(PartiallyObservableEnv):
    """
    Observation: the result of the last shot (none / miss / hit / repeat)
    Action: a cell to fire at
    Reward: +1/S per hit; -(S+1)/(S*(G-S)) per miss or repeated cell.
    The game ends when every ship cell is hit, or after G shots.

    With these magnitudes a never-miss player totals exactly 1, and a player
    firing uniformly at untargeted cells totals 0 in expectation: such a
    player fires on average S*(G-S)/(S+1) empty cells before the last hit.
    """

    def __init__(
        self,
        board_size: int = 8,
        ship_lengths: Sequence[int] = (2, 3, 4),
        name: str = "battleship",
        test_action_rule: str = "designed",
    ):
        num_cells = board_size * board_size
        ship_cells = int(sum(ship_lengths))
        if ship_cells >= num_cells:
            raise ValueError(f"{ship_cells} ship cells do not fit a {board_size}x{board_size} board")
        if max(ship_lengths) > board_size:
            raise ValueError(f"ship of length {max(ship_lengths)} does not fit a {board_size}x{board_size} board")

        spec = EnvSpec(
            name=name,
            action_cardinality=num_cells,
            horizon=num_cells,
            channel_cardinalities=(4,),
        )
        super().__init__(spec, test_action_rule)

        self.board_size = board_size
        self.ship_lengths = tuple(int(n) for n in ship_lengths)
        self.num_cells = num_cells
        self.ship_cells = ship_cells
        self.hit_reward = 1.0 / ship_cells
        self.miss_penalty = -(ship_cells + 1) / (ship_cells * (num_cells - ship_cells))

        self.ships = np.zeros(num_cells, dtype=bool)
        self.fired = np.zeros(num_cells, dtype=bool)
        self.hits = 0

    def _place_ships(self):
        board = np.zeros((self.board_size, self.board_size), dtype=bool)
        for length in sorted(self.ship_lengths, reverse=True):
            while True:
                horizontal = bool(self.np_random.integers(2))
                row = int(self.np_random.integers(self.board_size - (0 if horizontal else length - 1)))
                col = int(self.np_random.integers(self.board_size - (length - 1 if horizontal else 0)))
                cells = board[row, col:col + length] if horizontal else board[row:row + length, col]
                if not cells.any():
                    cells[:] = True
                    break
        return board.ravel()

    def _reset(self) -> Observation:
        self.ships = self._place_ships()
        self.fired = np.zeros(self.num_cells, dtype=bool)
        self.hits = 0
        return Observation(discrete=[SHOT_NONE])

    def _step(self, action: int) -> Tuple[Observation, float, bool]:
        if self.fired[action]:
            return Observation(discrete=[SHOT_REPEAT]), self.miss_penalty, False

        self.fired[action] = True
        if self.ships[action]:
            self.hits += 1
            return Observation(discrete=[SHOT_HIT]), self.hit_reward, self.hits == self.ship_cells
        return Observation(discrete=[SHOT_MISS]), self.miss_penalty, False

    def _designed_test_action(self) -> int:
        return self._choose_from(np.flatnonzero(~self.fired).tolist())


class Minesweeper(PartiallyObservableEnv):
    """
    Observation: (adjacent mine count, visited-before flag, mine flag, reward code)
    of the cell just revealed.
    Action: a cell to reveal
    Reward: +1/(G-M) for a new safe cell, -1 for a mine (episode ends),
    -1/(G-M) for a cell revealed before. Clearing the board totals 1.
    """

    def __init__(
        self,
        board_size: int = 6,
        num_mines: int = 6,
        horizon: Optional[int] = None,
        name: str = "minesweeper",
        test_action_rule: str = "designed",
    ):
        num_cells = board_size * board_size
        if not 1 <= num_mines < num_cells - 1:
            raise ValueError(f"num_mines must be in [1, {num_cells - 1}), got {num_mines}")

        spec = EnvSpec(
            name=name,
            action_cardinality=num_cells,
            horizon=num_cells if horizon is None else int(horizon),
            channel_cardinalities=(9, 2, 2, NUM_REWARD_CODES),
            reward_channel=3,
        )
        super().__init__(spec, test_action_rule)

        self.board_size = board_size
        self.num_mines = num_mines
        self.num_cells = num_cells
        self.safe_reward = 1.0 / (num_cells - num_mines)
        self.repeat_penalty = -1.0 / (num_cells - num_mines)

        self.mines = np.zeros(num_cells, dtype=bool)
        self.counts = np.zeros(num_cells, dtype=np.int64)
        self.visited = np.zeros(num_cells, dtype=bool)

    def _adjacent_counts(self) -> np.ndarray:
        grid = np.pad(self.mines.reshape(self.board_size, self.board_size).astype(np.int64), 1)
        n = self.board_size
        counts = sum(
            grid[1 + dr:1 + dr + n, 1 + dc:1 + dc + n]
            for dr in (-1, 0, 1) for dc in (-1, 0, 1) if (dr, dc) != (0, 0)
        )
        return counts.ravel()

    def _reset(self) -> Observation:
        self.mines = np.zeros(self.num_cells, dtype=bool)
        self.mines[self.np_random.choice(self.num_cells, size=self.num_mines, replace=False)] = True
        self.counts = self._adjacent_counts()
        self.visited = np.zeros(self.num_cells, dtype=bool)
        return Observation(discrete=[0, 0, 0, 0])

    def _step(self, action: int) -> Tuple[Observation, float, bool]:
        count = int(self.counts[action])
        if self.visited[action]:
            reward = self.repeat_penalty
            return Observation(discrete=[count, 1, 0, encode_reward_channel(self.name, reward)]), reward, False

        self.visited[action] = True
        if self.mines[action]:
            reward = MINE_PENALTY
            return Observation(discrete=[count, 0, 1, encode_reward_channel(self.name, reward)]), reward, True

        reward = self.safe_reward
        cleared = int(self.visited.sum()) == self.num_cells - self.num_mines
        return Observation(discrete=[count, 0, 0, encode_reward_channel(self.name, reward)]), reward, cleared

    def _designed_test_action(self) -> int:
        return self._choose_from(np.flatnonzero(~self.visited).tolist())
