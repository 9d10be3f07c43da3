"""
Update schedule

Per outer iteration, T_psr PSR updates then T_rl RL updates. Fractional
counts (a 0.03:1 ratio) are realized by flooring the running total: 0.03 PSR updates per
iteration means one PSR update every 34th iteration or so, and exactly
floor(n * 0.03) after n iterations.
"""

import math
from typing import Tuple


class UpdateSchedule:
    def __init__(self, t_psr: float, t_rl: float, psr_enabled: bool = True):
        if t_psr < 0 or t_rl < 0:
            raise ValueError(f"update counts must be >= 0, got {t_psr}:{t_rl}")
        self.t_psr = float(t_psr) if psr_enabled else 0.0
        self.t_rl = float(t_rl)
        self.iterations = 0
        self.expected_psr = 0
        self.expected_rl = 0
        self.done_psr = 0
        self.done_rl = 0

    @staticmethod
    def _target(rate: float, iterations: int) -> int:
        # round first to absorb float error in products like 100 * 0.03
        return int(math.floor(round(rate * iterations, 9)))

    def next_iteration(self) -> Tuple[int, int]:
        """(PSR updates, RL updates) owed this iteration"""
        self.iterations += 1
        n_psr = self._target(self.t_psr, self.iterations) - self.expected_psr
        n_rl = self._target(self.t_rl, self.iterations) - self.expected_rl
        self.expected_psr += n_psr
        self.expected_rl += n_rl
        return n_psr, n_rl

    def record(self, psr_updates: int, rl_updates: int):
        """Count performed updates and check them against the schedule"""
        self.done_psr += psr_updates
        self.done_rl += rl_updates
        if (self.done_psr, self.done_rl) != (self.expected_psr, self.expected_rl):
            raise RuntimeError(
                f"update accounting mismatch after iteration {self.iterations}: "
                f"psr {self.done_psr}/{self.expected_psr}, rl {self.done_rl}/{self.expected_rl}"
            )
