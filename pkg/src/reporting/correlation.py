"""Rank correlation between predictive loss and return"""

from dataclasses import dataclass

import numpy as np
import pandas as pd
from loguru import logger


@dataclass
class CorrelationReport:
    pairs: pd.DataFrame  # psr_loss, final_return
    spearman: float
    degenerate: bool  # a constant column makes the rank correlation undefined (reported as 0)

    def to_dict(self):
        return {"spearman": self.spearman, "degenerate": self.degenerate, "points": len(self.pairs)}


def spearman(x: pd.Series, y: pd.Series):
    """Pearson correlation of average ranks; (0.0, True) when either side is constant"""
    rx = x.rank(method="average").to_numpy(dtype=float)
    ry = y.rank(method="average").to_numpy(dtype=float)
    dx, dy = rx - rx.mean(), ry - ry.mean()
    denom = np.sqrt((dx ** 2).sum() * (dy ** 2).sum())
    if denom == 0:
        return 0.0, True
    return float((dx * dy).sum() / denom), False


def correlation_report(probe_results: pd.DataFrame) -> CorrelationReport:
    """
    Args:
        probe_results: Rows with psr_loss and final_return (at least 3)

    Returns:
        Pairs sorted by loss and their Spearman rank correlation
    """
    pairs = probe_results[["psr_loss", "final_return"]].dropna().sort_values("psr_loss").reset_index(drop=True)
    if len(pairs) < 3:
        raise ValueError(f"correlation_report needs at least 3 probe points, got {len(pairs)}")

    rho, degenerate = spearman(pairs["psr_loss"], pairs["final_return"])
    if degenerate:
        logger.warning("Constant PSR loss or return across probe points; Spearman reported as 0")
    return CorrelationReport(pairs=pairs, spearman=rho, degenerate=degenerate)
