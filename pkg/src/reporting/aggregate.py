"""Mean and standard-deviation bands across runs"""

from typing import List

import numpy as np
import pandas as pd
from loguru import logger

from .metrics_frame import MetricsFrame


def aggregate(frames: List[MetricsFrame], column: str = "eval_return") -> pd.DataFrame:
    """
    Per-step mean and population standard deviation of one metric across runs

    Runs whose step grids differ are linearly interpolated onto the grid with
    the fewest points; the result then carries attrs['interpolated'] = True.

    Args:
        frames: At least one run
        column: Metric to aggregate

    Returns:
        DataFrame with step, mean, std, runs
    """
    if not frames:
        raise ValueError("aggregate needs at least one run")

    # fixed order so the result does not depend on the order runs were given in
    series = [f.column(column) for f in sorted(frames, key=lambda f: f.run_id)]
    series = [s for s in series if len(s)]
    if not series:
        logger.warning(f"No values for '{column}' in any run")
        result = pd.DataFrame(columns=["step", "mean", "std", "runs"])
        result.attrs["interpolated"] = False
        return result

    grids = [s["step"].to_numpy(dtype=float) for s in series]
    reference = min(grids, key=len)
    interpolated = any(len(g) != len(reference) or not np.array_equal(g, reference) for g in grids)
    if interpolated:
        logger.warning(f"Step grids differ across runs; interpolating '{column}' onto {len(reference)} steps")
        values = np.stack([np.interp(reference, g, s[column].to_numpy(dtype=float)) for g, s in zip(grids, series)])
    else:
        values = np.stack([s[column].to_numpy(dtype=float) for s in series])

    result = pd.DataFrame({
        "step": reference,
        "mean": values.mean(axis=0),
        "std": values.std(axis=0, ddof=0),
        "runs": len(series),
    })
    result.attrs["interpolated"] = interpolated
    return result
