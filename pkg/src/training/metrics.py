"""
Metrics stream

Rows are appended to CSV files in the run directory as they are produced and
optionally mirrored to TensorBoard.
"""

from pathlib import Path
from typing import Any, Dict, List, Optional

import pandas as pd
from loguru import logger

METRICS_COLUMNS = [
    "step",
    "episodes",
    "psr_loss",
    "actor_loss",
    "critic_loss",
    "eval_return",
    "prediction_accuracy",
]


class MetricsWriter:
    """Appends metric rows to <run_dir>/<name>.csv"""

    def __init__(self, run_dir: Optional[Path], tensorboard: bool = False):
        self.run_dir = Path(run_dir) if run_dir is not None else None
        self.rows: Dict[str, List[Dict[str, Any]]] = {}
        self.summary_writer = None

        if self.run_dir is not None:
            self.run_dir.mkdir(parents=True, exist_ok=True)
            if tensorboard:
                try:
                    from torch.utils.tensorboard import SummaryWriter
                    self.summary_writer = SummaryWriter(log_dir=str(self.run_dir / "tensorboard"))
                except ImportError:
                    logger.warning("tensorboard not installed, scalar mirror disabled")

    def write(self, name: str, row: Dict[str, Any], columns: Optional[List[str]] = None):
        """
        Append one row

        Args:
            name: File stem ('metrics', 'burnin', 'probe')
            row: Column -> value
            columns: Fixed column order (missing values become empty cells)
        """
        self.rows.setdefault(name, []).append(row)
        if self.run_dir is None:
            return

        path = self.run_dir / f"{name}.csv"
        frame = pd.DataFrame([row], columns=columns or list(row))
        frame.to_csv(path, mode="a", header=not path.exists(), index=False)

        if self.summary_writer is not None and "step" in row:
            for key, value in row.items():
                if key != "step" and isinstance(value, (int, float)) and value == value:
                    self.summary_writer.add_scalar(f"{name}/{key}", value, int(row["step"]))

    def frame(self, name: str) -> pd.DataFrame:
        return pd.DataFrame(self.rows.get(name, []))

    def close(self):
        if self.summary_writer is not None:
            self.summary_writer.close()
