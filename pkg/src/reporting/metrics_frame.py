"""
Metrics frames

A MetricsFrame is the metrics stream of one run directory plus the run's
config; it is the unit every report works on.
"""

import glob
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import pandas as pd
import yaml
from loguru import logger


@dataclass
class MetricsFrame:
    """Time-ordered metric records of one run"""
    run_id: str
    config_hash: str
    records: pd.DataFrame
    config: Dict[str, Any] = field(default_factory=dict)
    run_dir: Optional[Path] = None

    def __post_init__(self):
        if "step" not in self.records:
            raise ValueError(f"{self.run_id}: metrics have no 'step' column")
        steps = self.records["step"].to_numpy()
        if len(steps) > 1 and not (steps[1:] > steps[:-1]).all():
            raise ValueError(f"{self.run_id}: steps are not strictly increasing")

    def column(self, name: str) -> pd.DataFrame:
        """(step, value) rows where the column is present"""
        if name not in self.records:
            return pd.DataFrame(columns=["step", name])
        return self.records[["step", name]].dropna()

    def side_table(self, name: str) -> pd.DataFrame:
        """Another CSV of the run directory (burnin, probe); empty if absent"""
        if self.run_dir is None or not (self.run_dir / f"{name}.csv").exists():
            return pd.DataFrame()
        return pd.read_csv(self.run_dir / f"{name}.csv")


def load_run(run_dir: Union[str, Path]) -> MetricsFrame:
    """Build a MetricsFrame from a run directory (metrics.csv + config.yaml)"""
    run_dir = Path(run_dir)
    config: Dict[str, Any] = {}
    if (run_dir / "config.yaml").exists():
        with open(run_dir / "config.yaml", "r") as f:
            config = yaml.safe_load(f) or {}

    metrics_path = run_dir / "metrics.csv"
    records = pd.read_csv(metrics_path) if metrics_path.exists() else pd.DataFrame(columns=["step"])

    # run directories are named <env>_<mode>_<hash>_seed<seed>
    parts = run_dir.name.rsplit("_", 2)
    config_hash = parts[1] if len(parts) == 3 else ""
    return MetricsFrame(
        run_id=run_dir.name,
        config_hash=config_hash,
        records=records,
        config=config,
        run_dir=run_dir,
    )


def load_runs(pattern: str) -> List[MetricsFrame]:
    """Load every run directory matching a glob pattern, sorted by path"""
    frames = []
    for path in sorted(glob.glob(pattern)):
        if Path(path).is_dir():
            frames.append(load_run(path))
    if not frames:
        logger.warning(f"No run directories match '{pattern}'")
    return frames
