"""
Run entry point

Creates the run directory <out>/<env>_<mode>_<config hash>_seed<seed>, writes
config.yaml and run.log there, and dispatches to the trainer or the probe.
"""

from pathlib import Path
from typing import Union

import pandas as pd
from loguru import logger

from .config import Mode, RunConfig
from .probe import probe_frozen_phi
from .trainer import DRL2Trainer


def run_dir_name(config: RunConfig) -> str:
    return f"{config.env}_{config.mode}_{config.config_hash()}_seed{config.seed}"


def run(config: RunConfig, out_dir: Union[str, Path]) -> Path:
    """
    Execute one run

    Args:
        config: Run configuration (validated before any work)
        out_dir: Parent directory of the run directory

    Returns:
        The run directory
    """
    config.validate()
    run_dir = Path(out_dir) / run_dir_name(config)
    run_dir.mkdir(parents=True, exist_ok=True)
    config.to_yaml(run_dir / "config.yaml")

    sink = logger.add(run_dir / "run.log", rotation="100 MB", level="DEBUG")
    try:
        logger.info(f"Run directory: {run_dir}")
        if config.run_mode == Mode.PROBE:
            result: pd.DataFrame = probe_frozen_phi(config, run_dir=run_dir)
        else:
            result = DRL2Trainer(config, run_dir).run()
        logger.info(f"Run complete ({len(result)} rows)")
    finally:
        logger.remove(sink)
    return run_dir
