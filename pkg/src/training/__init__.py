"""Training module - replay buffer, rollouts, update schedule, trainer and probe"""

from .buffer import ReplayBuffer, default_capacity
from .config import GENERATION_UNITS, Mode, RunConfig
from .metrics import METRICS_COLUMNS, MetricsWriter
from .probe import ProbeResult, probe_frozen_phi
from .rollout import RolloutEngine, episode_seed
from .runner import run, run_dir_name
from .schedule import UpdateSchedule
from .trainer import DRL2Trainer

__all__ = [
    "ReplayBuffer",
    "default_capacity",
    "GENERATION_UNITS",
    "Mode",
    "RunConfig",
    "METRICS_COLUMNS",
    "MetricsWriter",
    "ProbeResult",
    "probe_frozen_phi",
    "RolloutEngine",
    "episode_seed",
    "run",
    "run_dir_name",
    "UpdateSchedule",
    "DRL2Trainer",
]
