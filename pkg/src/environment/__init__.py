"""Environment module - partially observable benchmark environments"""

from .base import EnvSpec, Observation, PartiallyObservableEnv, StepResult, TEST_ACTION_RULES
from .boards import Battleship, Minesweeper
from .cards import AutoEncode, Concentration, RepeatPrevious, cards_match
from .credit import DarkKeyToDoor, DelayedCatch
from .gridworld import GridWorld
from .registry import PRESETS, list_envs, make_env
from .reward_codes import encode_reward_channel, env_family, sign_code
from .trajectory import (
    Trajectory,
    TrajectoryBatch,
    TrajectoryBuilder,
    collate,
    dump_trajectories,
    load_trajectories,
)

__all__ = [
    "EnvSpec",
    "Observation",
    "PartiallyObservableEnv",
    "StepResult",
    "TEST_ACTION_RULES",
    "Battleship",
    "Minesweeper",
    "AutoEncode",
    "Concentration",
    "RepeatPrevious",
    "cards_match",
    "DarkKeyToDoor",
    "DelayedCatch",
    "GridWorld",
    "PRESETS",
    "list_envs",
    "make_env",
    "encode_reward_channel",
    "env_family",
    "sign_code",
    "Trajectory",
    "TrajectoryBatch",
    "TrajectoryBuilder",
    "collate",
    "dump_trajectories",
    "load_trajectories",
]
