"""DRL2 - decoupled predictive-state representation learning for partially observable RL"""

__version__ = "0.1.0"

from . import environment
from . import numerics
from . import models
from . import agents
from . import psr
from . import training
from . import reporting

__all__ = [
    "environment",
    "numerics",
    "models",
    "agents",
    "psr",
    "training",
    "reporting",
]
