"""Numerics module - differentiation contract, optimizer, initialization, checkpoints"""

from .autodiff import backward, finite_difference_check, max_abs_gradient, stop_gradient
from .checkpoint import load_checkpoint, load_into, save_checkpoint
from .errors import NonFiniteLossError, NonFiniteParameterError
from .init import initialize_module
from .optim import ParameterOptimizer, optimizer_step

__all__ = [
    "backward",
    "finite_difference_check",
    "max_abs_gradient",
    "stop_gradient",
    "load_checkpoint",
    "load_into",
    "save_checkpoint",
    "NonFiniteLossError",
    "NonFiniteParameterError",
    "initialize_module",
    "ParameterOptimizer",
    "optimizer_step",
]
