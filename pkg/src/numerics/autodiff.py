"""
Differentiation contract

Gradients come from torch autograd. This module adds the checks around it:
- backward() refuses non-finite or non-scalar losses and reports what was
  being updated
- stop_gradient() blocks every upstream gradient
- finite_difference_check() is the central-difference oracle used to verify
  the analytic gradients of every model class
"""

from typing import Any, Callable, Dict, Iterable, Optional, Tuple

import numpy as np
import torch
from torch import nn

from .errors import NonFiniteLossError

NamedParameters = Iterable[Tuple[str, nn.Parameter]]


def stop_gradient(tensor: torch.Tensor) -> torch.Tensor:
    """Same value, contributes nothing to upstream gradients"""
    return tensor.detach()


def backward(
    loss: torch.Tensor,
    named_parameters: Optional[NamedParameters] = None,
    context: Optional[Dict[str, Any]] = None,
    retain_graph: bool = False,
) -> Dict[str, torch.Tensor]:
    """
    Backpropagate a scalar loss

    Args:
        loss: Scalar loss tensor with a recorded graph
        named_parameters: Parameters whose gradients are returned
        context: Diagnostics attached to the error if the loss is non-finite
        retain_graph: Keep the graph for a second backward pass

    Returns:
        Gradient per parameter name (zeros for parameters outside the graph)
    """
    if loss.dim() != 0:
        raise ValueError(f"backward() expects a scalar loss, got shape {tuple(loss.shape)}")
    if not torch.isfinite(loss).item():
        raise NonFiniteLossError(f"Non-finite loss {loss.item()}", context)

    loss.backward(retain_graph=retain_graph)

    grads: Dict[str, torch.Tensor] = {}
    for name, param in named_parameters or ():
        grads[name] = torch.zeros_like(param) if param.grad is None else param.grad.detach().clone()
    return grads


def max_abs_gradient(named_parameters: NamedParameters) -> float:
    """L-infinity norm over all gradients; parameters without a gradient count as 0"""
    norm = 0.0
    for _, param in named_parameters:
        if param.grad is not None:
            norm = max(norm, float(param.grad.detach().abs().max()))
    return norm


def finite_difference_check(
    loss_fn: Callable[[], torch.Tensor],
    named_parameters: NamedParameters,
    step: float = 1e-4,
    abs_floor: float = 1e-3,
    max_entries_per_parameter: Optional[int] = 64,
    seed: int = 0,
) -> float:
    """
    Compare autograd gradients with central finite differences

    The module under test should be in float64 (module.double()) so that the
    O(step^2) truncation error dominates rounding.

    Args:
        loss_fn: Closure recomputing the scalar loss from the current parameters
        named_parameters: Parameters to check
        step: Finite-difference step
        abs_floor: Denominator floor of the relative error for near-zero gradients
        max_entries_per_parameter: Random subset of entries checked per tensor (None = all)
        seed: Seed of the entry subset

    Returns:
        Maximum relative error |analytic - numeric| / max(|analytic|, |numeric|, abs_floor)
    """
    params = list(named_parameters)
    for _, param in params:
        param.grad = None

    backward(loss_fn(), params)
    analytic = {name: param.grad.detach().clone() if param.grad is not None else torch.zeros_like(param)
                for name, param in params}

    rng = np.random.default_rng(seed)
    worst = 0.0
    with torch.no_grad():
        for name, param in params:
            flat = param.view(-1)
            indices = np.arange(flat.numel())
            if max_entries_per_parameter is not None and indices.size > max_entries_per_parameter:
                indices = rng.choice(indices, size=max_entries_per_parameter, replace=False)

            for i in indices:
                original = flat[i].item()
                flat[i] = original + step
                plus = loss_fn().item()
                flat[i] = original - step
                minus = loss_fn().item()
                flat[i] = original

                numeric = (plus - minus) / (2 * step)
                exact = analytic[name].view(-1)[i].item()
                error = abs(exact - numeric) / max(abs(exact), abs(numeric), abs_floor)
                worst = max(worst, error)
    return worst
