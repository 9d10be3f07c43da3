"""
Optimizer

AdamW (decoupled weight decay) with global-norm gradient clipping and a
finiteness check on every parameter after each step.
"""

from typing import Iterable, Optional, Tuple

import torch
from loguru import logger
from torch import nn

from .errors import NonFiniteParameterError

ADAM_BETAS = (0.9, 0.999)
ADAM_EPS = 1e-8


class ParameterOptimizer:
    """AdamW over a named parameter group"""

    def __init__(
        self,
        named_parameters: Iterable[Tuple[str, nn.Parameter]],
        learning_rate: float,
        weight_decay: float = 1e-4,
        max_grad_norm: Optional[float] = 1.0,
        name: str = "optimizer",
    ):
        """
        Args:
            named_parameters: (name, parameter) pairs, e.g. module.named_parameters()
            learning_rate: Step size
            weight_decay: Decoupled weight-decay coefficient
            max_grad_norm: Global-norm clip (None disables clipping)
            name: Label used in logs and errors
        """
        pairs = list(named_parameters)
        if not pairs:
            raise ValueError(f"{name}: no parameters to optimize")

        self.names = [n for n, _ in pairs]
        self.params = [p for _, p in pairs]
        self.max_grad_norm = max_grad_norm
        self.name = name
        self.step_count = 0
        self.optimizer = torch.optim.AdamW(
            self.params,
            lr=learning_rate,
            betas=ADAM_BETAS,
            eps=ADAM_EPS,
            weight_decay=weight_decay,
        )

        logger.debug(f"{name} initialized ({len(self.params)} tensors, lr={learning_rate}, wd={weight_decay})")

    @property
    def learning_rate(self) -> float:
        return self.optimizer.param_groups[0]["lr"]

    def zero_grad(self):
        self.optimizer.zero_grad(set_to_none=True)

    def step(self, learning_rate: Optional[float] = None) -> float:
        """
        Apply one update from the populated gradients, then clear them

        Returns:
            Global gradient norm before clipping
        """
        if learning_rate is not None:
            for group in self.optimizer.param_groups:
                group["lr"] = learning_rate

        grads = [p for p in self.params if p.grad is not None]
        if self.max_grad_norm is not None and grads:
            grad_norm = float(nn.utils.clip_grad_norm_(grads, self.max_grad_norm))
        elif grads:
            grad_norm = float(torch.norm(torch.stack([p.grad.detach().norm() for p in grads])))
        else:
            grad_norm = 0.0

        self.optimizer.step()
        self.zero_grad()
        self.step_count += 1

        for name, param in zip(self.names, self.params):
            if not torch.isfinite(param).all():
                raise NonFiniteParameterError(name, self.name)
        return grad_norm


def optimizer_step(optimizer: ParameterOptimizer, learning_rate: Optional[float] = None) -> float:
    """Functional alias of ParameterOptimizer.step"""
    return optimizer.step(learning_rate)
