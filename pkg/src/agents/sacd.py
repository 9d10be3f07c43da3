"""
Discrete Soft Actor-Critic

Policy and twin critics read the history latent phi(h_t):
- policy: latent -> action logits
- critics: latent -> per-action Q-values, with target copies tracked by
  exponential averaging

Critic target:  y = r + gamma * (1 - done) * sum_a p(a|s') [min Q_targ(s', a) - alpha * log p(a|s')]
Actor loss:     sum_a p(a|s) [alpha * log p(a|s) - min Q(s, a)]

Whether RL gradients reach the summarizer is decided by the caller: latents
passed in detached (decoupled training) carry no gradient upstream; latents
with a graph (end-to-end training) let the critic loss train the
representation through representation_optimizer. The actor always reads
detached latents.
"""

import copy
from dataclasses import dataclass
from typing import Dict, Optional

import numpy as np
import torch
from loguru import logger
from torch import nn
from torch.nn import functional as F

from ..numerics.autodiff import backward, max_abs_gradient, stop_gradient
from ..numerics.init import initialize_module
from ..numerics.optim import ParameterOptimizer


def mlp(in_dim: int, hidden_dim: int, out_dim: int) -> nn.Sequential:
    """Two hidden tanh layers"""
    return nn.Sequential(
        nn.Linear(in_dim, hidden_dim),
        nn.Tanh(),
        nn.Linear(hidden_dim, hidden_dim),
        nn.Tanh(),
        nn.Linear(hidden_dim, out_dim),
    )


@dataclass
class Transitions:
    """Flat batch of (s, a, r, s', done) with latent states"""
    latents: torch.Tensor  # [N, D]
    actions: torch.Tensor  # [N]
    rewards: torch.Tensor  # [N]
    next_latents: torch.Tensor  # [N, D]
    dones: torch.Tensor  # [N] float

    def __len__(self) -> int:
        return int(self.actions.shape[0])


def select_actions(logits: torch.Tensor, greedy: bool = False, generator: Optional[torch.Generator] = None) -> torch.Tensor:
    """argmax (lowest index on ties) or a draw from softmax(logits), per row"""
    if greedy:
        return torch.argmax(logits, dim=-1)
    return torch.multinomial(F.softmax(logits, dim=-1), 1, generator=generator).squeeze(-1)


class SACDAgent:
    """Discrete-action SAC over history latents"""

    def __init__(
        self,
        latent_dim: int,
        num_actions: int,
        hidden_dim: int = 256,
        gamma: float = 0.99,
        entropy_coeff: float = 0.01,
        tau: float = 0.005,
        lr_actor: float = 1e-4,
        lr_critic: float = 2e-4,
        weight_decay: float = 1e-4,
        max_grad_norm: Optional[float] = 1.0,
    ):
        """
        Initialize agent

        Args:
            latent_dim: Width of the history latent
            num_actions: Action cardinality
            hidden_dim: Hidden width of policy and critic networks
            gamma: Discount factor
            entropy_coeff: Fixed entropy temperature alpha
            tau: Target-network averaging rate
            lr_actor: Policy learning rate
            lr_critic: Critic learning rate
            weight_decay: Decoupled weight decay
            max_grad_norm: Global-norm gradient clip
        """
        self.num_actions = num_actions
        self.gamma = gamma
        self.entropy_coeff = entropy_coeff
        self.tau = tau

        self.policy = initialize_module(mlp(latent_dim, hidden_dim, num_actions))
        self.critic_1 = initialize_module(mlp(latent_dim, hidden_dim, num_actions))
        self.critic_2 = initialize_module(mlp(latent_dim, hidden_dim, num_actions))
        self.target_1 = copy.deepcopy(self.critic_1).requires_grad_(False)
        self.target_2 = copy.deepcopy(self.critic_2).requires_grad_(False)

        self.actor_optimizer = ParameterOptimizer(
            self.policy.named_parameters(), lr_actor, weight_decay, max_grad_norm, name="actor"
        )
        critic_params = [(f"critic_1.{n}", p) for n, p in self.critic_1.named_parameters()]
        critic_params += [(f"critic_2.{n}", p) for n, p in self.critic_2.named_parameters()]
        self.critic_optimizer = ParameterOptimizer(
            critic_params, lr_critic, weight_decay, max_grad_norm, name="critic"
        )

        self.updates = 0
        logger.info(f"SACDAgent initialized (actions={num_actions}, hidden={hidden_dim}, alpha={entropy_coeff})")

    @torch.no_grad()
    def act(self, latent: torch.Tensor, greedy: bool = False, generator: Optional[torch.Generator] = None) -> np.ndarray:
        """
        Choose actions

        Args:
            latent: [N, D] or [D]
            greedy: argmax (lowest index on ties) instead of sampling
            generator: RNG for sampling

        Returns:
            Action indices [N] (or a 0-d array for a single latent)
        """
        single = latent.dim() == 1
        logits = self.policy(latent.unsqueeze(0) if single else latent)
        actions = select_actions(logits, greedy, generator).cpu().numpy()
        return actions[0] if single else actions

    def frozen_policy(self) -> nn.Module:
        """Detached copy of the policy network for rollout workers"""
        return copy.deepcopy(self.policy).requires_grad_(False).eval()

    @torch.no_grad()
    def critic_target(self, rewards: torch.Tensor, next_latents: torch.Tensor, dones: torch.Tensor) -> torch.Tensor:
        """Soft Bellman target"""
        next_latents = stop_gradient(next_latents)
        logits = self.policy(next_latents)
        probs = F.softmax(logits, dim=-1)
        log_probs = F.log_softmax(logits, dim=-1)
        min_q = torch.min(self.target_1(next_latents), self.target_2(next_latents))
        soft_value = (probs * (min_q - self.entropy_coeff * log_probs)).sum(dim=-1)
        return rewards + self.gamma * (1.0 - dones) * soft_value

    def critic_loss(self, batch: Transitions) -> torch.Tensor:
        target = self.critic_target(batch.rewards, batch.next_latents, batch.dones)
        index = batch.actions.long().unsqueeze(-1)
        q_1 = self.critic_1(batch.latents).gather(-1, index).squeeze(-1)
        q_2 = self.critic_2(batch.latents).gather(-1, index).squeeze(-1)
        return F.mse_loss(q_1, target) + F.mse_loss(q_2, target)

    def actor_loss(self, latents: torch.Tensor):
        latents = stop_gradient(latents)
        logits = self.policy(latents)
        probs = F.softmax(logits, dim=-1)
        log_probs = F.log_softmax(logits, dim=-1)
        with torch.no_grad():
            min_q = torch.min(self.critic_1(latents), self.critic_2(latents))
        loss = (probs * (self.entropy_coeff * log_probs - min_q)).sum(dim=-1).mean()
        entropy = -(probs * log_probs).sum(dim=-1).mean()
        return loss, entropy

    def rl_update(
        self,
        batch: Transitions,
        representation: Optional[nn.Module] = None,
        representation_optimizer: Optional[ParameterOptimizer] = None,
        update_index: int = 0,
    ) -> Dict[str, float]:
        """
        One critic step, one actor step and a target update

        Args:
            batch: Transitions; latents with a graph route the critic loss into the representation
            representation: Module upstream of the latents, for the gradient diagnostic
            representation_optimizer: Steps the representation from the critic loss (end-to-end mode)
            update_index: Reported with non-finite losses

        Returns:
            critic_loss, actor_loss, entropy and phi_grad_linf (largest RL gradient on the representation)
        """
        if representation is not None:
            representation.zero_grad(set_to_none=True)

        context = {"update": "rl", "index": update_index, "batch": len(batch)}
        critic_loss = self.critic_loss(batch)
        backward(critic_loss, context=context)

        actor_loss, entropy = self.actor_loss(batch.latents)
        backward(actor_loss, context=context)

        phi_grad = 0.0
        if representation is not None:
            phi_grad = max_abs_gradient(representation.named_parameters())

        self.critic_optimizer.step()
        self.actor_optimizer.step()
        if representation_optimizer is not None:
            representation_optimizer.step()
        elif representation is not None:
            representation.zero_grad(set_to_none=True)

        self.soft_update_targets()
        self.updates += 1

        return {
            "critic_loss": float(critic_loss.item()),
            "actor_loss": float(actor_loss.item()),
            "entropy": float(entropy.item()),
            "phi_grad_linf": phi_grad,
        }

    @torch.no_grad()
    def soft_update_targets(self):
        for online, target in ((self.critic_1, self.target_1), (self.critic_2, self.target_2)):
            for p, p_targ in zip(online.parameters(), target.parameters()):
                p_targ.mul_(1.0 - self.tau).add_(p, alpha=self.tau)

    def state_dict(self) -> Dict[str, torch.Tensor]:
        """Flat tensor dict of all networks"""
        state = {}
        for prefix, module in (
            ("policy", self.policy),
            ("critic_1", self.critic_1),
            ("critic_2", self.critic_2),
            ("target_1", self.target_1),
            ("target_2", self.target_2),
        ):
            for name, tensor in module.state_dict().items():
                state[f"{prefix}.{name}"] = tensor
        return state

    def load_state_dict(self, state: Dict[str, torch.Tensor]):
        for prefix in ("policy", "critic_1", "critic_2", "target_1", "target_2"):
            module = getattr(self, prefix)
            module.load_state_dict({k[len(prefix) + 1:]: v for k, v in state.items() if k.startswith(prefix + ".")})
