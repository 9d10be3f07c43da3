"""
Shared Input Embedding

One token per timestep: (o_t, a_{t-1}, sign code of r_{t-1}).
- each discrete channel has its own lookup table; the table widths partition
  embed_dim across channels and the outputs are concatenated
- continuous channels pass through one affine map to embed_dim
- the previous action and previous reward code are embedded and added, except
  for stateless tokens, which carry the current observation only

The action table has one extra row used as the start token at t = 0. The same
action table embeds the test actions fed to the future predictor.
"""

from typing import List, Optional

import numpy as np
import torch
from torch import nn

from ..environment.base import EnvSpec
from ..environment.reward_codes import NUM_REWARD_CODES


def split_widths(embed_dim: int, num_channels: int) -> List[int]:
    """Near-even partition of embed_dim (exact when divisible)"""
    widths = [len(part) for part in np.array_split(np.arange(embed_dim), num_channels)]
    if min(widths) < 1:
        raise ValueError(f"embed_dim {embed_dim} is smaller than the {num_channels} observation channels")
    return widths


def history_inputs(actions: torch.Tensor, reward_codes: torch.Tensor, num_actions: int):
    """
    Shift per-step actions and reward codes right by one

    Args:
        actions: [B, T] action taken at each step
        reward_codes: [B, T] sign code of the reward received at each step
        num_actions: Action cardinality (index used as start token)

    Returns:
        (previous actions [B, T], previous reward codes [B, T])
    """
    start = torch.full_like(actions[:, :1], num_actions)
    prev_actions = torch.cat([start, actions[:, :-1]], dim=1)
    prev_codes = torch.cat([torch.zeros_like(reward_codes[:, :1]), reward_codes[:, :-1]], dim=1)
    return prev_actions, prev_codes


class SharedEmbedding(nn.Module):
    """Projection from (observation, previous action, previous reward) to embed_dim"""

    def __init__(self, spec: EnvSpec, embed_dim: int, use_history: bool = True):
        super().__init__()
        self.spec = spec
        self.embed_dim = embed_dim
        self.use_history = use_history
        self.widths = split_widths(embed_dim, spec.num_discrete) if spec.num_discrete else []

        self.channel_tables = nn.ModuleList(
            nn.Embedding(card, width) for card, width in zip(spec.channel_cardinalities, self.widths)
        )
        self.continuous = nn.Linear(spec.num_continuous, embed_dim) if spec.num_continuous else None
        self.action_table = nn.Embedding(spec.action_cardinality + 1, embed_dim)
        self.reward_table = nn.Embedding(NUM_REWARD_CODES, embed_dim)

        self.register_buffer(
            "cardinalities",
            torch.tensor(spec.channel_cardinalities, dtype=torch.long),
            persistent=False,
        )

    def _check_symbols(self, obs_discrete: torch.Tensor):
        bad = (obs_discrete < 0) | (obs_discrete >= self.cardinalities)
        if bad.any():
            channel = int(bad.nonzero()[0, -1])
            raise ValueError(
                f"{self.spec.name}: symbol outside [0, {int(self.cardinalities[channel])}) on channel {channel}"
            )

    def embed_action(self, actions: torch.Tensor) -> torch.Tensor:
        return self.action_table(actions)

    def forward(
        self,
        obs_discrete: torch.Tensor,
        prev_actions: torch.Tensor,
        prev_reward_codes: torch.Tensor,
        obs_continuous: Optional[torch.Tensor] = None,
    ) -> torch.Tensor:
        """
        Args:
            obs_discrete: [B, T, C] channel symbols
            prev_actions: [B, T] previous action (num_actions = start token)
            prev_reward_codes: [B, T] previous reward sign code
            obs_continuous: [B, T, Cc] continuous channels

        Returns:
            Tokens [B, T, embed_dim]
        """
        self._check_symbols(obs_discrete)
        if self.channel_tables:
            tokens = torch.cat(
                [table(obs_discrete[..., i]) for i, table in enumerate(self.channel_tables)], dim=-1
            )
        else:
            tokens = torch.zeros(*obs_discrete.shape[:-1], self.embed_dim, device=obs_discrete.device)

        if self.continuous is not None:
            tokens = tokens + self.continuous(obs_continuous)

        if not self.use_history:
            return tokens
        return tokens + self.action_table(prev_actions) + self.reward_table(prev_reward_codes)
