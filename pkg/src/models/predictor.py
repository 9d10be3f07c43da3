"""
Future Predictor

One-layer GRU decoder. Its hidden state starts from an affine map of the
history latent; it consumes the embedded test actions one per step and emits,
per step, a distribution over every discrete channel and a value for every
continuous channel.
"""

from dataclasses import dataclass
from typing import List, Optional

import torch
from torch import nn
from torch.nn import functional as F

from ..environment.base import EnvSpec


@dataclass
class FuturePrediction:
    """Per-step predictions for k test steps"""
    logits: List[torch.Tensor]  # per discrete channel: [N, k, cardinality]
    continuous: Optional[torch.Tensor] = None  # [N, k, Cc]

    def probabilities(self) -> List[torch.Tensor]:
        return [F.softmax(x, dim=-1) for x in self.logits]

    def log_probabilities(self) -> List[torch.Tensor]:
        return [F.log_softmax(x, dim=-1) for x in self.logits]


class FuturePredictor(nn.Module):
    def __init__(self, spec: EnvSpec, embed_dim: int, hidden_dim: int = 16):
        super().__init__()
        self.bridge = nn.Linear(embed_dim, hidden_dim)
        self.gru = nn.GRU(embed_dim, hidden_dim, num_layers=1, batch_first=True)
        self.heads = nn.ModuleList(nn.Linear(hidden_dim, card) for card in spec.channel_cardinalities)
        self.continuous_head = nn.Linear(hidden_dim, spec.num_continuous) if spec.num_continuous else None

    def forward(self, latent: torch.Tensor, action_tokens: torch.Tensor) -> FuturePrediction:
        """
        Args:
            latent: [N, embed_dim] history latent at the test step
            action_tokens: [N, k, embed_dim] embedded test actions

        Returns:
            FuturePrediction over the k following observations
        """
        h0 = self.bridge(latent).unsqueeze(0)
        out, _ = self.gru(action_tokens, h0)
        return FuturePrediction(
            logits=[head(out) for head in self.heads],
            continuous=self.continuous_head(out) if self.continuous_head is not None else None,
        )
