"""
Representation Model

Bundles the shared embedding, the history summarizer and the future
predictor. The embedding weights are used both to build history tokens and
to embed test actions, so the predictive loss and the RL loss see the same
projection.
"""

from typing import Iterator, Optional, Tuple

import torch
from loguru import logger
from torch import nn

from ..environment.base import EnvSpec
from ..numerics.init import initialize_module
from .embedding import SharedEmbedding, history_inputs
from .predictor import FuturePrediction, FuturePredictor
from .summarizer import build_summarizer


class RepresentationModel(nn.Module):
    """Shared embedding + history summarizer (phi) + future predictor (psi)"""

    def __init__(
        self,
        spec: EnvSpec,
        embed_dim: int = 128,
        backbone: str = "transformer",
        num_layers: int = 3,
        num_heads: int = 4,
        predictor_hidden: int = 16,
    ):
        """
        Initialize representation model

        Args:
            spec: Environment description (channel and action cardinalities, horizon)
            embed_dim: Token and latent width
            backbone: 'transformer', 'gru' or 'stateless'
            num_layers: Summarizer depth
            num_heads: Attention heads (transformer only)
            predictor_hidden: Hidden size of the predictor GRU
        """
        super().__init__()
        self.spec = spec
        self.embed_dim = embed_dim
        self.backbone = backbone

        self.embedding = SharedEmbedding(spec, embed_dim, use_history=backbone != "stateless")
        self.summarizer = build_summarizer(backbone, embed_dim, num_layers, num_heads, spec.horizon)
        self.predictor = FuturePredictor(spec, embed_dim, predictor_hidden)
        initialize_module(self)

        logger.info(
            f"RepresentationModel initialized ({backbone}, embed_dim={embed_dim}, "
            f"params={sum(p.numel() for p in self.parameters())})"
        )

    def summary_parameters(self) -> Iterator[Tuple[str, nn.Parameter]]:
        """Parameters upstream of the latent (embedding + summarizer)"""
        for name, param in self.named_parameters():
            if not name.startswith("predictor."):
                yield name, param

    def forward(
        self,
        obs_discrete: torch.Tensor,
        actions: torch.Tensor,
        reward_codes: torch.Tensor,
        obs_continuous: Optional[torch.Tensor] = None,
        padding_mask: Optional[torch.Tensor] = None,
    ) -> torch.Tensor:
        """
        Summarize every prefix of a batch of episodes

        Args:
            obs_discrete: [B, T, C] observations
            actions: [B, T] action taken at each step
            reward_codes: [B, T] sign code of each step's reward
            obs_continuous: [B, T, Cc] continuous observations
            padding_mask: [B, T] True at padded positions; those inputs are zeroed

        Returns:
            Latents [B, T, embed_dim]; latent t summarizes (o_0, a_0, ..., a_{t-1}, o_t)
        """
        if padding_mask is not None:
            keep = ~padding_mask
            obs_discrete = obs_discrete * keep.unsqueeze(-1)
            actions = actions * keep
            reward_codes = reward_codes * keep
            if obs_continuous is not None:
                obs_continuous = obs_continuous * keep.unsqueeze(-1)

        prev_actions, prev_codes = history_inputs(actions, reward_codes, self.spec.action_cardinality)
        tokens = self.embedding(obs_discrete, prev_actions, prev_codes, obs_continuous)
        return self.summarizer(tokens)

    def predict(self, latent: torch.Tensor, test_actions: torch.Tensor) -> FuturePrediction:
        """
        Args:
            latent: [N, embed_dim]
            test_actions: [N, k]
        """
        return self.predictor(latent, self.embedding.embed_action(test_actions))
