"""
Predictive loss

Per sample, the loss is the mean over predicted steps and channels of
- cross-entropy of the true symbol, for each discrete channel
- squared error, for each continuous channel
and the batch loss is the mean over samples.
"""

from typing import Dict

import torch
from torch.nn import functional as F

from ..models.representation import RepresentationModel
from .core_tests import PSRBatch


def anchor_latents(model: RepresentationModel, batch: PSRBatch) -> torch.Tensor:
    """Summarize every episode once and gather the latent at each sample's anchor"""
    episodes = batch.episodes
    latents = model(
        episodes.obs_discrete,
        episodes.actions,
        episodes.reward_codes,
        episodes.obs_continuous,
        episodes.padding_mask,
    )
    return latents[batch.episode_index, batch.anchors]


def psr_loss_terms(model: RepresentationModel, batch: PSRBatch) -> torch.Tensor:
    """Per-sample, per-step, per-channel loss terms [N, k, C + Cc]"""
    prediction = model.predict(anchor_latents(model, batch), batch.test_actions)
    N, k = batch.test_actions.shape

    terms = [
        F.cross_entropy(logits.reshape(N * k, -1), batch.target_discrete[..., i].reshape(-1), reduction="none").view(N, k)
        for i, logits in enumerate(prediction.logits)
    ]
    if prediction.continuous is not None:
        squared = (prediction.continuous - batch.target_continuous) ** 2
        terms.extend(squared.unbind(dim=-1))
    return torch.stack(terms, dim=-1)


def psr_loss(model: RepresentationModel, batch: PSRBatch, per_sample: bool = False) -> torch.Tensor:
    """
    Future-observation prediction loss

    Args:
        model: Representation model (embedding, summarizer, predictor)
        batch: Non-empty core-test batch
        per_sample: Return [N] per-sample losses instead of the batch mean

    Returns:
        Scalar loss (or [N])
    """
    if len(batch) == 0:
        raise ValueError("psr_loss needs a non-empty batch")
    per_sample_loss = psr_loss_terms(model, batch).mean(dim=(1, 2))
    return per_sample_loss if per_sample else per_sample_loss.mean()


@torch.no_grad()
def prediction_accuracy(model: RepresentationModel, batch: PSRBatch) -> Dict[str, float]:
    """
    Argmax accuracy per discrete channel over all samples and predicted steps

    Returns:
        {'ch_0': ..., 'ch_1': ..., 'mean': ..., 'reward_indicator': ...}; the
        reward indicator is the reward-code channel when the environment has one
    """
    prediction = model.predict(anchor_latents(model, batch), batch.test_actions)
    accuracy = {}
    for i, logits in enumerate(prediction.logits):
        correct = logits.argmax(dim=-1) == batch.target_discrete[..., i]
        accuracy[f"ch_{i}"] = float(correct.float().mean())

    values = list(accuracy.values())
    accuracy["mean"] = sum(values) / len(values) if values else float("nan")
    reward_channel = model.spec.reward_channel
    accuracy["reward_indicator"] = accuracy[f"ch_{reward_channel}"] if reward_channel is not None else accuracy["mean"]
    return accuracy
