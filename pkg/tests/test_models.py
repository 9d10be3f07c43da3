"""Tests for the shared embedding, summarizers and future predictor"""

import pytest
import torch
from torch.nn import functional as F

from src.environment import EnvSpec, make_env
from src.models import (
    FuturePredictor,
    GRUSummarizer,
    RepresentationModel,
    SharedEmbedding,
    TransformerSummarizer,
    build_summarizer,
    history_inputs,
    split_widths,
)
from src.numerics import ParameterOptimizer, finite_difference_check

SPEC = EnvSpec(
    name="toy",
    action_cardinality=3,
    horizon=6,
    channel_cardinalities=(4, 2),
    continuous_bounds=((0.0, 1.0),),
)


def random_episode_batch(spec, batch=2, length=None, generator=None):
    T = length or spec.horizon
    obs = torch.stack(
        [torch.randint(card, (batch, T), generator=generator) for card in spec.channel_cardinalities], dim=-1
    )
    actions = torch.randint(spec.action_cardinality, (batch, T), generator=generator)
    codes = torch.randint(3, (batch, T), generator=generator)
    cont = torch.rand(batch, T, spec.num_continuous, generator=generator)
    return obs, actions, codes, cont


class TestEmbedding:
    def test_split_widths_even(self):
        assert split_widths(208, 52) == [4] * 52
        assert split_widths(128, 3) == [43, 43, 42]

    def test_split_widths_uneven_covers_dim(self):
        widths = split_widths(260, 104)
        assert sum(widths) == 260 and set(widths) <= {2, 3}

    def test_split_widths_too_many_channels(self):
        with pytest.raises(ValueError):
            split_widths(4, 5)

    def test_history_inputs_shift(self):
        actions = torch.tensor([[2, 0, 1]])
        codes = torch.tensor([[1, 2, 0]])
        prev_a, prev_c = history_inputs(actions, codes, num_actions=3)
        assert prev_a.tolist() == [[3, 2, 0]]
        assert prev_c.tolist() == [[0, 1, 2]]

    def test_deterministic(self):
        embed = SharedEmbedding(SPEC, 16)
        obs, actions, codes, cont = random_episode_batch(SPEC)
        assert torch.equal(embed(obs, actions, codes, cont), embed(obs, actions, codes, cont))

    def test_out_of_range_symbol(self):
        embed = SharedEmbedding(SPEC, 16)
        obs, actions, codes, cont = random_episode_batch(SPEC)
        obs[0, 0, 1] = 2
        with pytest.raises(ValueError, match="channel 1"):
            embed(obs, actions, codes, cont)

    def test_continuous_change_stays_in_affine_image(self):
        embed = SharedEmbedding(SPEC, 16)
        obs, actions, codes, cont = random_episode_batch(SPEC, batch=1)
        moved = cont.clone()
        moved[0, 2, 0] += 0.3
        diff = embed(obs, actions, codes, moved) - embed(obs, actions, codes, cont)
        expected = torch.zeros_like(diff)
        expected[0, 2] = 0.3 * embed.continuous.weight[:, 0]
        assert torch.allclose(diff, expected, atol=1e-6)

    def test_concentration_tables(self):
        env = make_env("concentration_medium")
        embed = SharedEmbedding(env.spec, 208)
        assert len(embed.channel_tables) == 104
        assert all(t.embedding_dim == 2 and t.num_embeddings == 53 for t in embed.channel_tables)

    @pytest.mark.parametrize("preset,embed_dim,channels", [
        ("concentration_easy", 260, 52),
        ("concentration_medium", 208, 104),
        ("concentration_hard", 260, 52),
    ])
    def test_concentration_widths_exact(self, preset, embed_dim, channels):
        spec = make_env(preset).spec
        assert spec.num_discrete == channels
        assert split_widths(embed_dim, channels) == [embed_dim // channels] * channels


class TestSummarizers:
    @pytest.mark.parametrize("backbone", ["transformer", "gru"])
    def test_causality(self, backbone):
        summarizer = build_summarizer(backbone, 16, 2, 4, max_len=8).eval()
        tokens = torch.randn(2, 8, 16)
        perturbed = tokens.clone()
        perturbed[:, 5:] += torch.randn(2, 3, 16)
        with torch.no_grad():
            a, b = summarizer(tokens), summarizer(perturbed)
        assert torch.equal(a[:, :5], b[:, :5])
        assert not torch.equal(a[:, 5:], b[:, 5:])

    def test_stateless_ignores_history(self):
        summarizer = build_summarizer("stateless", 8, 1, 1, max_len=4)
        tokens = torch.randn(1, 4, 8)
        perturbed = tokens.clone()
        perturbed[:, 0] = 0.0
        assert torch.equal(summarizer(tokens)[:, 1:], summarizer(perturbed)[:, 1:])

    @pytest.mark.parametrize("backbone", ["transformer", "gru", "stateless"])
    def test_length_one(self, backbone):
        out = build_summarizer(backbone, 16, 2, 4, max_len=8)(torch.randn(3, 1, 16))
        assert out.shape == (3, 1, 16) and torch.isfinite(out).all()

    def test_too_long(self):
        with pytest.raises(ValueError):
            TransformerSummarizer(16, 1, 4, max_len=4)(torch.randn(1, 5, 16))

    def test_heads_must_divide(self):
        with pytest.raises(ValueError):
            TransformerSummarizer(10, 1, 4, max_len=4)

    def test_unknown_backbone(self):
        with pytest.raises(ValueError):
            build_summarizer("lstm", 16, 1, 1, 4)

    def test_attention_gradients(self):
        torch.manual_seed(0)
        summarizer = TransformerSummarizer(8, 2, 2, max_len=5).double()
        tokens = torch.randn(2, 5, 8, dtype=torch.float64)
        err = finite_difference_check(lambda: summarizer(tokens).pow(2).mean(), summarizer.named_parameters(),
                                      max_entries_per_parameter=8)
        assert err < 1e-4

    def test_gru_gradients(self):
        torch.manual_seed(0)
        summarizer = GRUSummarizer(6, 1).double()
        tokens = torch.randn(2, 4, 6, dtype=torch.float64)
        err = finite_difference_check(lambda: summarizer(tokens).pow(2).mean(), summarizer.named_parameters(),
                                      max_entries_per_parameter=16)
        assert err < 1e-4


class TestPredictor:
    def test_probabilities_normalized(self):
        predictor = FuturePredictor(SPEC, 16, hidden_dim=16)
        prediction = predictor(torch.randn(5, 16) * 10, torch.randn(5, 3, 16))
        for probs, card in zip(prediction.probabilities(), SPEC.channel_cardinalities):
            assert probs.shape == (5, 3, card)
            assert (probs >= 0).all()
            assert torch.allclose(probs.sum(-1), torch.ones(5, 3), atol=1e-6)
        assert prediction.continuous.shape == (5, 3, 1)

    def test_gradients(self):
        torch.manual_seed(0)
        predictor = FuturePredictor(SPEC, 6, hidden_dim=4).double()
        latent = torch.randn(3, 6, dtype=torch.float64)
        tokens = torch.randn(3, 2, 6, dtype=torch.float64)

        def loss():
            prediction = predictor(latent, tokens)
            return sum(lp[..., 0].mean() for lp in prediction.log_probabilities()) + prediction.continuous.pow(2).mean()

        assert finite_difference_check(loss, predictor.named_parameters(), max_entries_per_parameter=16) < 1e-4


class TestRepresentationModel:
    def small_model(self, backbone="transformer"):
        return RepresentationModel(SPEC, embed_dim=16, backbone=backbone, num_layers=1, num_heads=2, predictor_hidden=8)

    def test_latent_shape(self):
        model = self.small_model()
        obs, actions, codes, cont = random_episode_batch(SPEC, batch=3)
        assert model(obs, actions, codes, cont).shape == (3, SPEC.horizon, 16)

    def test_padding_does_not_leak_backwards(self):
        model = self.small_model().eval()
        obs, actions, codes, cont = random_episode_batch(SPEC, batch=1)
        mask = torch.zeros(1, SPEC.horizon, dtype=torch.bool)
        mask[:, 4:] = True
        other_obs = obs.clone()
        other_obs[:, 4:] = 0
        with torch.no_grad():
            a = model(obs, actions, codes, cont, padding_mask=mask)
            b = model(other_obs, actions, codes, cont, padding_mask=mask)
        assert torch.equal(a, b)

    def test_summary_parameters_exclude_predictor(self):
        names = [n for n, _ in self.small_model().summary_parameters()]
        assert names and not any(n.startswith("predictor.") for n in names)
        assert any(n.startswith("embedding.") for n in names)

    def test_predictive_loss_reaches_every_part(self):
        model = self.small_model()
        obs, actions, codes, cont = random_episode_batch(SPEC, batch=4)
        latents = model(obs, actions, codes, cont)
        prediction = model.predict(latents[:, 2], actions[:, 2:3])
        loss = sum(F.cross_entropy(logits[:, 0], obs[:, 3, i]) for i, logits in enumerate(prediction.logits))
        loss.backward()
        for prefix in ("embedding.", "summarizer.", "predictor."):
            grads = [p.grad for n, p in model.named_parameters() if n.startswith(prefix) and p.grad is not None]
            assert grads and any(g.abs().sum() > 0 for g in grads)

    def test_fits_constant_observation(self):
        torch.manual_seed(0)
        model = self.small_model("gru")
        obs, actions, codes, cont = random_episode_batch(SPEC, batch=8)
        obs[..., 0] = 2
        optimizer = ParameterOptimizer(model.named_parameters(), learning_rate=1e-2, weight_decay=0.0)
        for _ in range(300):
            latents = model(obs, actions, codes, cont)
            prediction = model.predict(latents[:, :-1].reshape(-1, 16), actions[:, 1:].reshape(-1, 1))
            F.cross_entropy(prediction.logits[0][:, 0], obs[:, 1:, 0].reshape(-1)).backward()
            optimizer.step()
        with torch.no_grad():
            latents = model(obs, actions, codes, cont)
            probs = model.predict(latents[:, 0], actions[:, 1:2]).probabilities()[0]
        assert (probs[:, 0, 2] > 0.99).all()

    def test_embedding_shared_with_test_actions(self):
        model = self.small_model()
        obs, actions, codes, cont = random_episode_batch(SPEC, batch=2)
        latents = model(obs, actions, codes, cont).detach()
        before = model.predict(latents[:, 1], actions[:, 1:2]).logits[0].detach()
        with torch.no_grad():
            model.embedding.action_table.weight.add_(torch.randn_like(model.embedding.action_table.weight))
        after = model.predict(latents[:, 1], actions[:, 1:2]).logits[0].detach()
        assert not torch.allclose(before, after)
        assert not torch.allclose(model(obs, actions, codes, cont), latents)

    def test_stateless_latent_sees_current_observation_only(self):
        model = self.small_model("stateless").eval()
        obs, actions, codes, cont = random_episode_batch(SPEC, batch=2)
        other_obs = obs.clone()
        other_obs[:, 3, 0] = (obs[:, 3, 0] + 1) % 4
        with torch.no_grad():
            a = model(obs, actions, codes, cont)
            b = model(obs, (actions + 1) % SPEC.action_cardinality, (codes + 1) % 3, cont)
            c = model(other_obs, actions, codes, cont)
        assert torch.equal(a, b)
        assert torch.equal(a[:, :3], c[:, :3]) and torch.equal(a[:, 4:], c[:, 4:])
        assert not torch.equal(a[:, 3], c[:, 3])

    def test_history_backbones_see_previous_action(self):
        model = self.small_model("gru").eval()
        obs, actions, codes, cont = random_episode_batch(SPEC, batch=2)
        with torch.no_grad():
            a = model(obs, actions, codes, cont)
            b = model(obs, (actions + 1) % SPEC.action_cardinality, codes, cont)
        assert torch.equal(a[:, 0], b[:, 0])
        assert not torch.equal(a[:, 1], b[:, 1])
