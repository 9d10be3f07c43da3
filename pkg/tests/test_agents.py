"""Tests for the discrete soft actor-critic"""

import numpy as np
import pytest
import torch

from src.agents import SACDAgent, Transitions, select_actions
from src.environment import EnvSpec
from src.models import RepresentationModel
from src.numerics import ParameterOptimizer

# chi-square 0.99 quantile for 3 degrees of freedom
CHI2_3DOF_99 = 11.345


def make_batch(n=8, dim=6, rewards=None, dones=None, latents=None):
    return Transitions(
        latents=torch.randn(n, dim) if latents is None else latents,
        actions=torch.randint(3, (n,)),
        rewards=torch.ones(n) if rewards is None else rewards,
        next_latents=torch.randn(n, dim),
        dones=torch.ones(n) if dones is None else dones,
    )


class TestActionSelection:
    def test_greedy_argmax(self):
        assert select_actions(torch.tensor([[5.0, 0.0, 0.0, 0.0]]), greedy=True).tolist() == [0]

    def test_greedy_ties_lowest_index(self):
        assert select_actions(torch.tensor([[0.0, 2.0, 2.0]]), greedy=True).tolist() == [1]

    def test_equal_logits_sample_uniformly(self):
        generator = torch.Generator().manual_seed(0)
        draws = select_actions(torch.zeros(10000, 4), generator=generator).numpy()
        counts = np.bincount(draws, minlength=4)
        assert float(((counts - 2500) ** 2 / 2500).sum()) < CHI2_3DOF_99

    def test_act_single_latent(self):
        agent = SACDAgent(latent_dim=6, num_actions=3, hidden_dim=16)
        action = agent.act(torch.randn(6), greedy=True)
        assert action.shape == () and 0 <= int(action) < 3


class TestCritic:
    def test_terminal_target_is_reward(self):
        agent = SACDAgent(latent_dim=6, num_actions=3, hidden_dim=16)
        batch = make_batch()
        target = agent.critic_target(batch.rewards, batch.next_latents, batch.dones)
        assert torch.equal(target, torch.ones(8))

    def test_loss_matches_hand_calculation(self):
        agent = SACDAgent(latent_dim=6, num_actions=3, hidden_dim=16)
        batch = make_batch(n=4)
        with torch.no_grad():
            q_1 = agent.critic_1(batch.latents)[torch.arange(4), batch.actions]
            q_2 = agent.critic_2(batch.latents)[torch.arange(4), batch.actions]
        expected = sum(((q_1[i] - 1) ** 2 + (q_2[i] - 1) ** 2).item() for i in range(4)) / 4
        assert agent.critic_loss(batch).item() == pytest.approx(expected, abs=1e-6)

    def test_double_q_symmetric(self):
        agent = SACDAgent(latent_dim=6, num_actions=3, hidden_dim=16)
        batch = make_batch(dones=torch.zeros(8))
        before = agent.critic_target(batch.rewards, batch.next_latents, batch.dones)
        agent.target_1, agent.target_2 = agent.target_2, agent.target_1
        after = agent.critic_target(batch.rewards, batch.next_latents, batch.dones)
        assert torch.equal(before, after)

    def test_targets_track_online(self):
        agent = SACDAgent(latent_dim=6, num_actions=3, hidden_dim=16, tau=0.1)
        for p, p_targ in zip(agent.critic_1.parameters(), agent.target_1.parameters()):
            assert torch.equal(p, p_targ)

        start = [p.detach().clone() for p in agent.target_1.parameters()]
        with torch.no_grad():
            for p in agent.critic_1.parameters():
                p.add_(torch.randn_like(p))
        for _ in range(5):
            agent.soft_update_targets()
        for p, p_targ, p0 in zip(agent.critic_1.parameters(), agent.target_1.parameters(), start):
            expected = p + (0.9 ** 5) * (p0 - p)
            assert torch.allclose(p_targ, expected, atol=1e-6)


class TestActor:
    def test_single_action_has_zero_gradient(self):
        agent = SACDAgent(latent_dim=6, num_actions=1, hidden_dim=16, entropy_coeff=0.0)
        loss, _ = agent.actor_loss(torch.randn(8, 6))
        loss.backward()
        for p in agent.policy.parameters():
            assert p.grad is None or torch.count_nonzero(p.grad) == 0

    def test_entropy_of_uniform_policy(self):
        agent = SACDAgent(latent_dim=6, num_actions=4, hidden_dim=16)
        with torch.no_grad():
            agent.policy[-1].weight.zero_()
            agent.policy[-1].bias.zero_()
        _, entropy = agent.actor_loss(torch.randn(8, 6))
        assert entropy.item() == pytest.approx(np.log(4), abs=1e-6)


class TestGradientRouting:
    SPEC = EnvSpec(name="toy", action_cardinality=3, horizon=5, channel_cardinalities=(4,))

    def representation_and_batch(self):
        model = RepresentationModel(self.SPEC, embed_dim=8, backbone="gru", num_layers=1, num_heads=1, predictor_hidden=4)
        obs = torch.randint(4, (4, 5, 1))
        actions = torch.randint(3, (4, 5))
        codes = torch.randint(3, (4, 5))
        latents = model(obs, actions, codes)
        batch = Transitions(
            latents=latents[:, :-1].reshape(-1, 8),
            actions=actions[:, :-1].reshape(-1),
            rewards=torch.randn(16),
            next_latents=latents[:, 1:].reshape(-1, 8),
            dones=torch.zeros(16),
        )
        return model, batch

    def test_decoupled_blocks_representation_gradient(self):
        model, batch = self.representation_and_batch()
        batch.latents = batch.latents.detach()
        batch.next_latents = batch.next_latents.detach()
        agent = SACDAgent(latent_dim=8, num_actions=3, hidden_dim=16)
        policy_before = [p.detach().clone() for p in agent.policy.parameters()]

        metrics = agent.rl_update(batch, representation=model)

        assert metrics["phi_grad_linf"] == 0.0
        assert all(p.grad is None for p in model.parameters())
        assert any(not torch.equal(a, b) for a, b in zip(policy_before, agent.policy.parameters()))

    def test_end_to_end_reaches_representation(self):
        model, batch = self.representation_and_batch()
        agent = SACDAgent(latent_dim=8, num_actions=3, hidden_dim=16)
        optimizer = ParameterOptimizer(model.summary_parameters(), learning_rate=1e-3, name="sequence")
        before = [p.detach().clone() for _, p in model.summary_parameters()]

        metrics = agent.rl_update(batch, representation=model, representation_optimizer=optimizer)

        assert metrics["phi_grad_linf"] > 0.0
        assert any(not torch.equal(a, p) for a, (_, p) in zip(before, model.summary_parameters()))

    def test_non_finite_reward_aborts(self):
        agent = SACDAgent(latent_dim=6, num_actions=3, hidden_dim=16)
        batch = make_batch(rewards=torch.tensor([float("nan")] + [0.0] * 7))
        with pytest.raises(RuntimeError, match="Non-finite"):
            agent.rl_update(batch, update_index=3)


class TestLearning:
    def test_contextual_bandit(self):
        torch.manual_seed(0)
        contexts = torch.randn(8, 6)
        best = torch.arange(8) % 3
        agent = SACDAgent(latent_dim=6, num_actions=3, hidden_dim=32, lr_actor=1e-3, lr_critic=2e-3)

        latents = contexts.repeat_interleave(3, dim=0)
        actions = torch.arange(3).repeat(8)
        batch = Transitions(
            latents=latents,
            actions=actions,
            rewards=(actions == best.repeat_interleave(3)).float(),
            next_latents=latents,
            dones=torch.ones(24),
        )
        for i in range(1500):
            agent.rl_update(batch, update_index=i)

        greedy = agent.act(contexts, greedy=True)
        assert (greedy == best.numpy()).mean() >= 0.99

    def test_state_dict_round_trip(self):
        agent, other = SACDAgent(6, 3, hidden_dim=16), SACDAgent(6, 3, hidden_dim=16)
        other.load_state_dict(agent.state_dict())
        latents = torch.randn(4, 6)
        assert torch.equal(agent.policy(latents), other.policy(latents))
        assert torch.equal(agent.target_2(latents), other.target_2(latents))
