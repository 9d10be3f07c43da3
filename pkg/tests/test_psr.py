"""Tests for core-test extraction and the predictive loss"""

import math

import numpy as np
import pytest
import torch

from src.environment import EnvSpec, Observation, TrajectoryBuilder
from src.models import RepresentationModel
from src.psr import CoreTestSpec, build_psr_batch, extract_core_tests, prediction_accuracy, psr_loss

SPEC = EnvSpec(name="toy", action_cardinality=3, horizon=8, channel_cardinalities=(4, 3), reward_channel=1)


def make_trajectory(episode_id, length, test_step, seed=0):
    rng = np.random.default_rng(seed)
    builder = TrajectoryBuilder(SPEC, episode_id, test_step)
    observations = [Observation(discrete=[int(rng.integers(4)), int(rng.integers(3))]) for _ in range(length + 1)]
    for t in range(length):
        builder.add(observations[t], int(rng.integers(3)), float(rng.normal()), t == length - 1, observations[t + 1])
    return builder.build()


def small_model():
    torch.manual_seed(0)
    return RepresentationModel(SPEC, embed_dim=16, backbone="transformer", num_layers=1, num_heads=2, predictor_hidden=8)


class TestCoreTestSpec:
    def test_k_positive(self):
        with pytest.raises(ValueError):
            CoreTestSpec(k=0)


class TestExtraction:
    def test_marked_step(self):
        traj = make_trajectory(0, 8, test_step=3)
        [sample] = extract_core_tests(traj, CoreTestSpec(k=1))
        assert sample.anchor == 3 and sample.history_length == 4
        assert sample.test_actions.tolist() == [traj.actions[3]]
        np.testing.assert_array_equal(sample.target_discrete, traj.obs_discrete[4:5])

    def test_mark_on_last_step_targets_terminal_observation(self):
        traj = make_trajectory(0, 8, test_step=7)
        [sample] = extract_core_tests(traj, CoreTestSpec(k=1))
        assert sample.anchor == 7
        np.testing.assert_array_equal(sample.target_discrete, traj.final_discrete[None])

    def test_short_episode_targets_terminal_observation(self):
        traj = make_trajectory(0, 5, test_step=4)
        [sample] = extract_core_tests(traj, CoreTestSpec(k=1))
        np.testing.assert_array_equal(sample.target_discrete[0], traj.final_discrete)
        assert extract_core_tests(traj, CoreTestSpec(k=2)) == []

    def test_mark_in_padding_dropped(self):
        traj = make_trajectory(0, 5, test_step=6)
        assert extract_core_tests(traj, CoreTestSpec(k=1)) == []

    def test_horizon_k_boundary(self):
        traj = make_trajectory(0, 8, test_step=5)
        [sample] = extract_core_tests(traj, CoreTestSpec(k=3))
        np.testing.assert_array_equal(sample.target_discrete[:2], traj.obs_discrete[6:8])
        np.testing.assert_array_equal(sample.target_discrete[2], traj.final_discrete)
        assert extract_core_tests(traj, CoreTestSpec(k=4)) == []

    def test_unmarked_rejected(self):
        with pytest.raises(ValueError, match="no marked test step"):
            extract_core_tests(make_trajectory(4, 8, test_step=None), CoreTestSpec())

    def test_dense(self):
        traj = make_trajectory(0, 6, test_step=None)
        samples = extract_core_tests(traj, CoreTestSpec(k=2, dense=True))
        assert [s.anchor for s in samples] == [0, 1, 2, 3, 4]

    def test_batch_none_when_all_dropped(self):
        trajs = [make_trajectory(i, 5, test_step=5 + i) for i in range(3)]
        assert build_psr_batch(trajs, CoreTestSpec()) is None

    def test_batch_layout(self):
        trajs = [make_trajectory(0, 8, 2), make_trajectory(1, 5, 6), make_trajectory(2, 8, 0, seed=2)]
        batch = build_psr_batch(trajs, CoreTestSpec())
        assert len(batch) == 2
        assert batch.episode_index.tolist() == [0, 2]
        assert batch.anchors.tolist() == [2, 0]
        assert batch.target_discrete.shape == (2, 1, 2)


class TestLoss:
    def batch(self, n=8):
        return build_psr_batch([make_trajectory(i, 8, i % 7, seed=i) for i in range(n)], CoreTestSpec())

    def test_uniform_predictor(self):
        model = small_model()
        with torch.no_grad():
            for head in model.predictor.heads:
                head.weight.zero_()
                head.bias.zero_()
        loss = psr_loss(model, self.batch())
        assert loss.item() == pytest.approx((math.log(4) + math.log(3)) / 2, abs=1e-6)

    def test_mean_of_per_sample(self):
        model = small_model()
        batch = self.batch()
        per_sample = psr_loss(model, batch, per_sample=True)
        assert per_sample.shape == (8,)
        assert psr_loss(model, batch).item() == pytest.approx(per_sample.mean().item(), abs=1e-6)
        assert (per_sample >= 0).all()

    def test_permutation_invariant(self):
        model = small_model().eval()
        trajs = [make_trajectory(i, 8, i % 7, seed=i) for i in range(8)]
        a = psr_loss(model, build_psr_batch(trajs, CoreTestSpec()))
        b = psr_loss(model, build_psr_batch(trajs[::-1], CoreTestSpec()))
        assert a.item() == pytest.approx(b.item(), abs=1e-6)

    def test_padding_values_ignored(self):
        model = small_model().eval()
        trajs = [make_trajectory(i, 5, 2, seed=i) for i in range(4)]
        a = psr_loss(model, build_psr_batch(trajs, CoreTestSpec()))
        for traj in trajs:
            traj.obs_discrete[5:] = 3 % np.array(SPEC.channel_cardinalities)
            traj.actions[5:] = 2
        b = psr_loss(model, build_psr_batch(trajs, CoreTestSpec()))
        assert a.item() == b.item()

    def test_empty_batch(self):
        batch = self.batch()
        batch.anchors = batch.anchors[:0]
        with pytest.raises(ValueError):
            psr_loss(small_model(), batch)

    def test_gradients_reach_all_components(self):
        model = small_model()
        psr_loss(model, self.batch()).backward()
        for prefix in ("embedding.", "summarizer.", "predictor."):
            assert any(
                p.grad is not None and p.grad.abs().sum() > 0
                for n, p in model.named_parameters() if n.startswith(prefix)
            )

    def test_accuracy_keys(self):
        accuracy = prediction_accuracy(small_model(), self.batch())
        assert set(accuracy) == {"ch_0", "ch_1", "mean", "reward_indicator"}
        assert accuracy["reward_indicator"] == accuracy["ch_1"]
        assert all(0.0 <= v <= 1.0 for v in accuracy.values())

    def test_continuous_squared_error(self):
        spec = EnvSpec(name="toy", action_cardinality=2, horizon=4, channel_cardinalities=(2,),
                       continuous_bounds=((0.0, 1.0),))
        model = RepresentationModel(spec, embed_dim=8, backbone="gru", num_layers=1, num_heads=1, predictor_hidden=4)
        with torch.no_grad():
            model.predictor.heads[0].weight.zero_()
            model.predictor.heads[0].bias.zero_()
            model.predictor.continuous_head.weight.zero_()
            model.predictor.continuous_head.bias.zero_()
        builder = TrajectoryBuilder(spec, 0, 0)
        values = [0.1, 0.5, 0.3, 0.9, 0.2]
        for t in range(4):
            builder.add(Observation(discrete=[0], continuous=[values[t]]), 0, 0.0, t == 3,
                        Observation(discrete=[0], continuous=[values[t + 1]]))
        batch = build_psr_batch([builder.build()], CoreTestSpec())
        # (ln 2 + 0.5^2) / 2
        assert psr_loss(model, batch).item() == pytest.approx((math.log(2) + 0.25) / 2, abs=1e-6)
