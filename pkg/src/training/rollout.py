"""
Rollouts

Episodes are played in lockstep batches. At every step the latents of all
running episodes are recomputed from their full prefixes with a frozen
representation snapshot and fed to a frozen policy snapshot. Without a
policy, actions are uniform random (burn-in data).

At the episode's marked timestep the environment's test-action sampler
chooses the action instead of the policy.

Every episode draws its hidden configuration, its marked timestep and its
uniform actions from its own seed, so a batch is reproducible from
(seeds, num_workers).
"""

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Optional, Sequence

import numpy as np
import torch
from torch import nn

from ..agents.sacd import select_actions
from ..environment.base import PartiallyObservableEnv
from ..environment.reward_codes import sign_code
from ..environment.trajectory import Trajectory, TrajectoryBuilder
from ..models.representation import RepresentationModel

# seed streams
STREAM_TRAIN = 0
STREAM_EVAL = 1
STREAM_VALIDATION = 2
STREAM_BURN_IN = 3
STREAM_PROBE = 4


def episode_seed(base_seed: int, stream: int, index: int) -> int:
    """Independent 32-bit seed per (run seed, stream, episode index)"""
    return int(np.random.SeedSequence([base_seed, stream, index]).generate_state(1)[0])


class RolloutEngine:
    """Plays batches of episodes, optionally split over worker threads"""

    def __init__(
        self,
        env_factory: Callable[[], PartiallyObservableEnv],
        num_workers: int = 1,
        device: str = "cpu",
    ):
        self.env_factory = env_factory
        self.num_workers = num_workers
        self.device = device
        self.spec = env_factory().spec

    def collect(
        self,
        episode_ids: Sequence[int],
        seeds: Sequence[int],
        representation: Optional[RepresentationModel] = None,
        policy: Optional[nn.Module] = None,
        greedy: bool = False,
        mark_test_step: bool = True,
    ) -> List[Trajectory]:
        """
        Play one episode per (id, seed)

        Args:
            episode_ids: Ids stored on the trajectories
            seeds: Episode seeds
            representation: Frozen representation snapshot (required with a policy)
            policy: Frozen policy network; None plays uniformly at random
            greedy: Greedy action selection
            mark_test_step: Inject one test action per episode at a uniform timestep

        Returns:
            Trajectories in the order of episode_ids
        """
        if len(episode_ids) != len(seeds):
            raise ValueError("episode_ids and seeds must have the same length")
        if policy is not None and representation is None:
            raise ValueError("a policy needs a representation to act on")
        if not episode_ids:
            return []

        chunks = [c for c in np.array_split(np.arange(len(seeds)), self.num_workers) if c.size]
        jobs = [
            ([episode_ids[i] for i in chunk], [seeds[i] for i in chunk], representation, policy, greedy, mark_test_step)
            for chunk in chunks
        ]
        if len(jobs) == 1:
            results = [self._play(*jobs[0])]
        else:
            with ThreadPoolExecutor(max_workers=len(jobs)) as pool:
                results = list(pool.map(lambda job: self._play(*job), jobs))
        return [trajectory for chunk in results for trajectory in chunk]

    @torch.no_grad()
    def _play(
        self,
        episode_ids: List[int],
        seeds: List[int],
        representation: Optional[RepresentationModel],
        policy: Optional[nn.Module],
        greedy: bool,
        mark_test_step: bool,
    ) -> List[Trajectory]:
        spec = self.spec
        H, n = spec.horizon, len(seeds)
        envs = [self.env_factory() for _ in range(n)]
        rngs = [np.random.default_rng(seed) for seed in seeds]
        generator = torch.Generator().manual_seed(int(seeds[0]))

        builders = [
            TrajectoryBuilder(spec, episode_id, int(rng.integers(H)) if mark_test_step else None)
            for episode_id, rng in zip(episode_ids, rngs)
        ]
        observations = [env.reset(seed) for env, seed in zip(envs, seeds)]

        obs_discrete = np.zeros((n, H, spec.num_discrete), dtype=np.int64)
        obs_continuous = np.zeros((n, H, spec.num_continuous), dtype=np.float32)
        actions = np.zeros((n, H), dtype=np.int64)
        reward_codes = np.zeros((n, H), dtype=np.int64)

        for t in range(H):
            active = [i for i, b in enumerate(builders) if not b.done]
            if not active:
                break
            for i in active:
                obs_discrete[i, t] = observations[i].discrete
                obs_continuous[i, t] = observations[i].continuous

            if policy is not None:
                latents = representation(
                    torch.as_tensor(obs_discrete[active, : t + 1], device=self.device),
                    torch.as_tensor(actions[active, : t + 1], device=self.device),
                    torch.as_tensor(reward_codes[active, : t + 1], device=self.device),
                    torch.as_tensor(obs_continuous[active, : t + 1], device=self.device),
                )[:, t]
                chosen = select_actions(policy(latents), greedy, generator).cpu().numpy()
            else:
                chosen = np.array([int(rngs[i].integers(spec.action_cardinality)) for i in active])

            for j, i in enumerate(active):
                builder = builders[i]
                if builder.test_step == t:
                    action = envs[i].sample_test_action()
                else:
                    action = int(chosen[j])
                result = envs[i].step(action)
                builder.add(observations[i], action, result.reward, result.done, result.observation)
                observations[i] = result.observation
                actions[i, t] = action
                reward_codes[i, t] = sign_code(result.reward)

        return [b.build() for b in builders]