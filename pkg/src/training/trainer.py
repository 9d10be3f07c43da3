"""
Decoupled Representation / RL Trainer

Outer loop:
1. Burn-in: fill the buffer with random-policy episodes and pre-train the
   representation on the predictive loss
2. Repeat until the environment-step budget is spent:
   - generate T_gen episodes with the current (frozen) representation and
     policy, one test action injected per episode
   - T_psr predictive updates of (embedding, phi, psi)
   - T_rl actor-critic updates

Modes:
- drl2: RL reads gradient-blocked latents; only the predictive loss trains phi
- e2e: no predictive updates; the critic loss trains embedding and phi
- stateless: like e2e with phi replaced by a projection of the current token
- probe: see probe.py
"""

import copy
import math
from functools import partial
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import numpy as np
import pandas as pd
import torch
from loguru import logger
from tqdm import tqdm

from ..agents.sacd import SACDAgent, Transitions
from ..environment.registry import make_env
from ..environment.trajectory import Trajectory, collate, dump_trajectories
from ..models.representation import RepresentationModel
from ..numerics.autodiff import backward, stop_gradient
from ..numerics.checkpoint import save_checkpoint
from ..numerics.optim import ParameterOptimizer
from ..psr.core_tests import CoreTestSpec, build_psr_batch
from ..psr.loss import prediction_accuracy, psr_loss
from .buffer import ReplayBuffer, default_capacity
from .config import Mode, RunConfig
from .metrics import METRICS_COLUMNS, MetricsWriter
from .rollout import (
    STREAM_BURN_IN,
    STREAM_EVAL,
    STREAM_TRAIN,
    STREAM_VALIDATION,
    RolloutEngine,
    episode_seed,
)
from .schedule import UpdateSchedule


class DRL2Trainer:
    """Owns all mutable model state of one run"""

    def __init__(self, config: RunConfig, run_dir: Optional[Path] = None):
        """
        Initialize trainer

        Args:
            config: Validated run configuration
            run_dir: Output directory (None keeps metrics in memory only)
        """
        config.validate()
        self.config = config
        self.mode = config.run_mode
        self.run_dir = Path(run_dir) if run_dir is not None else None
        self.config_hash = config.config_hash()

        torch.manual_seed(config.seed)
        self.rng = np.random.default_rng(np.random.SeedSequence([config.seed, 1_000]))

        self.env_factory = partial(make_env, config.env, test_action_rule=config.test_action_rule, **config.env_kwargs)
        self.rollouts = RolloutEngine(self.env_factory, config.num_workers, config.device)
        self.spec = self.rollouts.spec

        self.representation = self.build_representation()
        self.agent = self.build_agent()
        self.core_tests = CoreTestSpec(k=config.core_test_k, dense=config.dense_core_tests)

        self.psr_optimizer = ParameterOptimizer(
            self.representation.named_parameters(),
            config.lr_sequence, config.weight_decay, config.max_grad_norm, name="psr",
        )
        self.rl_representation_optimizer = None
        if self.mode in (Mode.E2E, Mode.STATELESS):
            self.rl_representation_optimizer = ParameterOptimizer(
                self.representation.summary_parameters(),
                config.lr_sequence, config.weight_decay, config.max_grad_norm, name="representation_rl",
            )

        self.buffer = ReplayBuffer(config.buffer_capacity or default_capacity(self.spec.horizon))
        self.schedule = UpdateSchedule(
            config.t_psr, config.t_rl, psr_enabled=self.mode in (Mode.DRL2, Mode.PROBE)
        )
        self.writer = MetricsWriter(self.run_dir, config.tensorboard)

        self.env_steps = 0
        self.episodes = 0
        self.iterations = 0
        self.psr_updates = 0
        self.rl_updates = 0
        self._next_episode = {}
        self._validation: Optional[List[Trajectory]] = None

        logger.info(
            f"DRL2Trainer initialized ({config.env}, mode={self.mode.value}, "
            f"backbone={self.representation.backbone}, hash={self.config_hash})"
        )

    # ------------------------------------------------------------------ build

    def build_representation(self) -> RepresentationModel:
        config = self.config
        backbone = "stateless" if self.mode == Mode.STATELESS else config.backbone
        return RepresentationModel(
            self.spec,
            embed_dim=config.embed_dim,
            backbone=backbone,
            num_layers=config.num_layers,
            num_heads=config.num_heads,
            predictor_hidden=config.predictor_hidden,
        ).to(config.device)

    def build_agent(self) -> SACDAgent:
        config = self.config
        return SACDAgent(
            latent_dim=config.embed_dim,
            num_actions=self.spec.action_cardinality,
            hidden_dim=config.hidden_dim,
            gamma=config.gamma,
            entropy_coeff=config.entropy_coeff,
            tau=config.tau,
            lr_actor=config.lr_actor,
            lr_critic=config.lr_critic,
            weight_decay=config.weight_decay,
            max_grad_norm=config.max_grad_norm,
        )

    # ------------------------------------------------------------------ data

    def collect(
        self,
        stream: int,
        count: int,
        representation: Optional[RepresentationModel] = None,
        agent: Optional[SACDAgent] = None,
        greedy: bool = False,
        mark_test_step: bool = True,
        first_index: Optional[int] = None,
    ) -> List[Trajectory]:
        """
        Play `count` episodes from a seed stream

        Args:
            stream: Seed stream (train, eval, validation, burn-in, probe)
            count: Number of episodes
            representation: Representation to act on (snapshotted)
            agent: Agent whose policy acts (None = uniform random)
            greedy: Greedy actions
            mark_test_step: Inject one test action per episode
            first_index: Fixed first episode index (default continues the stream)
        """
        start = self._next_episode.get(stream, 0) if first_index is None else first_index
        indices = list(range(start, start + count))
        if first_index is None:
            self._next_episode[stream] = start + count

        frozen_representation, policy = None, None
        if agent is not None:
            frozen_representation = copy.deepcopy(representation).requires_grad_(False).eval()
            policy = agent.frozen_policy()

        return self.rollouts.collect(
            episode_ids=indices,
            seeds=[episode_seed(self.config.seed, stream, i) for i in indices],
            representation=frozen_representation,
            policy=policy,
            greedy=greedy,
            mark_test_step=mark_test_step,
        )

    def _store(self, trajectories: List[Trajectory]):
        # buffer episode ids count every stored episode, burn-in included
        for offset, trajectory in enumerate(trajectories):
            trajectory.episode_id = self.episodes + offset
        self.buffer.extend(trajectories)
        self.env_steps += sum(tr.length for tr in trajectories)
        self.episodes += len(trajectories)

    def generate_trajectories(self) -> List[Trajectory]:
        """Roll the current policy for T_gen episodes (or timesteps) and store them"""
        config = self.config
        if config.generation_unit == "episodes":
            new = self.collect(STREAM_TRAIN, config.t_gen, self.representation, self.agent)
        else:
            new, steps = [], 0
            while steps < config.t_gen:
                count = max(1, math.ceil((config.t_gen - steps) / self.spec.horizon))
                batch = self.collect(STREAM_TRAIN, count, self.representation, self.agent)
                steps += sum(tr.length for tr in batch)
                new.extend(batch)
        self._store(new)
        return new

    def validation_set(self) -> List[Trajectory]:
        """Held-out random-policy episodes for predictive metrics"""
        if self._validation is None:
            self._validation = self.collect(STREAM_VALIDATION, self.config.validation_episodes, first_index=0)
        return self._validation

    # ------------------------------------------------------------------ updates

    def psr_update(self) -> float:
        """One predictive update; NaN when the sampled episodes hold no core test"""
        episodes = self.buffer.sample(self.config.batch_size, self.rng)
        batch = build_psr_batch(episodes, self.core_tests, self.config.device)
        self.psr_updates += 1
        if batch is None:
            return float("nan")

        loss = psr_loss(self.representation, batch)
        context = {"update": "psr", "index": self.psr_updates, "episodes": batch.episodes.episode_ids[:8]}
        backward(loss * self.config.psr_loss_weight, context=context)
        self.psr_optimizer.step()
        return float(loss.item())

    def transitions(
        self,
        episodes: List[Trajectory],
        representation: RepresentationModel,
        block_gradient: bool,
    ) -> Transitions:
        """
        Per-timestep transitions of a batch of episodes, from one summarizer pass

        Padded steps are excluded; the injected test-action step is excluded
        unless rl_include_test_action is set.
        """
        batch = collate(episodes, self.config.device)
        latents = representation(
            batch.obs_discrete, batch.actions, batch.reward_codes, batch.obs_continuous, batch.padding_mask
        )
        if block_gradient:
            latents = stop_gradient(latents)

        H = self.spec.horizon
        keep = ~batch.padding_mask
        if not self.config.rl_include_test_action:
            keep &= torch.arange(H, device=keep.device).unsqueeze(0) != batch.test_steps.unsqueeze(1)

        rows, steps = keep.nonzero(as_tuple=True)
        next_steps = torch.clamp(steps + 1, max=H - 1)
        return Transitions(
            latents=latents[rows, steps],
            actions=batch.actions[rows, steps],
            rewards=batch.rewards[rows, steps],
            next_latents=latents[rows, next_steps],
            dones=batch.dones[rows, steps],
        )

    def rl_update(
        self,
        buffer: Optional[ReplayBuffer] = None,
        representation: Optional[RepresentationModel] = None,
        agent: Optional[SACDAgent] = None,
    ) -> Dict[str, float]:
        """One actor-critic update (defaults: the trainer's own buffer and models)"""
        buffer = buffer or self.buffer
        agent = agent or self.agent
        own = representation is None
        representation = representation or self.representation

        end_to_end = own and self.rl_representation_optimizer is not None
        episodes = buffer.sample(self.config.batch_size, self.rng)
        batch = self.transitions(episodes, representation, block_gradient=not end_to_end)
        self.rl_updates += 1
        if len(batch) == 0:
            return {}

        return agent.rl_update(
            batch,
            representation=representation if own else None,
            representation_optimizer=self.rl_representation_optimizer if end_to_end else None,
            update_index=self.rl_updates,
        )

    # ------------------------------------------------------------------ phases

    @torch.no_grad()
    def validation_metrics(self, representation: Optional[RepresentationModel] = None) -> Tuple[float, Dict[str, float]]:
        """(validation PSR loss, per-channel prediction accuracy)"""
        representation = representation or self.representation
        batch = build_psr_batch(self.validation_set(), self.core_tests, self.config.device)
        if batch is None:
            return float("nan"), {}
        return float(psr_loss(representation, batch).item()), prediction_accuracy(representation, batch)

    def fill_random(self, count: int):
        """Store `count` random-policy episodes"""
        chunk = max(1, self.config.batch_size)
        for start in tqdm(range(0, count, chunk), desc="Random episodes", leave=False):
            self._store(self.collect(STREAM_BURN_IN, min(chunk, count - start)))

    def burn_in(self) -> pd.DataFrame:
        """
        Fill the buffer with random-policy episodes and pre-train the
        representation on the predictive loss

        Returns:
            Burn-in curve (update, train loss, validation loss, accuracies)
        """
        config = self.config
        if config.burn_in_episodes == 0:
            logger.info("Burn-in skipped (burn_in_episodes=0)")
            return pd.DataFrame()

        logger.info(f"Burn-in: {config.burn_in_episodes} random-policy episodes")
        self.fill_random(config.burn_in_episodes)

        if self.schedule.t_psr == 0:
            logger.info(f"Burn-in pre-training skipped in {self.mode.value} mode")
            return pd.DataFrame()

        losses = []
        for update in tqdm(range(1, config.burn_in_updates + 1), desc="Burn-in", leave=False):
            losses.append(self.psr_update())
            if update % config.burn_in_eval_interval == 0 or update == config.burn_in_updates:
                val_loss, accuracy = self.validation_metrics()
                self.writer.write("burnin", {
                    "step": update,
                    "psr_loss": float(np.nanmean(losses)) if not np.isnan(losses).all() else float("nan"),
                    "val_psr_loss": val_loss,
                    "accuracy": accuracy.get("reward_indicator", float("nan")),
                    **{k: v for k, v in accuracy.items() if k.startswith("ch_")},
                })
                losses = []

        curve = self.writer.frame("burnin")
        if len(curve):
            logger.info(f"Burn-in finished: val_psr_loss={curve['val_psr_loss'].iloc[-1]:.4f}, "
                        f"accuracy={curve['accuracy'].iloc[-1]:.3f}")
        return curve

    def train_epoch(self) -> Dict[str, float]:
        """T_psr predictive updates, then T_rl RL updates"""
        n_psr, n_rl = self.schedule.next_iteration()

        psr_losses = [self.psr_update() for _ in range(n_psr)]
        rl_stats = [self.rl_update() for _ in range(n_rl)]
        self.schedule.record(len(psr_losses), len(rl_stats))

        def mean(values):
            values = [v for v in values if v == v]
            return float(np.mean(values)) if values else float("nan")

        return {
            "psr_updates": n_psr,
            "rl_updates": n_rl,
            "psr_loss": mean(psr_losses),
            "actor_loss": mean([s["actor_loss"] for s in rl_stats if s]),
            "critic_loss": mean([s["critic_loss"] for s in rl_stats if s]),
            "phi_grad_linf": max([s["phi_grad_linf"] for s in rl_stats if s], default=0.0),
        }

    def evaluate(
        self,
        num_episodes: Optional[int] = None,
        representation: Optional[RepresentationModel] = None,
        agent: Optional[SACDAgent] = None,
    ) -> float:
        """Mean greedy return over a fixed held-out set of episode seeds"""
        episodes = self.collect(
            STREAM_EVAL,
            num_episodes or self.config.eval_episodes,
            representation or self.representation,
            agent or self.agent,
            greedy=True,
            mark_test_step=False,
            first_index=0,
        )
        return float(np.mean([tr.episode_return for tr in episodes]))

    def save_checkpoint(self, name: str) -> Optional[Path]:
        if self.run_dir is None:
            return None
        tensors = {f"representation.{k}": v for k, v in self.representation.state_dict().items()}
        tensors.update({f"agent.{k}": v for k, v in self.agent.state_dict().items()})
        return save_checkpoint(
            self.run_dir / "checkpoints" / f"{name}.ckpt",
            tensors,
            self.config_hash,
            extra={"step": self.env_steps, "episodes": self.episodes, "mode": self.mode.value},
        )

    def run(self) -> pd.DataFrame:
        """
        Burn-in, then alternate data generation and training until the step budget is spent

        Returns:
            Metrics stream (one row per outer iteration)
        """
        config = self.config
        if self.mode == Mode.PROBE:
            raise ValueError("probe mode runs through probe_frozen_phi()")

        self.burn_in()

        progress = tqdm(total=config.total_steps, initial=min(self.env_steps, config.total_steps), desc="Training")
        try:
            while self.env_steps < config.total_steps:
                before = self.env_steps
                self.generate_trajectories()
                stats = self.train_epoch()
                self.iterations += 1
                progress.update(min(self.env_steps, config.total_steps) - min(before, config.total_steps))

                last = self.env_steps >= config.total_steps
                eval_return, accuracy = float("nan"), float("nan")
                if self.iterations % config.eval_interval == 0 or last:
                    eval_return = self.evaluate()
                    _, acc = self.validation_metrics()
                    accuracy = acc.get("reward_indicator", float("nan"))
                    logger.info(
                        f"step={self.env_steps} episodes={self.episodes} eval_return={eval_return:.4f} "
                        f"psr_loss={stats['psr_loss']:.4f} accuracy={accuracy:.3f}"
                    )

                self.writer.write("metrics", {
                    "step": self.env_steps,
                    "episodes": self.episodes,
                    "psr_loss": stats["psr_loss"],
                    "actor_loss": stats["actor_loss"],
                    "critic_loss": stats["critic_loss"],
                    "eval_return": eval_return,
                    "prediction_accuracy": accuracy,
                }, columns=METRICS_COLUMNS)

                if self.iterations % config.checkpoint_interval == 0:
                    self.save_checkpoint(f"step_{self.env_steps}")
        finally:
            progress.close()

        self.save_checkpoint("final")
        if config.dump_trajectories and self.run_dir is not None:
            dump_trajectories(list(self.buffer.episodes), self.run_dir / "trajectories.csv")
        self.writer.close()

        logger.info(f"Run finished: {self.env_steps} steps, {self.episodes} episodes, "
                    f"{self.psr_updates} PSR / {self.rl_updates} RL updates")
        return self.writer.frame("metrics")
