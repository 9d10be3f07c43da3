"""
Frozen-representation probe

For each PSR-loss target (strictly decreasing):
1. keep training the representation on the predictive loss until the
   validation loss is within the tolerance of the target
2. freeze a copy of it
3. train a fresh policy from scratch on the frozen latents
4. record (reached loss, final greedy return)

Targets the update budget cannot reach are logged and left out.
"""

import copy
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import List, Optional, Sequence

import pandas as pd
import torch
from loguru import logger

from .buffer import ReplayBuffer
from .config import RunConfig
from .rollout import STREAM_PROBE, episode_seed
from .trainer import DRL2Trainer

PROBE_COLUMNS = ["target", "psr_loss", "final_return", "psr_updates", "reached"]


@dataclass
class ProbeResult:
    target: float
    psr_loss: float
    final_return: float
    psr_updates: int
    reached: bool = True


def train_to_target(trainer: DRL2Trainer, target: float, budget: int) -> Optional[float]:
    """
    Run predictive updates until the validation loss is at most target * (1 + tolerance)

    Returns:
        The reached validation loss, or None if `budget` updates were not enough
    """
    config = trainer.config
    tolerance = config.probe_tolerance
    used = 0
    while True:
        val_loss, _ = trainer.validation_metrics()
        if val_loss <= target * (1 + tolerance):
            if val_loss < target * (1 - tolerance):
                logger.warning(f"PSR loss {val_loss:.4f} overshot target {target:.4f} by more than {tolerance:.0%}")
            return val_loss
        if used >= budget:
            return None
        for _ in range(min(config.probe_check_interval, budget - used)):
            trainer.psr_update()
            used += 1


def train_policy_on_frozen(trainer: DRL2Trainer, frozen, probe_index: int) -> float:
    """Train a fresh agent on a frozen representation and return its greedy return"""
    config = trainer.config
    torch.manual_seed(episode_seed(config.seed, STREAM_PROBE, probe_index))
    agent = trainer.build_agent()
    buffer = ReplayBuffer(trainer.buffer.capacity)

    rl_per_iteration = max(1, int(round(config.t_rl)))
    for _ in range(config.probe_iterations):
        buffer.extend(trainer.collect(STREAM_PROBE, config.t_gen, frozen, agent))
        for _ in range(rl_per_iteration):
            trainer.rl_update(buffer=buffer, representation=frozen, agent=agent)

    return trainer.evaluate(representation=frozen, agent=agent)


def probe_frozen_phi(
    config: RunConfig,
    psr_loss_targets: Optional[Sequence[float]] = None,
    run_dir: Optional[Path] = None,
    trainer: Optional[DRL2Trainer] = None,
) -> pd.DataFrame:
    """
    Correlate representation quality with downstream return

    Args:
        config: Run configuration (probe_targets used when psr_loss_targets is None)
        psr_loss_targets: Strictly decreasing validation PSR-loss levels
        run_dir: Output directory for probe.csv
        trainer: Existing trainer to reuse

    Returns:
        One row per reached target: target, psr_loss, final_return, psr_updates
    """
    targets = list(config.probe_targets if psr_loss_targets is None else psr_loss_targets)
    if not targets or any(a <= b for a, b in zip(targets, targets[1:])):
        raise ValueError(f"probe targets must be a non-empty strictly decreasing list, got {targets}")

    trainer = trainer or DRL2Trainer(config, run_dir)
    if len(trainer.buffer) == 0:
        trainer.fill_random(max(config.burn_in_episodes, config.batch_size))

    results: List[ProbeResult] = []
    budget = config.probe_max_updates
    for index, target in enumerate(targets):
        start = trainer.psr_updates
        reached = train_to_target(trainer, target, budget)
        budget -= trainer.psr_updates - start
        if reached is None:
            logger.warning(f"Probe target {target:.4f} unreachable within {config.probe_max_updates} PSR updates")
            continue

        frozen = copy.deepcopy(trainer.representation).requires_grad_(False).eval()
        final_return = train_policy_on_frozen(trainer, frozen, index)
        result = ProbeResult(target, reached, final_return, trainer.psr_updates)
        results.append(result)
        trainer.writer.write("probe", asdict(result), columns=PROBE_COLUMNS)
        logger.info(f"Probe target={target:.4f} psr_loss={reached:.4f} final_return={final_return:.4f}")

    trainer.writer.close()
    return pd.DataFrame([asdict(r) for r in results], columns=PROBE_COLUMNS)
