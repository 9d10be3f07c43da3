"""
Run configuration

One flat dataclass holds every hyperparameter. Files under configs/ are flat
YAML mappings with the same field names; an `env_kwargs` mapping is forwarded
to the environment constructor.
"""

import hashlib
from dataclasses import asdict, dataclass, field, fields, replace
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import yaml
from loguru import logger

from ..environment.base import TEST_ACTION_RULES
from ..environment.registry import ENV_CLASSES, PRESETS
from ..models.summarizer import BACKBONES

GENERATION_UNITS = ("episodes", "timesteps")


class Mode(Enum):
    """Training mode"""
    DRL2 = "drl2"  # PSR trains phi, RL sees gradient-blocked latents
    E2E = "e2e"  # no PSR updates, RL loss trains phi
    PROBE = "probe"  # train phi to set PSR losses, then pi on frozen latents
    STATELESS = "stateless"  # phi is a projection of the current token, trained by RL


@dataclass
class RunConfig:
    """All hyperparameters of one run"""
    # environment
    env: str = "gridworld"
    env_kwargs: Dict[str, Any] = field(default_factory=dict)
    test_action_rule: str = "designed"

    # run
    mode: str = "drl2"
    seed: int = 0
    total_steps: int = 100_000  # environment steps, burn-in included
    device: str = "cpu"
    num_workers: int = 1

    # representation
    backbone: str = "transformer"
    embed_dim: int = 128
    num_layers: int = 3
    num_heads: int = 4
    predictor_hidden: int = 16
    core_test_k: int = 1
    dense_core_tests: bool = False

    # Algorithm schedule
    burn_in_episodes: int = 5000
    burn_in_updates: int = 2000
    t_gen: int = 10
    generation_unit: str = "episodes"
    t_psr: float = 50
    t_rl: float = 500
    psr_loss_weight: float = 1.0

    # optimization
    batch_size: int = 64
    buffer_capacity: Optional[int] = None  # episodes; default 30000 // horizon
    lr_sequence: float = 5e-5
    lr_actor: float = 1e-4
    lr_critic: float = 2e-4
    weight_decay: float = 1e-4
    max_grad_norm: float = 1.0

    # SAC
    gamma: float = 0.99
    entropy_coeff: float = 0.01
    tau: float = 0.005
    hidden_dim: int = 256
    rl_include_test_action: bool = False

    # evaluation and outputs
    eval_interval: int = 10  # outer iterations
    eval_episodes: int = 100
    validation_episodes: int = 500
    burn_in_eval_interval: int = 100  # PSR updates between burn-in accuracy points
    checkpoint_interval: int = 50  # outer iterations
    tensorboard: bool = False
    dump_trajectories: bool = False

    # frozen-representation probe
    probe_targets: List[float] = field(default_factory=list)
    probe_tolerance: float = 0.02
    probe_max_updates: int = 20_000
    probe_check_interval: int = 10
    probe_iterations: int = 20  # outer iterations of policy training per target

    @property
    def run_mode(self) -> Mode:
        return Mode(self.mode)

    @classmethod
    def from_dict(cls, values: Dict[str, Any]) -> "RunConfig":
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(values) - known)
        if unknown:
            raise ValueError(f"Unknown config fields: {', '.join(unknown)}")
        return cls(**values)

    @classmethod
    def from_yaml(cls, path: Union[str, Path], **overrides) -> "RunConfig":
        """
        Load a flat YAML config

        Args:
            path: Config file
            **overrides: Field values taking precedence over the file (None values ignored)
        """
        with open(path, "r") as f:
            values = yaml.safe_load(f) or {}
        values.update({k: v for k, v in overrides.items() if v is not None})
        config = cls.from_dict(values)
        logger.info(f"Loaded config from {path}")
        return config

    def with_overrides(self, **overrides) -> "RunConfig":
        return replace(self, **{k: v for k, v in overrides.items() if v is not None})

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    def to_yaml(self, path: Union[str, Path]):
        with open(path, "w") as f:
            yaml.safe_dump(self.to_dict(), f, sort_keys=True)

    def config_hash(self) -> str:
        """First 12 hex digits of SHA-256 over the canonical YAML dump"""
        canonical = yaml.safe_dump(self.to_dict(), sort_keys=True)
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:12]

    def validate(self):
        """Raise ValueError listing every invalid field"""
        errors = []
        if self.env not in ENV_CLASSES and self.env not in PRESETS:
            errors.append(f"env: unknown environment '{self.env}'")
        if self.mode not in {m.value for m in Mode}:
            errors.append(f"mode: '{self.mode}' not in {[m.value for m in Mode]}")
        if self.backbone not in BACKBONES:
            errors.append(f"backbone: '{self.backbone}' not in {BACKBONES}")
        if self.test_action_rule not in TEST_ACTION_RULES:
            errors.append(f"test_action_rule: '{self.test_action_rule}' not in {TEST_ACTION_RULES}")
        if self.generation_unit not in GENERATION_UNITS:
            errors.append(f"generation_unit: '{self.generation_unit}' not in {GENERATION_UNITS}")
        if self.backbone == "transformer" and self.embed_dim % self.num_heads != 0:
            errors.append(f"embed_dim: {self.embed_dim} not divisible by num_heads {self.num_heads}")

        for name in ("embed_dim", "num_layers", "num_heads", "predictor_hidden", "core_test_k", "t_gen",
                     "batch_size", "hidden_dim", "eval_interval", "eval_episodes", "validation_episodes",
                     "burn_in_eval_interval", "checkpoint_interval", "num_workers", "total_steps",
                     "probe_check_interval", "probe_iterations"):
            if getattr(self, name) < 1:
                errors.append(f"{name}: must be >= 1, got {getattr(self, name)}")
        for name in ("burn_in_episodes", "burn_in_updates", "t_psr", "t_rl", "psr_loss_weight",
                     "weight_decay", "entropy_coeff", "probe_max_updates"):
            if getattr(self, name) < 0:
                errors.append(f"{name}: must be >= 0, got {getattr(self, name)}")
        for name in ("lr_sequence", "lr_actor", "lr_critic", "max_grad_norm"):
            if getattr(self, name) <= 0:
                errors.append(f"{name}: must be > 0, got {getattr(self, name)}")
        if not 0.0 <= self.gamma <= 1.0:
            errors.append(f"gamma: must be in [0, 1], got {self.gamma}")
        if not 0.0 < self.tau <= 1.0:
            errors.append(f"tau: must be in (0, 1], got {self.tau}")
        if self.buffer_capacity is not None and self.buffer_capacity < 1:
            errors.append(f"buffer_capacity: must be >= 1, got {self.buffer_capacity}")
        if self.t_psr + self.t_rl <= 0:
            errors.append("t_psr, t_rl: at least one update per iteration is required")

        targets = list(self.probe_targets)
        if self.mode == Mode.PROBE.value:
            if not targets:
                errors.append("probe_targets: required in probe mode")
            if any(a <= b for a, b in zip(targets, targets[1:])):
                errors.append(f"probe_targets: must be strictly decreasing, got {targets}")
            if any(t <= 0 for t in targets):
                errors.append(f"probe_targets: must be positive, got {targets}")

        if errors:
            raise ValueError("Invalid config:\n  " + "\n  ".join(errors))
