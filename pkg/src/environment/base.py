"""
Partially Observable Episodic Environments - shared types

Every benchmark environment exposes the same interface:
- reset(seed) -> Observation
- step(action) -> StepResult
- sample_test_action() -> int

Observations are split into discrete channels (one symbol per channel, each
with a declared cardinality) and an optional block of bounded continuous
channels. The EnvSpec of each environment is what the sequence models
use to size their embedding tables and prediction heads.
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from gymnasium import spaces
from gymnasium.utils import seeding
from loguru import logger


TEST_ACTION_RULES = ("designed", "uniform")


@dataclass(frozen=True)
class EnvSpec:
    """Static description of an environment"""
    name: str
    action_cardinality: int
    horizon: int
    channel_cardinalities: Tuple[int, ...]
    continuous_bounds: Tuple[Tuple[float, float], ...] = ()
    reward_channel: Optional[int] = None  # index of the reward-code channel, if any

    def __post_init__(self):
        if self.horizon < 1:
            raise ValueError(f"{self.name}: horizon must be >= 1, got {self.horizon}")
        if self.action_cardinality < 2:
            raise ValueError(
                f"{self.name}: action_cardinality must be >= 2, got {self.action_cardinality}"
            )
        if any(c < 1 for c in self.channel_cardinalities):
            raise ValueError(f"{self.name}: channel cardinalities must be positive")
        if self.reward_channel is not None and not 0 <= self.reward_channel < len(self.channel_cardinalities):
            raise ValueError(f"{self.name}: reward_channel {self.reward_channel} out of range")

    @property
    def num_discrete(self) -> int:
        return len(self.channel_cardinalities)

    @property
    def num_continuous(self) -> int:
        return len(self.continuous_bounds)

    def action_space(self) -> spaces.Discrete:
        return spaces.Discrete(self.action_cardinality)


@dataclass
class Observation:
    """One observation: discrete channel symbols plus continuous channel values"""
    discrete: np.ndarray
    continuous: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.float32))

    def __post_init__(self):
        self.discrete = np.asarray(self.discrete, dtype=np.int64)
        self.continuous = np.asarray(self.continuous, dtype=np.float32)

    def validate(self, spec: EnvSpec):
        """Raise ValueError if any channel is outside its declared range"""
        if self.discrete.shape != (spec.num_discrete,):
            raise ValueError(
                f"{spec.name}: expected {spec.num_discrete} discrete channels, got {self.discrete.shape}"
            )
        cards = np.asarray(spec.channel_cardinalities)
        bad = np.flatnonzero((self.discrete < 0) | (self.discrete >= cards))
        if bad.size:
            i = int(bad[0])
            raise ValueError(
                f"{spec.name}: channel {i} symbol {int(self.discrete[i])} outside [0, {int(cards[i])})"
            )
        if self.continuous.shape != (spec.num_continuous,):
            raise ValueError(
                f"{spec.name}: expected {spec.num_continuous} continuous channels, got {self.continuous.shape}"
            )
        for i, (lo, hi) in enumerate(spec.continuous_bounds):
            if not lo <= float(self.continuous[i]) <= hi:
                raise ValueError(f"{spec.name}: continuous channel {i} value {self.continuous[i]} outside [{lo}, {hi}]")


@dataclass
class StepResult:
    """Outcome of a single environment step"""
    observation: Observation
    reward: float
    done: bool
    info: Dict[str, Any] = field(default_factory=dict)


class PartiallyObservableEnv:
    """
    Base class for the benchmark environments

    Subclasses implement:
    - _reset() -> Observation, drawing the hidden configuration from self.np_random
    - _step(action) -> (Observation, reward, terminal)
    - _designed_test_action() -> int (defaults to uniform)

    The base class owns the episode clock, horizon truncation, action
    validation and the "no step after done" contract.
    """

    def __init__(self, spec: EnvSpec, test_action_rule: str = "designed"):
        """
        Initialize environment

        Args:
            spec: Static environment description
            test_action_rule: 'designed' (per-environment rule) or 'uniform'
        """
        if test_action_rule not in TEST_ACTION_RULES:
            raise ValueError(f"Unknown test_action_rule '{test_action_rule}', use one of {TEST_ACTION_RULES}")

        self.spec = spec
        self.test_action_rule = test_action_rule
        self.action_space = spec.action_space()
        self.np_random: Optional[np.random.Generator] = None

        self.t = 0
        self.done = True
        self.episode_count = 0
        self.total_steps = 0

        logger.debug(f"{type(self).__name__} initialized ({spec.name}, H={spec.horizon}, A={spec.action_cardinality})")

    @property
    def name(self) -> str:
        return self.spec.name

    def reset(self, seed: int) -> Observation:
        """Start a new episode whose hidden configuration is a function of seed"""
        self.np_random, _ = seeding.np_random(int(seed))
        self.t = 0
        self.done = False
        self.episode_count += 1
        return self._reset()

    def step(self, action: int) -> StepResult:
        """Advance one timestep"""
        if self.done:
            raise RuntimeError(f"{self.name}: step() called on a finished episode (t={self.t})")
        action = int(action)
        if not self.action_space.contains(action):
            raise ValueError(f"{self.name}: action {action} outside [0, {self.spec.action_cardinality})")

        observation, reward, terminal = self._step(action)
        self.t += 1
        self.total_steps += 1
        self.done = bool(terminal) or self.t >= self.spec.horizon
        return StepResult(observation=observation, reward=float(reward), done=self.done)

    def sample_test_action(self) -> int:
        """Action used at the marked test timestep"""
        if self.done:
            raise RuntimeError(f"{self.name}: sample_test_action() called on a finished episode")
        if self.test_action_rule == "uniform":
            return self._uniform_action()
        return int(self._designed_test_action())

    def _uniform_action(self) -> int:
        return int(self.np_random.integers(self.spec.action_cardinality))

    def _choose_from(self, candidates: List[int]) -> int:
        """Uniform choice from a candidate list, uniform over all actions if empty"""
        if not candidates:
            return self._uniform_action()
        return int(candidates[int(self.np_random.integers(len(candidates)))])

    def _designed_test_action(self) -> int:
        return self._uniform_action()

    def _reset(self) -> Observation:
        raise NotImplementedError

    def _step(self, action: int) -> Tuple[Observation, float, bool]:
        raise NotImplementedError
