"""
Card Memory Environments

- RepeatPrevious: name the suit dealt k steps ago
- AutoEncode: watch a sequence of cards, then play it back in reverse order
- Concentration: flip face-down cards two at a time looking for matches

All three take their hidden configuration (the shuffled deal) from the
episode seed.
"""

from typing import List, Optional, Tuple

import numpy as np

from .base import EnvSpec, Observation, PartiallyObservableEnv
from .reward_codes import NUM_REWARD_CODES, encode_reward_channel

CARDS_PER_SUIT = 13
SUITS_PER_DECK = 4
CARDS_PER_DECK = CARDS_PER_SUIT * SUITS_PER_DECK

MATCH_RULES = ("rank", "color", "rank_or_color")


class RepeatPrevious(PartiallyObservableEnv):
    """
    Observation: (current suit, reward code of the previous action)
    Action: the suit dealt k steps ago
    Reward: +1/(H-k) correct, -1/(H-k) incorrect, 0 while no card k steps back exists
    """

    def __init__(
        self,
        k: int = 2,
        num_suits: int = 4,
        num_decks: int = 1,
        horizon: Optional[int] = None,
        name: str = "repeat_previous",
        test_action_rule: str = "designed",
    ):
        """
        Args:
            k: Recall distance
            num_suits: Number of suits (also the action cardinality)
            num_decks: Decks shuffled together; each suit has 13 cards per deck
            horizon: Episode length (default: the whole deal)
            name: Preset name
            test_action_rule: 'designed' or 'uniform'
        """
        deck_size = num_decks * num_suits * CARDS_PER_SUIT
        horizon = deck_size if horizon is None else int(horizon)
        if horizon > deck_size:
            raise ValueError(f"horizon {horizon} exceeds the {deck_size}-card deal")
        if not 1 <= k < horizon:
            raise ValueError(f"k must be in [1, {horizon}), got {k}")

        spec = EnvSpec(
            name=name,
            action_cardinality=num_suits,
            horizon=horizon,
            channel_cardinalities=(num_suits, NUM_REWARD_CODES),
            reward_channel=1,
        )
        super().__init__(spec, test_action_rule)

        self.k = int(k)
        self.num_suits = int(num_suits)
        self.num_decks = int(num_decks)
        self.reward_scale = 1.0 / (horizon - k)
        self.cards = np.zeros(horizon, dtype=np.int64)

    def _observe(self, t: int, reward: float) -> Observation:
        suit = int(self.cards[t]) if t < self.spec.horizon else 0
        return Observation(discrete=[suit, encode_reward_channel(self.name, reward)])

    def _reset(self) -> Observation:
        deal = np.repeat(np.arange(self.num_suits), CARDS_PER_SUIT * self.num_decks)
        self.np_random.shuffle(deal)
        self.cards = deal[: self.spec.horizon]
        return self._observe(0, 0.0)

    def _step(self, action: int) -> Tuple[Observation, float, bool]:
        t = self.t
        if t < self.k:
            reward = 0.0
        elif action == int(self.cards[t - self.k]):
            reward = self.reward_scale
        else:
            reward = -self.reward_scale
        return self._observe(t + 1, reward), reward, False


class AutoEncode(PartiallyObservableEnv):
    """
    WATCH phase (N steps): the card is shown, actions are ignored, reward 0.
    PLAY phase (N steps): a blank card with the play flag is shown and the
    action must name the cards in reverse order of presentation.

    Observation: (card or blank, phase flag, reward code)
    Reward: +1/N correct, -1/N incorrect during PLAY
    """

    def __init__(
        self,
        num_cards: int = 8,
        num_suits: int = 4,
        name: str = "autoencode",
        test_action_rule: str = "designed",
    ):
        if num_cards < 1:
            raise ValueError(f"num_cards must be >= 1, got {num_cards}")
        spec = EnvSpec(
            name=name,
            action_cardinality=num_suits,
            horizon=2 * num_cards,
            channel_cardinalities=(num_suits + 1, 2, NUM_REWARD_CODES),
            reward_channel=2,
        )
        super().__init__(spec, test_action_rule)

        self.num_cards = int(num_cards)
        self.num_suits = int(num_suits)
        self.blank = self.num_suits
        self.reward_scale = 1.0 / num_cards
        self.cards = np.zeros(num_cards, dtype=np.int64)

    def _observe(self, t: int, reward: float) -> Observation:
        code = encode_reward_channel(self.name, reward)
        if t < self.num_cards:
            return Observation(discrete=[int(self.cards[t]), 0, code])
        return Observation(discrete=[self.blank, 1, code])

    def _reset(self) -> Observation:
        self.cards = self.np_random.integers(0, self.num_suits, size=self.num_cards)
        return self._observe(0, 0.0)

    def _step(self, action: int) -> Tuple[Observation, float, bool]:
        t = self.t
        if t < self.num_cards:
            reward = 0.0
        else:
            target = int(self.cards[2 * self.num_cards - 1 - t])
            reward = self.reward_scale if action == target else -self.reward_scale
        return self._observe(t + 1, reward), reward, False


def cards_match(card_a: int, card_b: int, rule: str) -> bool:
    """Card ids are suit * 13 + rank; suits 0-1 are one color, 2-3 the other"""
    same_rank = card_a % CARDS_PER_SUIT == card_b % CARDS_PER_SUIT
    same_color = (card_a // CARDS_PER_SUIT) // 2 == (card_b // CARDS_PER_SUIT) // 2
    if rule == "rank":
        return same_rank
    if rule == "color":
        return same_color
    return same_rank or same_color


class Concentration(PartiallyObservableEnv):
    """
    Cards of num_decks decks lie face-down, one per position. Actions flip a
    position; every second flip resolves a pair.

    Observation: one channel per position, 0 face-down, 1 + card id when face-up.
    A pending first flip stays visible; an unmatched pair is visible for the
    observation right after the second flip, then turns face-down.

    Reward: +2/P for a match of two unmatched cards (perfect play totals 1),
    mismatch_penalty for a mismatch, flipping an already-matched card, or
    flipping the pending card again.
    """

    def __init__(
        self,
        num_decks: int = 1,
        horizon: Optional[int] = None,
        match_rule: str = "rank_or_color",
        mismatch_penalty: Optional[float] = None,
        name: str = "concentration",
        test_action_rule: str = "designed",
    ):
        if match_rule not in MATCH_RULES:
            raise ValueError(f"Unknown match_rule '{match_rule}', use one of {MATCH_RULES}")
        num_positions = num_decks * CARDS_PER_DECK
        horizon = 2 * num_positions if horizon is None else int(horizon)
        spec = EnvSpec(
            name=name,
            action_cardinality=num_positions,
            horizon=horizon,
            channel_cardinalities=(CARDS_PER_DECK + 1,) * num_positions,
        )
        super().__init__(spec, test_action_rule)

        self.num_positions = num_positions
        self.match_rule = match_rule
        self.match_reward = 2.0 / num_positions
        self.mismatch_penalty = -1.0 / horizon if mismatch_penalty is None else float(mismatch_penalty)

        self.layout = np.zeros(num_positions, dtype=np.int64)
        self.matched = np.zeros(num_positions, dtype=bool)
        self.flipped_before = np.zeros(num_positions, dtype=bool)
        self.pending: Optional[int] = None

    def _observe(self, revealed: List[int]) -> Observation:
        visible = self.matched.copy()
        visible[revealed] = True
        return Observation(discrete=np.where(visible, self.layout + 1, 0))

    def _reset(self) -> Observation:
        self.layout = self.np_random.permutation(np.tile(np.arange(CARDS_PER_DECK), self.num_positions // CARDS_PER_DECK))
        self.matched[:] = False
        self.flipped_before[:] = False
        self.pending = None
        return self._observe([])

    def _step(self, action: int) -> Tuple[Observation, float, bool]:
        self.flipped_before[action] = True

        if self.pending is None:
            if self.matched[action]:
                return self._observe([]), self.mismatch_penalty, False
            self.pending = action
            return self._observe([action]), 0.0, False

        first, self.pending = self.pending, None
        if action == first or self.matched[action]:
            return self._observe([]), self.mismatch_penalty, False

        if cards_match(int(self.layout[first]), int(self.layout[action]), self.match_rule):
            self.matched[[first, action]] = True
            return self._observe([]), self.match_reward, bool(self.matched.all())

        return self._observe([first, action]), self.mismatch_penalty, False

    def _designed_test_action(self) -> int:
        return self._choose_from(np.flatnonzero(self.flipped_before).tolist())
