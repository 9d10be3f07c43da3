"""
Environment registry

Environments are selected by string name. Base names ('repeat_previous',
'battleship', ...) take constructor keyword overrides; difficulty presets
('battleship_hard', ...) carry fixed arguments that overrides may still change.
"""

from typing import Any, Callable, Dict, List, Tuple

from loguru import logger

from .base import PartiallyObservableEnv
from .boards import Battleship, Minesweeper
from .cards import AutoEncode, Concentration, RepeatPrevious
from .credit import DarkKeyToDoor, DelayedCatch
from .gridworld import GridWorld

ENV_CLASSES: Dict[str, Callable[..., PartiallyObservableEnv]] = {
    "repeat_previous": RepeatPrevious,
    "autoencode": AutoEncode,
    "concentration": Concentration,
    "battleship": Battleship,
    "minesweeper": Minesweeper,
    "gridworld": GridWorld,
    "delayed_catch": DelayedCatch,
    "dark_key_to_door": DarkKeyToDoor,
}

# preset name -> (base name, constructor kwargs)
PRESETS: Dict[str, Tuple[str, Dict[str, Any]]] = {
    "repeat_previous_easy": ("repeat_previous", {"k": 4, "num_suits": 4, "num_decks": 1}),
    "repeat_previous_medium": ("repeat_previous", {"k": 32, "num_suits": 4, "num_decks": 2}),
    "repeat_previous_hard": ("repeat_previous", {"k": 64, "num_suits": 4, "num_decks": 3}),
    "autoencode_easy": ("autoencode", {"num_cards": 8}),
    "autoencode_medium": ("autoencode", {"num_cards": 16}),
    "autoencode_hard": ("autoencode", {"num_cards": 24}),
    "battleship_medium": ("battleship", {"board_size": 8, "ship_lengths": (2, 3, 4)}),
    "battleship_hard": ("battleship", {"board_size": 10, "ship_lengths": (2, 3, 4, 5)}),
    "minesweeper_medium": ("minesweeper", {"board_size": 6, "num_mines": 6}),
    "minesweeper_hard": ("minesweeper", {"board_size": 8, "num_mines": 10}),
    "concentration_easy": ("concentration", {"num_decks": 1}),
    "concentration_medium": ("concentration", {"num_decks": 2}),
    "concentration_hard": ("concentration", {"num_decks": 1, "match_rule": "rank"}),
}


def list_envs() -> List[str]:
    """All names accepted by make_env"""
    return sorted(list(ENV_CLASSES) + list(PRESETS))


def make_env(name: str, **kwargs) -> PartiallyObservableEnv:
    """
    Build an environment by name

    Args:
        name: Base environment name or difficulty preset
        **kwargs: Constructor overrides

    Returns:
        Environment instance (call reset(seed) before stepping)
    """
    if name in PRESETS:
        base, preset_kwargs = PRESETS[name]
        params = {**preset_kwargs, **kwargs}
    elif name in ENV_CLASSES:
        base, params = name, dict(kwargs)
    else:
        raise ValueError(f"Unknown environment '{name}', available: {', '.join(list_envs())}")

    params.setdefault("name", name)
    try:
        env = ENV_CLASSES[base](**params)
    except TypeError as e:
        raise ValueError(f"Bad arguments for environment '{name}': {e}") from e

    logger.debug(f"Environment created: {name} (H={env.spec.horizon}, A={env.spec.action_cardinality})")
    return env
