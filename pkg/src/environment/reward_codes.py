"""
Reward Discretization

Rewards are folded into the observation as a discrete channel so that the
whole prediction target can be scored with cross-entropy:

- sign scheme (RepeatPrevious, AutoEncode): 0 zero, 1 positive, 2 negative
- minesweeper scheme: 0 positive, 1 mine hit, 2 repeated tile
- no reward channel (Battleship, GridWorld, Delayed Catch, Dark Key-to-Door,
  Concentration): the observation already carries the outcome

The sign code is also what every history token uses for the previous reward.
"""

from typing import Dict, Optional

MINE_PENALTY = -1.0

NUM_REWARD_CODES = 3

REWARD_CODE_SCHEMES: Dict[str, Optional[str]] = {
    "repeat_previous": "sign",
    "autoencode": "sign",
    "minesweeper": "minesweeper",
    "battleship": None,
    "concentration": None,
    "gridworld": None,
    "delayed_catch": None,
    "dark_key_to_door": None,
}


def env_family(env_name: str) -> str:
    """Strip a difficulty suffix: 'battleship_hard' -> 'battleship'"""
    for family in sorted(REWARD_CODE_SCHEMES, key=len, reverse=True):
        if env_name == family or env_name.startswith(family + "_"):
            return family
    raise ValueError(f"Unknown environment '{env_name}'")


def sign_code(reward: float) -> int:
    if reward > 0:
        return 1
    if reward < 0:
        return 2
    return 0


def encode_reward_channel(env_name: str, reward: float) -> Optional[int]:
    """
    Encode a scalar reward into the environment's reward-code channel

    Args:
        env_name: Environment or preset name
        reward: Scalar reward of the last step

    Returns:
        Channel symbol, or None if the environment has no reward channel
    """
    scheme = REWARD_CODE_SCHEMES[env_family(env_name)]
    if scheme is None:
        return None
    if scheme == "sign":
        return sign_code(reward)

    # minesweeper
    if reward <= MINE_PENALTY:
        return 1
    if reward < 0:
        return 2
    return 0
