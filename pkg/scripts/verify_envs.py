"""
Monte-Carlo environment checks

Plays the benchmark environments with scripted or uniform policies and
compares the observed statistics with their analytic values.

Examples:
    python scripts/verify_envs.py
    python scripts/verify_envs.py --episodes 20000 --only battleship gridworld
"""

import argparse
import sys
from pathlib import Path
from typing import Callable, Dict, Tuple

# Add src to path
sys.path.insert(0, str(Path(__file__).parent.parent))

import numpy as np
from loguru import logger
from tqdm import tqdm

from src.environment import make_env


def play(env, seed: int, policy: Callable) -> Tuple[float, list]:
    """Run one episode, return (total reward, per-step rewards)"""
    env.reset(seed)
    rewards = []
    while not env.done:
        rewards.append(env.step(policy(env)).reward)
    return float(sum(rewards)), rewards


def check_battleship(episodes: int, seed: int) -> Dict[str, Tuple[float, float, float]]:
    env = make_env("battleship_medium")
    rng = np.random.default_rng(seed)

    perfect = []
    for i in range(min(episodes, 1000)):
        env.reset(seed + i)
        targets = iter(np.flatnonzero(env.ships).tolist())
        total = 0.0
        while not env.done:
            total += env.step(next(targets)).reward
        perfect.append(total)

    random_totals = []
    for i in tqdm(range(episodes), desc="battleship", leave=False):
        order = iter(rng.permutation(env.num_cells).tolist())
        total, _ = play(env, seed + i, lambda e: next(order))
        random_totals.append(total)

    return {
        "perfect-play max |total - 1|": (float(np.max(np.abs(np.array(perfect) - 1.0))), 0.0, 1e-9),
        "random-without-replacement total": (float(np.mean(random_totals)), 0.0, 0.02),
    }


def check_gridworld(episodes: int, seed: int) -> Dict[str, Tuple[float, float, float]]:
    env = make_env("gridworld")
    agree, steps = 0, 0
    for i in tqdm(range(episodes), desc="gridworld", leave=False):
        env.reset(seed + i)
        while not env.done:
            result = env.step(env.sample_test_action())
            agree += int(result.observation.discrete[2] == int(env.last_indicator_truth))
            steps += 1
    return {"indicator accuracy": (agree / steps, env.indicator_accuracy, 0.01)}


def check_autoencode(episodes: int, seed: int) -> Dict[str, Tuple[float, float, float]]:
    env = make_env("autoencode_easy")
    totals = [play(env, seed + i, lambda e: e.sample_test_action())[0]
              for i in tqdm(range(episodes), desc="autoencode", leave=False)]
    outside = float(np.mean((np.array(totals) < -1.0 - 1e-9) | (np.array(totals) > 1.0 + 1e-9)))
    return {"share of returns outside [-1, 1]": (outside, 0.0, 0.0)}


def check_dark_key_to_door(episodes: int, seed: int) -> Dict[str, Tuple[float, float, float]]:
    env = make_env("dark_key_to_door")
    bad_values, bad_order = 0, 0
    for i in tqdm(range(episodes), desc="dark_key_to_door", leave=False):
        total, rewards = play(env, seed + i, lambda e: e.sample_test_action())
        if round(total) not in (0, 1, 2) or abs(total - round(total)) > 1e-9:
            bad_values += 1
        # the door reward ends the episode and requires the key
        if round(total) == 2 and rewards[-1] != 1.0:
            bad_order += 1
        if round(total) == 1 and env.done and env.t < env.spec.horizon:
            bad_order += 1
    return {
        "returns outside {0, 1, 2}": (float(bad_values), 0.0, 0.0),
        "key/door ordering violations": (float(bad_order), 0.0, 0.0),
    }


def check_repeat_previous(episodes: int, seed: int) -> Dict[str, Tuple[float, float, float]]:
    env = make_env("repeat_previous", k=2, num_suits=4, horizon=32)
    totals = [play(env, seed + i, lambda e: e.sample_test_action())[0]
              for i in tqdm(range(episodes), desc="repeat_previous", leave=False)]
    # correct with probability 1/4 on each of the H-k scored steps
    return {"uniform-policy return": (float(np.mean(totals)), -0.5, 0.01)}


CHECKS = {
    "battleship": check_battleship,
    "gridworld": check_gridworld,
    "autoencode": check_autoencode,
    "dark_key_to_door": check_dark_key_to_door,
    "repeat_previous": check_repeat_previous,
}


def main():
    parser = argparse.ArgumentParser(description="Verify environment reward schemes by simulation")
    parser.add_argument("--episodes", type=int, default=100000,
                        help="Episodes per check")
    parser.add_argument("--seed", type=int, default=0,
                        help="First episode seed")
    parser.add_argument("--only", nargs="+", default=None, choices=list(CHECKS),
                        help="Subset of checks")
    args = parser.parse_args()

    logger.remove()
    logger.add(sys.stderr, level="WARNING")

    print("=" * 70)
    print("ENVIRONMENT VERIFICATION")
    print("=" * 70)

    failures = 0
    for name in args.only or CHECKS:
        for label, (observed, expected, tolerance) in CHECKS[name](args.episodes, args.seed).items():
            ok = abs(observed - expected) <= tolerance
            failures += int(not ok)
            status = "PASS" if ok else "FAIL"
            print(f"  [{status}] {name}: {label} = {observed:.6f} (expected {expected} ± {tolerance})")

    print("=" * 70)
    if failures:
        print(f"{failures} check(s) failed")
        sys.exit(1)
    print("All checks passed")


if __name__ == "__main__":
    main()
