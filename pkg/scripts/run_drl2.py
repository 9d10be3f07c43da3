"""
Run one training job

Examples:
    python scripts/run_drl2.py --env gridworld --mode drl2 --config configs/gridworld.yaml --seed 0 --out runs
    python scripts/run_drl2.py --config configs/repeat_previous_probe.yaml --seed 1 --out runs

Command-line flags override values from the config file. The log level comes
from --log-level, else DRL2_LOG_LEVEL (a .env file is honored), else INFO.
"""

import argparse
import os
import sys
from pathlib import Path

# Add src to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from dotenv import load_dotenv
from loguru import logger

from src.training.config import Mode, RunConfig
from src.training.runner import run


def build_config(args) -> RunConfig:
    overrides = {
        "env": args.env,
        "mode": args.mode,
        "seed": args.seed,
        "total_steps": args.steps,
        "backbone": args.backbone,
        "num_workers": args.workers,
        "device": args.device,
    }
    if args.config:
        return RunConfig.from_yaml(args.config, **overrides)
    return RunConfig().with_overrides(**overrides)


def main():
    load_dotenv()

    parser = argparse.ArgumentParser(description="Decoupled PSR representation learning + SAC run")
    parser.add_argument("--env", type=str, default=None,
                        help="Environment or preset name (e.g. gridworld, battleship_medium)")
    parser.add_argument("--mode", type=str, default=None, choices=[m.value for m in Mode],
                        help="Training mode")
    parser.add_argument("--config", type=str, default=None,
                        help="Flat YAML config file")
    parser.add_argument("--seed", type=int, default=None,
                        help="Run seed")
    parser.add_argument("--steps", type=int, default=None,
                        help="Environment-step budget")
    parser.add_argument("--backbone", type=str, default=None, choices=["transformer", "gru", "stateless"],
                        help="History summarizer")
    parser.add_argument("--workers", type=int, default=None,
                        help="Rollout worker threads")
    parser.add_argument("--device", type=str, default=None,
                        help="Torch device")
    parser.add_argument("--out", type=str, default="runs",
                        help="Parent directory of run directories")
    parser.add_argument("--log-level", type=str, default=None,
                        help="stderr log level (default: $DRL2_LOG_LEVEL or INFO)")

    args = parser.parse_args()

    logger.remove()
    logger.add(sys.stderr, level=(args.log_level or os.getenv("DRL2_LOG_LEVEL", "INFO")).upper())

    try:
        config = build_config(args)
        config.validate()
        run_dir = run(config, args.out)
        logger.success(f"Outputs written to {run_dir}")
    except KeyboardInterrupt:
        logger.info("Run interrupted by user")
    except Exception as e:
        logger.exception(f"Run failed: {e}")
        raise


if __name__ == "__main__":
    main()
