"""
Batch experiments

Launches run_drl2.py once per (seed, mode, ratio) combination in a process
pool and writes one log per job under <out>/logs.

Examples:
    # GridWorld: DRL2 vs stateless baseline over 3 seeds
    python scripts/batch_experiments.py --config configs/gridworld.yaml --modes drl2 stateless --seeds 0 1 2

    # Delayed Catch update-ratio sweep
    python scripts/batch_experiments.py --config configs/delayed_catch.yaml --ratios 0.03:1 1:1 10:1
"""

import argparse
import itertools
import os
import subprocess
import sys
import tempfile
from multiprocessing import Pool
from pathlib import Path
from typing import List, Optional, Tuple

import yaml
from dotenv import load_dotenv
from loguru import logger

ROOT = Path(__file__).parent.parent
SCRIPT = ROOT / "scripts" / "run_drl2.py"


def parse_ratio(text: str) -> Tuple[float, float]:
    psr, rl = text.split(":")
    return float(psr), float(rl)


def ratio_config(config_path: str, ratio: Optional[str], scratch: Path) -> str:
    """Config file with t_psr / t_rl replaced by the ratio, scaled to the file's T_rl"""
    if ratio is None:
        return config_path
    with open(config_path, "r") as f:
        values = yaml.safe_load(f) or {}
    psr, rl = parse_ratio(ratio)
    t_rl = float(values.get("t_rl", 500))
    values["t_psr"] = t_rl * psr / rl
    values["t_rl"] = t_rl
    path = scratch / f"{Path(config_path).stem}_ratio_{psr:g}_{rl:g}.yaml"
    with open(path, "w") as f:
        yaml.safe_dump(values, f, sort_keys=True)
    return str(path)


def task_launcher(job) -> int:
    config_path, mode, seed, steps, out, log_path = job
    cmd = [sys.executable, str(SCRIPT), "--config", config_path, "--mode", mode, "--seed", str(seed), "--out", out]
    if steps is not None:
        cmd += ["--steps", str(steps)]
    with open(log_path, "w") as log:
        logger.info(f"Launching: {' '.join(cmd)}")
        return subprocess.call(cmd, stdout=log, stderr=subprocess.STDOUT, env=os.environ.copy())


def build_jobs(args, scratch: Path) -> List[tuple]:
    log_dir = Path(args.out) / "logs"
    log_dir.mkdir(parents=True, exist_ok=True)
    jobs = []
    ratios = args.ratios or [None]
    for ratio, mode, seed in itertools.product(ratios, args.modes, args.seeds):
        config_path = ratio_config(args.config, ratio, scratch)
        suffix = f"{Path(args.config).stem}_{mode}_seed{seed}" + (f"_ratio{ratio.replace(':', '-')}" if ratio else "")
        jobs.append((config_path, mode, seed, args.steps, args.out, str(log_dir / f"{suffix}.log")))
    return jobs


def main():
    load_dotenv()

    parser = argparse.ArgumentParser(description="Run seed / mode / update-ratio batches")
    parser.add_argument("--config", type=str, required=True, help="Base config file")
    parser.add_argument("--modes", nargs="+", default=["drl2"], help="Training modes")
    parser.add_argument("--seeds", nargs="+", type=int, default=[0, 1, 2], help="Seeds")
    parser.add_argument("--ratios", nargs="+", default=None, help="PSR:RL update ratios, e.g. 0.03:1")
    parser.add_argument("--steps", type=int, default=None, help="Environment-step budget override")
    parser.add_argument("--out", type=str, default="runs", help="Parent directory of run directories")
    parser.add_argument("--processes", type=int, default=3, help="Parallel jobs")

    args = parser.parse_args()

    with tempfile.TemporaryDirectory() as scratch:
        jobs = build_jobs(args, Path(scratch))
        logger.info(f"{len(jobs)} jobs on {args.processes} processes")
        try:
            with Pool(args.processes) as pool:
                codes = pool.map(task_launcher, jobs)
        except KeyboardInterrupt:
            logger.info("Batch interrupted by user")
            return

    failed = [job[-1] for job, code in zip(jobs, codes) if code != 0]
    if failed:
        for log_path in failed:
            logger.error(f"Job failed, see {log_path}")
        sys.exit(1)
    logger.success(f"All {len(jobs)} jobs finished")


if __name__ == "__main__":
    main()
