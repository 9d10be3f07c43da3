"""
Build reports from run directories

Examples:
    python scripts/report.py --runs "runs/gridworld_*" --out reports/gridworld --kind returns
    python scripts/report.py --runs "runs/repeat_previous_probe_*" --out reports/probe --kind probe
"""

import argparse
import os
import sys
from pathlib import Path

# Add src to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from dotenv import load_dotenv
from loguru import logger

from src.reporting import REPORT_KINDS, emit_plots, load_runs


def main():
    load_dotenv()

    parser = argparse.ArgumentParser(description="Aggregate runs into figures and tables")
    parser.add_argument("--runs", type=str, required=True,
                        help="Glob pattern of run directories")
    parser.add_argument("--out", type=str, required=True,
                        help="Output directory")
    parser.add_argument("--kind", type=str, default="returns", choices=list(REPORT_KINDS) + ["all"],
                        help="Report kind")
    parser.add_argument("--log-level", type=str, default=None,
                        help="stderr log level (default: $DRL2_LOG_LEVEL or INFO)")

    args = parser.parse_args()

    logger.remove()
    logger.add(sys.stderr, level=(args.log_level or os.getenv("DRL2_LOG_LEVEL", "INFO")).upper())

    frames = load_runs(args.runs)
    if not frames:
        sys.exit(1)
    logger.info(f"Loaded {len(frames)} runs")

    kinds = REPORT_KINDS if args.kind == "all" else (args.kind,)
    for kind in kinds:
        for path in emit_plots(frames, args.out, kind):
            print(path)


if __name__ == "__main__":
    main()
