"""
Report figures

Every figure is written next to a CSV holding exactly the numbers it plots.

Kinds:
- returns: greedy evaluation return per (env, mode), mean +/- std over seeds
- burnin: validation prediction accuracy during burn-in per (env, backbone)
- probe: (PSR loss, final return) scatter with Spearman correlation per env
- ratio: one return panel per PSR:RL update ratio
- table: final return per (env, mode), CSV and Markdown only
"""

from pathlib import Path
from typing import Callable, Dict, List, Union

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import pandas as pd  # noqa: E402
import seaborn as sns  # noqa: E402
from loguru import logger  # noqa: E402

from .aggregate import aggregate  # noqa: E402
from .correlation import correlation_report  # noqa: E402
from .metrics_frame import MetricsFrame  # noqa: E402

REPORT_KINDS = ("returns", "burnin", "probe", "ratio", "table")


def _group(frames: List[MetricsFrame], key: Callable[[MetricsFrame], str]) -> Dict[str, List[MetricsFrame]]:
    groups: Dict[str, List[MetricsFrame]] = {}
    for frame in frames:
        groups.setdefault(key(frame), []).append(frame)
    return dict(sorted(groups.items()))


def _ratio_label(frame: MetricsFrame) -> str:
    return f"{frame.config.get('t_psr', '?')}:{frame.config.get('t_rl', '?')}"


def _write_csv(data: pd.DataFrame, path: Path) -> Path:
    try:
        data.to_csv(path, index=False)
    except OSError as e:
        logger.error(f"Failed to write {path}: {e}")
        raise
    return path


def _save(fig, path: Path) -> Path:
    try:
        fig.savefig(path, dpi=150, bbox_inches="tight")
    except OSError as e:
        logger.error(f"Failed to write {path}: {e}")
        raise
    finally:
        plt.close(fig)
    return path


def _bands(groups: Dict[str, List[MetricsFrame]], column: str) -> pd.DataFrame:
    """Aggregated bands of every group, stacked with a group column"""
    parts = []
    for name, members in groups.items():
        band = aggregate(members, column)
        if band.empty:
            logger.warning(f"Column '{column}' is empty for {name}; plot omitted")
            continue
        parts.append(band.assign(group=name))
    if not parts:
        return pd.DataFrame(columns=["group", "step", "mean", "std", "runs"])
    return pd.concat(parts, ignore_index=True)[["group", "step", "mean", "std", "runs"]]


def _plot_bands(ax, data: pd.DataFrame, ylabel: str):
    palette = sns.color_palette(n_colors=max(1, data["group"].nunique()))
    for color, (name, band) in zip(palette, data.groupby("group", sort=True)):
        ax.plot(band["step"], band["mean"], label=name, color=color)
        ax.fill_between(band["step"], band["mean"] - band["std"], band["mean"] + band["std"], color=color, alpha=0.2)
    ax.set_xlabel("step")
    ax.set_ylabel(ylabel)
    if len(data):
        ax.legend(fontsize=8)


def plot_returns(frames: List[MetricsFrame], out_dir: Path) -> List[Path]:
    groups = _group(frames, lambda f: f"{f.config.get('env', '?')}/{f.config.get('mode', '?')}")
    data = _bands(groups, "eval_return")
    if data.empty:
        return []
    fig, ax = plt.subplots(figsize=(7, 4))
    _plot_bands(ax, data, "eval return")
    return [_write_csv(data, out_dir / "returns.csv"), _save(fig, out_dir / "returns.png")]


def plot_burnin(frames: List[MetricsFrame], out_dir: Path) -> List[Path]:
    curves = []
    for frame in frames:
        table = frame.side_table("burnin")
        if table.empty:
            continue
        curves.append(MetricsFrame(frame.run_id, frame.config_hash, table, frame.config, frame.run_dir))
    groups = _group(curves, lambda f: f"{f.config.get('env', '?')}/{f.config.get('backbone', '?')}")
    data = _bands(groups, "accuracy")
    if data.empty:
        logger.warning("No burn-in curves found; plot omitted")
        return []
    fig, ax = plt.subplots(figsize=(7, 4))
    _plot_bands(ax, data, "prediction accuracy")
    ax.set_xlabel("PSR update")
    return [_write_csv(data, out_dir / "burnin.csv"), _save(fig, out_dir / "burnin.png")]


def plot_probe(frames: List[MetricsFrame], out_dir: Path) -> List[Path]:
    tables = []
    for frame in frames:
        table = frame.side_table("probe")
        if not table.empty:
            tables.append(table.assign(run_id=frame.run_id, env=frame.config.get("env", "?")))
    if not tables:
        logger.warning("No probe results found; plot omitted")
        return []

    data = pd.concat(tables, ignore_index=True)[["env", "run_id", "target", "psr_loss", "final_return"]]
    summary = []
    for env, points in data.groupby("env", sort=True):
        if len(points) < 3:
            logger.warning(f"{env}: {len(points)} probe points, correlation needs 3")
            continue
        report = correlation_report(points)
        summary.append({"env": env, **report.to_dict()})

    fig, ax = plt.subplots(figsize=(5, 4))
    sns.scatterplot(data=data, x="psr_loss", y="final_return", hue="env", ax=ax)
    ax.set_xlabel("PSR loss")
    ax.set_ylabel("final return")

    paths = [_write_csv(data, out_dir / "probe.csv")]
    if summary:
        paths.append(_write_csv(pd.DataFrame(summary), out_dir / "probe_correlation.csv"))
    paths.append(_save(fig, out_dir / "probe.png"))
    return paths


def plot_ratio(frames: List[MetricsFrame], out_dir: Path) -> List[Path]:
    by_ratio = _group(frames, _ratio_label)
    panels = []
    for ratio, members in by_ratio.items():
        groups = _group(members, lambda f: f"{f.config.get('env', '?')}/{f.config.get('mode', '?')}")
        band = _bands(groups, "eval_return")
        if not band.empty:
            panels.append(band.assign(ratio=ratio))
    if not panels:
        return []

    data = pd.concat(panels, ignore_index=True)[["ratio", "group", "step", "mean", "std", "runs"]]
    ratios = list(dict.fromkeys(data["ratio"]))
    fig, axes = plt.subplots(1, len(ratios), figsize=(4 * len(ratios), 3.5), sharey=True, squeeze=False)
    for ax, ratio in zip(axes[0], ratios):
        _plot_bands(ax, data[data["ratio"] == ratio], "eval return")
        ax.set_title(f"PSR:RL = {ratio}")
    return [_write_csv(data, out_dir / "ratio.csv"), _save(fig, out_dir / "ratio.png")]


def summary_table(frames: List[MetricsFrame], out_dir: Path) -> List[Path]:
    rows = []
    for frame in frames:
        returns = frame.column("eval_return")
        if returns.empty:
            logger.warning(f"{frame.run_id}: no evaluation returns; left out of the table")
            continue
        rows.append({
            "env": frame.config.get("env", "?"),
            "mode": frame.config.get("mode", "?"),
            "final_return": float(returns["eval_return"].iloc[-1]),
            "step": int(returns["step"].iloc[-1]),
        })
    if not rows:
        return []

    table = (
        pd.DataFrame(rows)
        .groupby(["env", "mode"], sort=True)
        .agg(mean=("final_return", "mean"), std=("final_return", lambda x: x.std(ddof=0)),
             runs=("final_return", "size"), step=("step", "max"))
        .reset_index()
    )
    lines = ["| env | mode | final return | runs | step |", "|---|---|---|---|---|"]
    lines += [f"| {r.env} | {r.mode} | {r.mean:.3f} ± {r.std:.3f} | {r.runs} | {r.step} |" for r in table.itertuples()]
    md_path = out_dir / "table.md"
    md_path.write_text("\n".join(lines) + "\n")
    return [_write_csv(table, out_dir / "table.csv"), md_path]


PLOTTERS: Dict[str, Callable[[List[MetricsFrame], Path], List[Path]]] = {
    "returns": plot_returns,
    "burnin": plot_burnin,
    "probe": plot_probe,
    "ratio": plot_ratio,
    "table": summary_table,
}


def emit_plots(frames: List[MetricsFrame], out_dir: Union[str, Path], kind: str = "returns") -> List[Path]:
    """
    Write one report kind

    Args:
        frames: Loaded runs (non-empty)
        out_dir: Output directory
        kind: One of REPORT_KINDS

    Returns:
        Written files
    """
    if kind not in PLOTTERS:
        raise ValueError(f"Unknown report kind '{kind}', use one of {REPORT_KINDS}")
    if not frames:
        raise ValueError("emit_plots needs at least one run")

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    sns.set_theme(style="whitegrid")

    paths = PLOTTERS[kind](frames, out_dir)
    logger.info(f"Report '{kind}': {len(paths)} files written to {out_dir}")
    return paths
