"""Reporting module - run loading, aggregation, correlation and figures"""

from .aggregate import aggregate
from .correlation import CorrelationReport, correlation_report, spearman
from .metrics_frame import MetricsFrame, load_run, load_runs
from .plots import REPORT_KINDS, emit_plots

__all__ = [
    "aggregate",
    "CorrelationReport",
    "correlation_report",
    "spearman",
    "MetricsFrame",
    "load_run",
    "load_runs",
    "REPORT_KINDS",
    "emit_plots",
]
