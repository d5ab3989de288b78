"""Figures for training-run CSV exports: learning curve, success rate,
coverage heatmap, and backtracking frequency."""

from .csvdata import (
    CoverageTable,
    EmptyCsv,
    MetricsTable,
    MissingColumn,
    read_coverage,
    read_metrics,
    sample_path,
    trailing_mean,
)
from .render import PlotJob, render_all

__version__ = "0.1.0"
