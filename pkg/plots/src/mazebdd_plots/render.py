"""The four run-report figures, rendered headlessly to PNG files."""

from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .csvdata import CoverageTable, MetricsTable, read_coverage, read_metrics, trailing_mean

_FIGSIZE = (8.0, 4.5)
_DPI = 100


@dataclass(frozen=True)
class PlotJob:
    metrics_path: str
    coverage_path: str
    out_dir: str
    window: int = 50

    def __post_init__(self):
        if self.window < 1:
            raise ValueError(f"window must be at least 1, got {self.window}")


def _save(fig, path: Path) -> Path:
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
    return path


def learning_curve(metrics: MetricsTable, window: int, path: Path) -> Path:
    """Per-episode total reward with a trailing-mean overlay."""
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    ax.plot(metrics.episode, metrics.total_reward, color="#9ecae1", linewidth=0.8,
            label="episode reward")
    ax.plot(metrics.episode, trailing_mean(metrics.total_reward, window),
            color="#08519c", linewidth=1.8, label=f"mean over last {window}")
    ax.set_xlabel("episode")
    ax.set_ylabel("total reward")
    ax.set_title("Learning curve")
    ax.legend(loc="lower right")
    ax.grid(alpha=0.3)
    return _save(fig, path)


def success_rate(metrics: MetricsTable, window: int, path: Path) -> Path:
    """Trailing success frequency per episode."""
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    ax.plot(metrics.episode, trailing_mean(metrics.success, window),
            color="#006d2c", linewidth=1.8)
    ax.set_xlabel("episode")
    ax.set_ylabel(f"success rate (window {window})")
    ax.set_ylim(-0.02, 1.02)
    ax.set_title("Success rate")
    ax.grid(alpha=0.3)
    return _save(fig, path)


def coverage_heatmap(coverage: CoverageTable, path: Path) -> Path:
    """Single-column heatmap, most-visited page on top, counts in the cells.

    The run exports carry no page geometry, so a sorted column is the honest
    layout: position encodes rank, color and label encode the count.
    """
    ranked = coverage.sorted_by_visits()
    counts = [[visits] for _, visits in ranked]
    height = max(2.0, 0.45 * len(ranked) + 1.2)
    fig, ax = plt.subplots(figsize=(5.0, height))
    image = ax.imshow(counts, cmap="YlOrRd", aspect="auto")
    ax.set_yticks(range(len(ranked)), [page for page, _ in ranked])
    ax.set_xticks([])
    peak = max((v for _, v in ranked), default=0)
    for row, (_, visits) in enumerate(ranked):
        dark = peak and visits > 0.6 * peak
        ax.text(0, row, str(visits), ha="center", va="center",
                color="white" if dark else "black")
    ax.set_title("Page visits")
    fig.colorbar(image, ax=ax, label="visits")
    fig.tight_layout()
    return _save(fig, path)


def backtrack_frequency(metrics: MetricsTable, window: int, path: Path) -> Path:
    """Backtracks per episode as bars, with the trailing frequency on top."""
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    ax.bar(metrics.episode, metrics.backtracks_used, color="#cb181d", width=1.0,
           label="backtracks in episode")
    ax.plot(metrics.episode, trailing_mean(metrics.backtracks_used, window),
            color="#67000d", linewidth=1.8, label=f"rate over last {window}")
    ax.set_xlabel("episode")
    ax.set_ylabel("backtracks")
    ax.set_title("Backtracking frequency")
    ax.legend(loc="upper right")
    ax.grid(alpha=0.3)
    return _save(fig, path)


def render_all(job: PlotJob) -> list[Path]:
    """Read both CSVs and write the four figures into ``job.out_dir``.

    Inputs are never modified; existing outputs are overwritten in place.
    Returns the four paths in a fixed order.
    """
    metrics = read_metrics(job.metrics_path)
    coverage = read_coverage(job.coverage_path)
    out = Path(job.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return [
        learning_curve(metrics, job.window, out / "learning_curve.png"),
        success_rate(metrics, job.window, out / "success_rate.png"),
        coverage_heatmap(coverage, out / "coverage_heatmap.png"),
        backtrack_frequency(metrics, job.window, out / "backtrack_frequency.png"),
    ]
