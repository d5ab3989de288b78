"""Strict readers for the training run's CSV exports.

The two files are contracts, not suggestions: headers must match exactly
(order included) so silently transposed columns can never plot as the wrong
series. This package deliberately reads only the CSV files and knows nothing
about the engine that wrote them.
"""

import csv
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

METRICS_COLUMNS = (
    "episode",
    "total_reward",
    "steps",
    "success",
    "backtracks_used",
    "defects_hit",
    "cumulative_unique_pages",
    "epsilon",
)
COVERAGE_COLUMNS = ("page_id", "visits")


class MissingColumn(ValueError):
    """The header does not match the expected columns in the expected order."""


class EmptyCsv(ValueError):
    """The file has no data rows (or no content at all)."""


@dataclass(frozen=True)
class MetricsTable:
    """Column-oriented view of metrics.csv, one entry per episode."""

    episode: tuple[int, ...]
    total_reward: tuple[float, ...]
    steps: tuple[int, ...]
    success: tuple[int, ...]
    backtracks_used: tuple[int, ...]
    defects_hit: tuple[int, ...]
    cumulative_unique_pages: tuple[int, ...]
    epsilon: tuple[float, ...]

    def __len__(self) -> int:
        return len(self.episode)


@dataclass(frozen=True)
class CoverageTable:
    """page id -> visit count, in file order."""

    pages: tuple[str, ...]
    visits: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.pages)

    def sorted_by_visits(self) -> list[tuple[str, int]]:
        """Pages ordered most-visited first; ties keep file order."""
        order = sorted(range(len(self.pages)), key=lambda i: (-self.visits[i], i))
        return [(self.pages[i], self.visits[i]) for i in order]


def _read_rows(path: str | Path, expected: tuple[str, ...]) -> list[list[str]]:
    with open(path, newline="", encoding="utf-8") as handle:
        rows = [row for row in csv.reader(handle) if row]
    if not rows:
        raise EmptyCsv(f"{path}: no content")
    header = rows[0]
    if header != list(expected):
        for position, want in enumerate(expected):
            got = header[position] if position < len(header) else "(nothing)"
            if got != want:
                raise MissingColumn(
                    f"{path}: expected column {want!r} at position {position}, got {got!r}"
                )
        raise MissingColumn(f"{path}: unexpected extra columns {header[len(expected):]!r}")
    if len(rows) == 1:
        raise EmptyCsv(f"{path}: header only, no data rows")
    width = len(expected)
    for line_no, row in enumerate(rows[1:], start=2):
        if len(row) != width:
            raise MissingColumn(f"{path}: line {line_no} has {len(row)} fields, expected {width}")
    return rows[1:]


def read_metrics(path: str | Path) -> MetricsTable:
    rows = _read_rows(path, METRICS_COLUMNS)
    return MetricsTable(
        episode=tuple(int(r[0]) for r in rows),
        total_reward=tuple(float(r[1]) for r in rows),
        steps=tuple(int(r[2]) for r in rows),
        success=tuple(int(r[3]) for r in rows),
        backtracks_used=tuple(int(r[4]) for r in rows),
        defects_hit=tuple(int(r[5]) for r in rows),
        cumulative_unique_pages=tuple(int(r[6]) for r in rows),
        epsilon=tuple(float(r[7]) for r in rows),
    )


def read_coverage(path: str | Path) -> CoverageTable:
    rows = _read_rows(path, COVERAGE_COLUMNS)
    return CoverageTable(
        pages=tuple(r[0] for r in rows),
        visits=tuple(int(r[1]) for r in rows),
    )


def sample_path(name: str) -> Path:
    """Path of a bundled sample CSV: ``metrics.csv`` or ``coverage.csv``."""
    path = Path(str(resources.files(__package__) / "samples" / name))
    if not path.exists():
        raise FileNotFoundError(f"no bundled sample named {name!r}")
    return path


def trailing_mean(series, window: int) -> list[float]:
    """Element i is the mean of the last min(i + 1, window) values."""
    if window < 1:
        raise ValueError(f"window must be at least 1, got {window}")
    out = []
    for i in range(len(series)):
        lo = max(0, i + 1 - window)
        chunk = series[lo : i + 1]
        out.append(sum(chunk) / len(chunk))
    return out
