"""Run metrics and the small statistics toolbox the reports need.

The t-distribution tail probabilities are computed in-house from the
regularized incomplete beta function (standard Lentz continued fraction,
1e-12 convergence threshold, 300-iteration cap) so the package stays
dependency-free; the test suite cross-checks the results against an
independent statistics library's pre-computed values.
"""

import math
from dataclasses import dataclass, field
from pathlib import Path
from statistics import fmean, variance
from typing import NamedTuple, Sequence

METRICS_HEADER = "episode,total_reward,steps,success,backtracks_used,defects_hit,cumulative_unique_pages,epsilon"
COVERAGE_HEADER = "page_id,visits"

_LENTZ_EPS = 1e-12
_LENTZ_MAX_ITERATIONS = 300
_TINY = 1e-300


class EmptySeries(ValueError):
    pass


class SampleTooSmall(ValueError):
    pass


@dataclass(frozen=True)
class EpisodeRecord:
    episode: int
    total_reward: float
    steps: int
    success: bool
    backtracks_used: int
    defects_hit: int
    cumulative_unique_pages: int
    epsilon: float


@dataclass
class CoverageMap:
    """How often each page was arrived at across a whole run."""

    visit_counts: dict[str, int] = field(default_factory=dict)

    def record(self, page_id: str, count: int = 1) -> None:
        self.visit_counts[page_id] = self.visit_counts.get(page_id, 0) + count

    def total(self) -> int:
        return sum(self.visit_counts.values())

    def __len__(self) -> int:
        return len(self.visit_counts)


def moving_average(series: Sequence[float], window: int) -> list[float]:
    """Trailing mean; element i averages the last min(i + 1, window) values."""
    if len(series) == 0:
        raise EmptySeries("moving_average needs at least one value")
    if window < 1:
        raise ValueError(f"window must be at least 1, got {window}")
    out = []
    for i in range(len(series)):
        lo = max(0, i + 1 - window)
        chunk = series[lo : i + 1]
        out.append(sum(chunk) / len(chunk))
    return out


def _betacf(a: float, b: float, x: float) -> float:
    """Continued fraction for the incomplete beta function (Lentz's method)."""
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _TINY:
        d = _TINY
    d = 1.0 / d
    h = d
    for m in range(1, _LENTZ_MAX_ITERATIONS + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _LENTZ_EPS:
            break
    return h


def regularized_incomplete_beta(x: float, a: float, b: float) -> float:
    """I_x(a, b) for x in [0, 1]."""
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    ln_front = (
        math.lgamma(a + b)
        - math.lgamma(a)
        - math.lgamma(b)
        + a * math.log(x)
        + b * math.log(1.0 - x)
    )
    front = math.exp(ln_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


def t_sf_two_sided(t: float, df: float) -> float:
    """P(|T| >= |t|) for Student's t with ``df`` degrees of freedom."""
    if df <= 0:
        raise ValueError(f"df must be positive, got {df}")
    x = df / (df + t * t)
    return regularized_incomplete_beta(x, df / 2.0, 0.5)


def t_critical(df: float, level: float, tolerance: float = 1e-10) -> float:
    """c such that P(|T| <= c) = level, found by bisection on the tail."""
    if not 0.0 < level < 1.0:
        raise ValueError(f"level must be in (0, 1), got {level}")
    tail = 1.0 - level
    lo, hi = 0.0, 1.0
    while t_sf_two_sided(hi, df) > tail:
        hi *= 2.0
        if hi > 1e12:
            break
    while hi - lo > tolerance:
        mid = (lo + hi) / 2.0
        if t_sf_two_sided(mid, df) > tail:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2.0


class TTestResult(NamedTuple):
    t: float
    df: float
    p_two_sided: float
    degenerate: bool = False


def welch_t_test(a: Sequence[float], b: Sequence[float]) -> TTestResult:
    """Welch's unequal-variance t-test with a two-sided p-value.

    Both samples need at least two values. When both variances are zero the
    result is flagged degenerate: p is 1 for equal means and 0 otherwise.
    """
    na, nb = len(a), len(b)
    if na < 2 or nb < 2:
        raise SampleTooSmall(f"need at least two values per sample, got {na} and {nb}")
    mean_a, mean_b = fmean(a), fmean(b)
    var_a, var_b = variance(a), variance(b)
    if var_a == 0.0 and var_b == 0.0:
        if mean_a == mean_b:
            return TTestResult(0.0, float(na + nb - 2), 1.0, degenerate=True)
        t = math.inf if mean_a > mean_b else -math.inf
        return TTestResult(t, float(na + nb - 2), 0.0, degenerate=True)
    qa, qb = var_a / na, var_b / nb
    t = (mean_a - mean_b) / math.sqrt(qa + qb)
    denominator = qa**2 / (na - 1) + qb**2 / (nb - 1)
    if denominator == 0.0:
        # squared variances underflowed; the Welch ratio is lost, use pooled df
        df = float(na + nb - 2)
    else:
        df = (qa + qb) ** 2 / denominator
    return TTestResult(t, df, t_sf_two_sided(t, df), degenerate=False)


def confidence_interval(sample: Sequence[float], level: float) -> tuple[float, float]:
    """Two-sided t confidence interval for the sample mean."""
    n = len(sample)
    if n < 2:
        raise SampleTooSmall(f"need at least two values, got {n}")
    if not 0.0 < level < 1.0:
        raise ValueError(f"level must be in (0, 1), got {level}")
    mean = fmean(sample)
    spread = math.sqrt(variance(sample))
    if spread == 0.0:
        return (mean, mean)
    half_width = t_critical(float(n - 1), level) * spread / math.sqrt(n)
    return (mean - half_width, mean + half_width)


def format_metrics_csv(records: Sequence[EpisodeRecord]) -> str:
    lines = [METRICS_HEADER]
    for r in records:
        lines.append(
            f"{r.episode},{r.total_reward:.6f},{r.steps},{int(r.success)},"
            f"{r.backtracks_used},{r.defects_hit},{r.cumulative_unique_pages},{r.epsilon:.6f}"
        )
    return "\n".join(lines) + "\n"


def format_coverage_csv(coverage: CoverageMap, page_order: Sequence[str]) -> str:
    lines = [COVERAGE_HEADER]
    for page_id in page_order:
        lines.append(f"{page_id},{coverage.visit_counts.get(page_id, 0)}")
    return "\n".join(lines) + "\n"


def write_metrics_csv(records: Sequence[EpisodeRecord], path: str | Path) -> None:
    Path(path).write_bytes(format_metrics_csv(records).encode("utf-8"))


def write_coverage_csv(coverage: CoverageMap, path: str | Path, page_order: Sequence[str]) -> None:
    Path(path).write_bytes(format_coverage_csv(coverage, page_order).encode("utf-8"))
