import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from mazebdd.metrics import (
    COVERAGE_HEADER,
    METRICS_HEADER,
    CoverageMap,
    EmptySeries,
    EpisodeRecord,
    SampleTooSmall,
    confidence_interval,
    format_coverage_csv,
    format_metrics_csv,
    moving_average,
    regularized_incomplete_beta,
    t_critical,
    t_sf_two_sided,
    welch_t_test,
    write_coverage_csv,
    write_metrics_csv,
)

# Frozen reference values computed once with an independent statistics
# library; tolerances here are far looser than the observed agreement.
WELCH_CASES = [
    ([2.1, 2.5, 2.3, 2.7, 2.4], [1.9, 2.0, 1.8, 2.2],
     3.2319936776748346, 6.998645445309854, 0.014415738522405267),
    ([10.0, 10.1, 9.9, 10.05, 9.95, 10.0], [10.25, 9.8, 10.3, 9.7],
     -0.0801497527717851, 3.2142088658276444, 0.9408508639809638),
    ([0.5, 0.7, 0.9, 1.1, 1.3, 1.5, 1.7], [1.6, 1.8, 2.0, 2.2],
     -3.8430756913220914, 8.89473684210526, 0.004035549798099719),
    ([5.0, 6.0, 7.0], [5.5, 6.5],
     0.0, 2.8823529411764697, 1.0),
    ([float(x) for x in range(20)], [x + 0.5 for x in range(15)],
     1.138989594902999, 32.990940387751394, 0.2629106178940023),
]

BETA_CASES = [
    (0.3, 2.0, 3.0, 0.34829999999999994),
    (0.5, 0.5, 0.5, 0.5000000000000001),
    (0.9, 5.0, 1.5, 0.7761721343162159),
    (0.05, 10.0, 0.5, 1.761178743259099e-14),
    (0.731, 3.5, 0.5, 0.15253571147146855),
]

T_CRITICAL_CASES = [
    (9, 0.95, 2.2621571628540993),
    (4, 0.95, 2.7764451051977987),
    (19, 0.99, 2.860934606449914),
    (1, 0.95, 12.706204736432095),
    (30, 0.90, 1.6972608865939574),
]


def test_moving_average_frozen():
    assert moving_average([0.0, 1.0], 2) == [0.0, 0.5]
    assert moving_average([1.0, 2.0, 3.0, 4.0], 2) == [1.0, 1.5, 2.5, 3.5]
    assert moving_average([1.0, 2.0, 3.0], 10) == [1.0, 1.5, 2.0]


def test_moving_average_guards():
    with pytest.raises(EmptySeries):
        moving_average([], 3)
    with pytest.raises(ValueError):
        moving_average([1.0], 0)


@given(st.lists(st.floats(min_value=-1e6, max_value=1e6), min_size=1, max_size=50),
       st.integers(min_value=1, max_value=60))
def test_moving_average_stays_in_range(series, window):
    out = moving_average(series, window)
    assert len(out) == len(series)
    lo, hi = min(series), max(series)
    assert all(lo - 1e-9 <= v <= hi + 1e-9 for v in out)


@pytest.mark.parametrize("x,a,b,want", BETA_CASES)
def test_regularized_incomplete_beta_frozen(x, a, b, want):
    assert regularized_incomplete_beta(x, a, b) == pytest.approx(want, abs=1e-12)


def test_regularized_incomplete_beta_bounds():
    assert regularized_incomplete_beta(0.0, 2.0, 3.0) == 0.0
    assert regularized_incomplete_beta(1.0, 2.0, 3.0) == 1.0


@given(
    st.floats(min_value=0.0, max_value=1.0),
    st.floats(min_value=0.1, max_value=50.0),
    st.floats(min_value=0.1, max_value=50.0),
)
def test_regularized_incomplete_beta_in_unit_interval(x, a, b):
    assert 0.0 <= regularized_incomplete_beta(x, a, b) <= 1.0


@given(
    # keep x away from the endpoints: computing 1 - x there loses the digits
    # the identity depends on, for any implementation
    st.floats(min_value=1e-3, max_value=1.0 - 1e-3),
    st.floats(min_value=0.1, max_value=50.0),
    st.floats(min_value=0.1, max_value=50.0),
)
def test_regularized_incomplete_beta_reflection(x, a, b):
    # ties the two continued-fraction branches together
    left = regularized_incomplete_beta(x, a, b)
    right = regularized_incomplete_beta(1.0 - x, b, a)
    assert left + right == pytest.approx(1.0, abs=1e-9)


@pytest.mark.parametrize("a,b,t,df,p", WELCH_CASES)
def test_welch_frozen_values(a, b, t, df, p):
    result = welch_t_test(a, b)
    assert not result.degenerate
    assert result.t == pytest.approx(t, abs=1e-6)
    assert result.df == pytest.approx(df, abs=1e-6)
    assert result.p_two_sided == pytest.approx(p, abs=1e-4)


def test_welch_sample_too_small():
    with pytest.raises(SampleTooSmall):
        welch_t_test([1.0], [1.0, 2.0])
    with pytest.raises(SampleTooSmall):
        welch_t_test([1.0, 2.0], [3.0])


def test_welch_degenerate_flag():
    same = welch_t_test([2.0, 2.0, 2.0], [2.0, 2.0])
    assert same.degenerate
    assert same.t == 0.0
    assert same.p_two_sided == 1.0
    apart = welch_t_test([3.0, 3.0], [1.0, 1.0, 1.0])
    assert apart.degenerate
    assert apart.t == math.inf
    assert apart.p_two_sided == 0.0
    assert welch_t_test([1.0, 1.0], [3.0, 3.0]).t == -math.inf


@given(
    st.lists(st.floats(min_value=-100, max_value=100), min_size=2, max_size=20),
    st.lists(st.floats(min_value=-100, max_value=100), min_size=2, max_size=20),
)
def test_welch_symmetry_and_bounds(a, b):
    r1 = welch_t_test(a, b)
    r2 = welch_t_test(b, a)
    assert 0.0 <= r1.p_two_sided <= 1.0
    assert r1.t == pytest.approx(-r2.t, abs=1e-9, nan_ok=False)
    assert r1.p_two_sided == pytest.approx(r2.p_two_sided, abs=1e-9)
    if not r1.degenerate:
        assert min(len(a), len(b)) - 1 <= r1.df <= len(a) + len(b) - 2 + 1e-9


@pytest.mark.parametrize("df,level,want", T_CRITICAL_CASES)
def test_t_critical_frozen(df, level, want):
    assert t_critical(float(df), level) == pytest.approx(want, abs=1e-9)


def test_t_critical_guards():
    with pytest.raises(ValueError):
        t_critical(5.0, 0.0)
    with pytest.raises(ValueError):
        t_critical(5.0, 1.0)
    with pytest.raises(ValueError):
        t_sf_two_sided(1.0, 0.0)


def test_confidence_interval_frozen():
    lo, hi = confidence_interval([3.2, 3.5, 3.1, 3.8, 3.4, 3.6, 3.3], 0.95)
    assert lo == pytest.approx(3.1913705710262663, abs=1e-9)
    assert hi == pytest.approx(3.637200857545163, abs=1e-9)


def test_confidence_interval_edge_cases():
    assert confidence_interval([5.0, 5.0, 5.0], 0.95) == (5.0, 5.0)
    with pytest.raises(SampleTooSmall):
        confidence_interval([1.0], 0.9)
    with pytest.raises(ValueError):
        confidence_interval([1.0, 2.0], 1.5)


@given(st.lists(st.floats(min_value=-50, max_value=50), min_size=2, max_size=15))
def test_confidence_interval_contains_mean(sample):
    lo, hi = confidence_interval(sample, 0.9)
    mean = sum(sample) / len(sample)
    assert lo <= mean + 1e-9
    assert hi >= mean - 1e-9


def _record(i, success=True):
    return EpisodeRecord(
        episode=i,
        total_reward=11.75 if success else -1.3,
        steps=5,
        success=success,
        backtracks_used=0,
        defects_hit=1,
        cumulative_unique_pages=7,
        epsilon=0.42,
    )


def test_metrics_csv_format_exact():
    text = format_metrics_csv([_record(0), _record(1, success=False)])
    assert text == (
        METRICS_HEADER + "\n"
        "0,11.750000,5,1,0,1,7,0.420000\n"
        "1,-1.300000,5,0,0,1,7,0.420000\n"
    )
    assert "\r" not in text


def test_coverage_csv_format_exact():
    coverage = CoverageMap()
    coverage.record("a", 3)
    coverage.record("c")
    text = format_coverage_csv(coverage, ["a", "b", "c"])
    assert text == COVERAGE_HEADER + "\na,3\nb,0\nc,1\n"
    assert coverage.total() == 4
    assert len(coverage) == 2


def test_csv_writers_round_trip(tmp_path):
    metrics_path = tmp_path / "metrics.csv"
    coverage_path = tmp_path / "coverage.csv"
    write_metrics_csv([_record(0)], metrics_path)
    coverage = CoverageMap()
    coverage.record("a")
    write_coverage_csv(coverage, coverage_path, ["a"])
    assert metrics_path.read_bytes() == format_metrics_csv([_record(0)]).encode()
    assert coverage_path.read_bytes() == format_coverage_csv(coverage, ["a"]).encode()
