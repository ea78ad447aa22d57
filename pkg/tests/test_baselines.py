import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from eigencoint.baselines import (
    CriticalTable,
    bartlett_bandwidth,
    derive_stream,
    johansen_trace,
    sequential_unit_root,
    sim_trace_critical,
    trace_critical_table,
    unit_root_critical_table,
    unit_root_stat,
)
from eigencoint.errors import DegenerateComponent, InvalidSeries, SingularMoments

META = {"T": 100, "reps": 1000, "seed": 0, "statistic": "trace"}


def hand_table(dims, values, levels=(0.05,)):
    return CriticalTable(
        dims=tuple(dims),
        levels=tuple(levels),
        values=np.atleast_2d(np.asarray(values, dtype=float)),
        meta=dict(META),
    )


@pytest.fixture(scope="module")
def trace_table():
    return trace_critical_table(dims=(1, 2, 3), T=1000, reps=2000, seed=0)


@pytest.fixture(scope="module")
def ur_table():
    return unit_root_critical_table(1000, reps=2000, seed=0)


# ---------------------------------------------------------------------------
# CriticalTable

def test_value_lookup():
    table = hand_table((1, 2), [[3.0, 2.5], [11.0, 10.0]], levels=(0.05, 0.10))
    assert table.value(1, 0.05) == 3.0
    assert table.value(2, 0.10) == 10.0


def test_value_missing_dim():
    with pytest.raises(ValueError, match="no dimension 4"):
        hand_table((1,), [[3.0]]).value(4, 0.05)


def test_value_missing_level():
    with pytest.raises(ValueError, match="no level"):
        hand_table((1,), [[3.0]]).value(1, 0.01)


def test_merged_unions_dimensions():
    merged = hand_table((1, 3), [[3.0], [30.0]]).merged(hand_table((2,), [[15.0]]))
    assert merged.dims == (1, 2, 3)
    assert_array_equal(merged.values, [[3.0], [15.0], [30.0]])


def test_merged_overlap_prefers_other():
    merged = hand_table((1, 2), [[3.0], [15.0]]).merged(hand_table((2,), [[16.0]]))
    assert merged.dims == (1, 2)
    assert merged.value(2, 0.05) == 16.0


def test_merged_rejects_incompatible_tables():
    base = hand_table((1,), [[3.0]])
    other_levels = hand_table((2,), [[15.0, 12.0]], levels=(0.05, 0.10))
    with pytest.raises(ValueError, match="different levels or meta"):
        base.merged(other_levels)
    other_meta = CriticalTable(
        dims=(2,), levels=(0.05,), values=np.array([[15.0]]),
        meta=dict(META, seed=99),
    )
    with pytest.raises(ValueError, match="different levels or meta"):
        base.merged(other_meta)


def test_table_json_round_trip():
    table = hand_table((1, 2), [[3.0, 2.5], [11.0, 10.0]], levels=(0.05, 0.10))
    again = CriticalTable.from_json(table.to_json())
    assert again.dims == table.dims
    assert again.levels == table.levels
    assert again.meta == table.meta
    assert_array_equal(again.values, table.values)


# ---------------------------------------------------------------------------
# stream derivation

def test_derive_stream_is_keyed():
    a = derive_stream(7, 1, 2).standard_normal(8)
    b = derive_stream(7, 1, 2).standard_normal(8)
    c = derive_stream(7, 1, 3).standard_normal(8)
    assert_array_equal(a, b)
    assert not np.array_equal(a, c)


# ---------------------------------------------------------------------------
# simulated trace critical values

@pytest.mark.parametrize(
    "kwargs, match",
    [
        ({"dim": 0}, "dim >= 1"),
        ({"T": 50}, "T >= 100"),
        ({"reps": 500}, "reps >= 1000"),
    ],
)
def test_sim_trace_critical_validates_arguments(kwargs, match):
    full = {"dim": 1, "level": 0.05, "T": 100, "reps": 1000}
    full.update(kwargs)
    with pytest.raises(ValueError, match=match):
        sim_trace_critical(rng=derive_stream(0), **full)


@pytest.mark.parametrize("level", [0.0, 1.0, -0.1])
def test_sim_trace_critical_validates_level(level):
    with pytest.raises(ValueError, match="level"):
        sim_trace_critical(1, level, 100, 1000, derive_stream(0))


def test_sim_trace_critical_deterministic():
    a = sim_trace_critical(1, 0.05, 100, 1000, derive_stream(0, 1))
    b = sim_trace_critical(1, 0.05, 100, 1000, derive_stream(0, 1))
    assert a == b


def test_sim_trace_critical_seeds_agree():
    a = sim_trace_critical(1, 0.05, 1000, 6000, derive_stream(101))
    b = sim_trace_critical(1, 0.05, 1000, 6000, derive_stream(202))
    assert abs(a - b) < 0.15
    assert 7.5 < a < 9.5


def test_sim_trace_critical_error_shrinks_with_reps():
    estimates = {
        reps: [
            sim_trace_critical(1, 0.05, 100, reps, derive_stream(300 + s))
            for s in range(16)
        ]
        for reps in (1000, 4000)
    }
    sd_small = np.std(estimates[1000], ddof=1)
    sd_large = np.std(estimates[4000], ddof=1)
    assert sd_large <= 0.75 * sd_small


def test_trace_table_values_increase_with_dimension(trace_table):
    col = trace_table.values[:, 0]
    assert col[0] < col[1] < col[2]


def test_trace_table_subset_rows_agree_bitwise(trace_table):
    sub = trace_critical_table(dims=(2,), T=1000, reps=2000, seed=0)
    assert_array_equal(sub.values[0], trace_table.values[1])


def test_trace_table_records_meta(trace_table):
    assert trace_table.meta == {"T": 1000, "reps": 2000, "seed": 0, "statistic": "trace"}


# ---------------------------------------------------------------------------
# trace test

def test_zero_coupling_panel_gives_zero_statistics():
    # the demeaned differences of this series are exactly orthogonal to the
    # demeaned lagged levels, so every canonical eigenvalue is zero
    y = np.array([0.0, 1.0, 0.0, -1.0, -2.0])[:, None]
    res = johansen_trace(y, hand_table((1,), [[3.0]]))
    assert_array_equal(res.eigenvalues, [0.0])
    assert res.stats[0] == 0.0
    assert res.selected_r == 0


def test_trace_rejects_short_panel():
    y = derive_stream(0).standard_normal((6, 2))
    with pytest.raises(InvalidSeries, match="2p \\+ 2"):
        johansen_trace(y, hand_table((1, 2), [[3.0], [15.0]]))


def test_trace_rejects_constant_panel():
    with pytest.raises(SingularMoments, match="lagged-level"):
        johansen_trace(np.ones((30, 2)), hand_table((1, 2), [[3.0], [15.0]]))


def test_trace_requires_covering_table():
    rng = derive_stream(1)
    y = np.cumsum(rng.standard_normal((100, 2)), axis=0)
    with pytest.raises(ValueError, match="no dimension 2"):
        johansen_trace(y, hand_table((1,), [[3.0]]))


def mixed_panel(seed, n=300):
    rng = derive_stream(seed)
    x = np.column_stack(
        [
            np.cumsum(rng.standard_normal(n)),
            np.cumsum(rng.standard_normal(n)),
            rng.standard_normal(n),
        ]
    )
    mixing = np.array([[2.0, 0.0, 1.0], [1.0, 1.0, 0.0], [0.0, 1.0, 1.0]])
    return x @ mixing.T


def test_trace_statistics_shape_and_ordering(trace_table):
    res = johansen_trace(mixed_panel(9), trace_table)
    assert res.stats.shape == (3,)
    assert np.all(res.stats >= 0.0)
    assert np.all(np.diff(res.stats) <= 1e-12)
    assert np.all(res.eigenvalues >= 0.0)
    assert np.all(res.eigenvalues < 1.0)
    assert np.all(np.diff(res.eigenvalues) <= 1e-12)
    assert 0 <= res.selected_r <= 3
    assert res.directions.shape == (3, 3)
    assert res.level == 0.05


def test_trace_deterministic(trace_table):
    y = mixed_panel(11)
    a = johansen_trace(y, trace_table)
    b = johansen_trace(y, trace_table)
    assert_array_equal(a.stats, b.stats)
    assert_array_equal(a.directions, b.directions)
    assert a.selected_r == b.selected_r


def test_trace_size_on_univariate_random_walk(trace_table):
    reps, n = 500, 500
    rejections = 0
    for k in range(reps):
        walk = np.cumsum(derive_stream(40, k).standard_normal(n))
        if johansen_trace(walk[:, None], trace_table).selected_r >= 1:
            rejections += 1
    assert abs(rejections / reps - 0.05) <= 0.03


def test_trace_power_with_one_cointegrating_relation(trace_table):
    reps, n = 200, 1000
    hits = 0
    for k in range(reps):
        rng = derive_stream(41, k)
        walk = np.cumsum(rng.standard_normal(n))
        from scipy.signal import lfilter

        stationary = lfilter([1.0], [1.0, -0.5], rng.standard_normal(n))
        y = np.column_stack([walk, walk + stationary])
        if johansen_trace(y, trace_table).selected_r == 1:
            hits += 1
    assert hits / reps >= 0.90


# ---------------------------------------------------------------------------
# unit-root statistic

@pytest.mark.parametrize("n, expected", [(50, 3), (100, 4), (200, 4), (400, 5), (1000, 6)])
def test_bartlett_bandwidth_values(n, expected):
    assert bartlett_bandwidth(n) == expected


@pytest.mark.parametrize("scale", [0.1, 10.0])
def test_unit_root_stat_scale_invariant(scale):
    x = np.cumsum(derive_stream(50).standard_normal(400))
    assert_allclose(unit_root_stat(scale * x), unit_root_stat(x), rtol=1e-9)


def test_unit_root_stat_rejects_short_series():
    with pytest.raises(InvalidSeries, match="at least 20"):
        unit_root_stat(np.arange(19.0))


def test_unit_root_stat_rejects_non_finite():
    x = np.cumsum(derive_stream(51).standard_normal(40))
    x[7] = np.nan
    with pytest.raises(InvalidSeries, match="non-finite"):
        unit_root_stat(x)


def test_unit_root_stat_rejects_constant_series():
    with pytest.raises(DegenerateComponent, match="constant"):
        unit_root_stat(np.full(30, 2.5))
    tail_jump = np.ones(30)
    tail_jump[-1] = 2.0
    with pytest.raises(DegenerateComponent, match="lagged series"):
        unit_root_stat(tail_jump)


def test_unit_root_stat_rejects_negative_bandwidth():
    x = np.cumsum(derive_stream(52).standard_normal(40))
    with pytest.raises(ValueError, match="bandwidth"):
        unit_root_stat(x, bandwidth=-1)


def test_zero_bandwidth_is_uncorrected_statistic():
    x = np.cumsum(derive_stream(53).standard_normal(100))
    ylag, ynow = x[:-1], x[1:]
    w = ylag - ylag.mean()
    rho = (w @ ynow) / (w @ w)
    assert_allclose(unit_root_stat(x, bandwidth=0), 99 * (rho - 1.0), rtol=1e-12)


def test_unit_root_stat_separates_noise_from_walk():
    rng = derive_stream(54)
    noise_stat = unit_root_stat(rng.standard_normal(500))
    walk_stat = unit_root_stat(np.cumsum(rng.standard_normal(500)))
    assert noise_stat < -100.0
    assert noise_stat < walk_stat


# ---------------------------------------------------------------------------
# unit-root critical values and sequential rank

def test_unit_root_table_deterministic():
    a = unit_root_critical_table(200, reps=1000, seed=3)
    b = unit_root_critical_table(200, reps=1000, seed=3)
    assert_array_equal(a.values, b.values)
    assert a.meta["statistic"] == "unit_root"
    assert a.dims == (1,)


def test_unit_root_table_validates_reps():
    with pytest.raises(ValueError, match="reps >= 1000"):
        unit_root_critical_table(200, reps=500)


def test_unit_root_table_lower_tail_ordering():
    table = unit_root_critical_table(200, levels=(0.05, 0.5), reps=1000, seed=4)
    assert table.values[0, 0] < table.values[0, 1]
    assert table.values[0, 0] < -5.0


def test_sequential_rank_full_on_noise_panel(ur_table):
    reps, hits = 100, 0
    for k in range(reps):
        x = derive_stream(60, k).standard_normal((1000, 3))
        if sequential_unit_root(x, 0.05, ur_table) == 3:
            hits += 1
    assert hits / reps >= 0.7


def test_sequential_rank_zero_on_random_walks(ur_table):
    # testing stops at the first non-rejection, so the exact zero-rank
    # probability is 1 - level = 0.95; the band around (1 - level)^3 covers it
    reps, hits = 200, 0
    for k in range(reps):
        x = np.cumsum(derive_stream(361, k).standard_normal((1000, 3)), axis=0)
        if sequential_unit_root(x, 0.05, ur_table) == 0:
            hits += 1
    assert abs(hits / reps - 0.95**3) <= 0.1


def test_sequential_rank_stops_at_first_non_rejection(ur_table):
    rng = derive_stream(62)
    x = np.column_stack(
        [
            rng.standard_normal(1000),
            np.cumsum(rng.standard_normal(1000)),
            rng.standard_normal(1000),
        ]
    )
    # the last column rejects, the middle (a walk) does not; the stationary
    # first column is never reached
    assert sequential_unit_root(x, 0.05, ur_table) == 1


def test_sequential_rank_rejects_constant_column(ur_table):
    x = np.column_stack(
        [derive_stream(63).standard_normal(100), np.full(100, 1.0)]
    )
    with pytest.raises(DegenerateComponent):
        sequential_unit_root(x, 0.05, ur_table)
