import warnings

import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from eigencoint.errors import DegenerateSpectrum, InvalidRank
from eigencoint.linalg import EigenSystem
from eigencoint.ranksel import (
    PenaltySpec,
    fit,
    penalty,
    rank_ic,
    rank_ratio,
    rank_ratio_fractional,
    split,
    with_ranks,
)


def eigen_from(values):
    values = np.asarray(values, dtype=float)
    return EigenSystem(values=values, vectors=np.eye(values.size))


# ---------------------------------------------------------------------------
# fit


def test_fit_separates_walk_from_noise():
    rng = np.random.default_rng(6)
    theta = 0.3
    a = np.array(
        [[np.cos(theta), -np.sin(theta)], [np.sin(theta), np.cos(theta)]]
    )
    ratios = {}
    for n in (200, 1000):
        x = np.column_stack(
            [np.cumsum(rng.standard_normal(n)), rng.standard_normal(n)]
        )
        f = fit(x @ a.T, 5)
        ratios[n] = f.eigen.values[0] / f.eigen.values[1]
    assert ratios[1000] > ratios[200]
    assert ratios[1000] > 100.0


def test_fit_iid_panel_moderate_spread():
    rng = np.random.default_rng(17)
    f = fit(rng.standard_normal((500, 3)), 5)
    assert f.eigen.values[0] / f.eigen.values[2] < 500


def test_fit_constant_panel_zero_spectrum():
    f = fit(np.full((30, 2), 1.0), 3)
    assert_array_equal(f.eigen.values, np.zeros(2))
    with pytest.raises(DegenerateSpectrum):
        rank_ratio(f.eigen, 30)


def test_fit_invariants():
    rng = np.random.default_rng(23)
    y = np.cumsum(rng.standard_normal((120, 4)), axis=0)
    f = fit(y, 5)
    assert f.n == 120
    assert f.r_hat is None and f.r_tilde is None
    assert np.max(np.abs(f.a_hat.T @ f.a_hat - np.eye(4))) <= 1e-10
    assert np.all(np.diff(f.eigen.values) <= 0.0)
    assert np.all(f.eigen.values >= 0.0)
    assert_array_equal(f.x_hat, y @ f.a_hat)
    assert f.stack.j0 == 5


def test_fit_deterministic():
    rng = np.random.default_rng(29)
    y = np.cumsum(rng.standard_normal((80, 3)), axis=0)
    f1, f2 = fit(y, 4), fit(y, 4)
    assert_array_equal(f1.eigen.values, f2.eigen.values)
    assert_array_equal(f1.a_hat, f2.a_hat)
    assert_array_equal(f1.x_hat, f2.x_hat)


def test_with_ranks_returns_updated_copy():
    rng = np.random.default_rng(37)
    f = fit(rng.standard_normal((50, 2)), 2)
    g = with_ranks(f, PenaltySpec("omega2"))
    assert g.r_hat == rank_ratio(f.eigen, f.n)
    omega = penalty(PenaltySpec("omega2"), f.n, f.eigen.values[-1])
    assert g.r_tilde == rank_ic(f.eigen, omega)
    assert f.r_hat is None and f.r_tilde is None
    assert_array_equal(g.a_hat, f.a_hat)


# ---------------------------------------------------------------------------
# rank_ratio


def test_rank_ratio_hand_example_two():
    assert rank_ratio(eigen_from([1e6, 2.0, 1.0]), 100) == 2


def test_rank_ratio_hand_example_one():
    assert rank_ratio(eigen_from([5e5, 4e5, 1.0]), 100) == 1


@pytest.mark.parametrize("n", [1, 10, 1000])
def test_rank_ratio_equal_values_full_rank(n):
    assert rank_ratio(eigen_from([3.0, 3.0, 3.0, 3.0]), n) == 4


def test_rank_ratio_never_zero():
    assert rank_ratio(eigen_from([1e12, 1.0]), 2) == 1


@pytest.mark.parametrize("values", [[1.0, 0.0], [1.0, -0.5]])
def test_rank_ratio_degenerate_spectrum(values):
    with pytest.raises(DegenerateSpectrum):
        rank_ratio(eigen_from(values), 100)


@pytest.mark.parametrize("factor", [1e-6, 1e6])
def test_rank_ratio_common_rescaling_invariance(factor):
    values = np.array([7e5, 30.0, 2.0, 1.0])
    base = rank_ratio(eigen_from(values), 250)
    assert rank_ratio(eigen_from(values * factor), 250) == base


# ---------------------------------------------------------------------------
# rank_ic


def test_rank_ic_hand_example_two():
    assert rank_ic(eigen_from([1e6, 2.0, 1.0]), 10.0) == 2


def test_rank_ic_hand_example_one():
    assert rank_ic(eigen_from([1e6, 2.0, 1.0]), 0.5) == 1


def test_rank_ic_single_candidate():
    assert rank_ic(eigen_from([42.0]), 3.0) == 1
    assert rank_ic(eigen_from([42.0]), 1e9) == 1


def test_rank_ic_tie_prefers_smaller():
    # values (3, 1), omega = 3: IC(1) = 1 + 3 = 4, IC(2) = 4 + 0 = 4.
    assert rank_ic(eigen_from([3.0, 1.0]), 3.0) == 1


def test_rank_ic_requires_positive_omega():
    with pytest.raises(ValueError):
        rank_ic(eigen_from([2.0, 1.0]), 0.0)
    with pytest.raises(ValueError):
        rank_ic(eigen_from([2.0, 1.0]), -1.0)


def test_rank_ic_matches_brute_force():
    rng = np.random.default_rng(41)
    for _ in range(25):
        p = int(rng.integers(1, 9))
        values = np.sort(rng.uniform(0.01, 1e4, p))[::-1]
        omega = float(rng.uniform(0.01, 1e3))
        scores = [
            np.sum(values[p - l:]) + (p - l) * omega for l in range(1, p + 1)
        ]
        expected = int(np.argmin(scores)) + 1
        assert rank_ic(eigen_from(values), omega) == expected


# ---------------------------------------------------------------------------
# penalty


def test_penalty_named_variants_exact():
    assert penalty(PenaltySpec("omega1"), 16, 2.0) == 64.0
    assert penalty(PenaltySpec("omega2"), 100, 1.0) == 1000.0
    assert_allclose(
        penalty(PenaltySpec("omega3"), 1000, 3.0), 3.0 * 1000.0 ** (2.0 / 3.0),
        rtol=1e-15,
    )


def test_penalty_custom_passthrough():
    assert penalty(PenaltySpec("custom", 7.5), 100, 123.0) == 7.5


def test_penalty_degenerate_lambda():
    with pytest.raises(DegenerateSpectrum):
        penalty(PenaltySpec("omega1"), 100, 0.0)
    # custom ignores lambda_p entirely
    assert penalty(PenaltySpec("custom", 2.0), 100, 0.0) == 2.0


def test_penalty_spec_validation():
    with pytest.raises(ValueError):
        PenaltySpec("omega4")
    with pytest.raises(ValueError):
        PenaltySpec("custom")  # missing value
    with pytest.raises(ValueError):
        PenaltySpec("custom", -1.0)
    with pytest.raises(ValueError):
        PenaltySpec("omega1", 5.0)  # value forbidden for named variants


# ---------------------------------------------------------------------------
# rank_ratio_fractional


def test_fractional_hand_example_threshold_one():
    assert rank_ratio_fractional(eigen_from([1e6, 2.0, 1.0]), 100, 1.0, 0.0) == 1


def test_fractional_hand_example_wide_threshold():
    # threshold 100^0.9 ~ 63.1
    assert rank_ratio_fractional(eigen_from([1e6, 2.0, 1.0]), 100, 1.5, 0.4) == 2


def test_fractional_reduces_to_unit_scaling():
    # d_min = 1, delta = 0 compares against lambda_p itself, i.e. the plain
    # ratio rule with the n factor replaced by 1.
    values = eigen_from([50.0, 2.0, 1.0])
    assert rank_ratio_fractional(values, 1000, 1.0, 0.0) == 1


@pytest.mark.parametrize("d_min,delta", [(0.5, 0.0), (0.4, 0.1), (1.0, 0.5), (1.0, -0.1)])
def test_fractional_parameter_validation(d_min, delta):
    with pytest.raises(ValueError):
        rank_ratio_fractional(eigen_from([2.0, 1.0]), 100, d_min, delta)


def test_fractional_degenerate_threshold_warns():
    with pytest.warns(RuntimeWarning):
        rank_ratio_fractional(eigen_from([10.0, 1.0]), 100, 0.6, 0.0)


# ---------------------------------------------------------------------------
# split


def test_split_boundaries():
    rng = np.random.default_rng(43)
    f = fit(rng.standard_normal((40, 3)), 3)
    a1, a2 = split(f, 0)
    assert a2.shape == (3, 0)
    assert_array_equal(a1, f.a_hat)
    a1, a2 = split(f, 3)
    assert a1.shape == (3, 0)
    assert_array_equal(a2, f.a_hat)


def test_split_last_column():
    rng = np.random.default_rng(47)
    f = fit(rng.standard_normal((40, 3)), 3)
    a1, a2 = split(f, 1)
    assert_array_equal(a2, f.a_hat[:, 2:])
    assert_array_equal(a1, f.a_hat[:, :2])
    assert np.max(np.abs(a1.T @ a2)) <= 1e-10


@pytest.mark.parametrize("r", [-1, 4])
def test_split_rank_out_of_range(r):
    f = fit(np.random.default_rng(53).standard_normal((30, 3)), 2)
    with pytest.raises(InvalidRank):
        split(f, r)


# ---------------------------------------------------------------------------
# scale invariance of the rank rules (panel level)


@pytest.mark.parametrize("s", [0.1, 10.0])
def test_rank_rules_scale_invariant(s):
    rng = np.random.default_rng(61)
    x = np.column_stack(
        [
            np.cumsum(np.cumsum(rng.standard_normal(300))),
            np.cumsum(rng.standard_normal(300)),
            rng.standard_normal(300),
        ]
    )
    a = rng.uniform(-3.0, 3.0, (3, 3))
    y = x @ a.T
    base = fit(y, 5)
    scaled = fit(s * y, 5)
    n = 300
    assert rank_ratio(scaled.eigen, n) == rank_ratio(base.eigen, n)
    for variant in ("omega1", "omega2", "omega3"):
        spec = PenaltySpec(variant)
        rb = rank_ic(base.eigen, penalty(spec, n, base.eigen.values[-1]))
        rs = rank_ic(scaled.eigen, penalty(spec, n, scaled.eigen.values[-1]))
        assert rs == rb
    assert rank_ratio_fractional(
        scaled.eigen, n, 1.2, 0.1
    ) == rank_ratio_fractional(base.eigen, n, 1.2, 0.1)


def test_example2_frequency_trend():
    # Correct-rank frequency for the (p=6, r=2) twice-integrated design is
    # non-decreasing in n, allowing one Monte Carlo inversion of <= 0.03.
    from eigencoint.harness import _replicate_seed, preset_template
    from eigencoint.simgen import gen_panel

    tpl = preset_template("example2", 6, 2)
    freqs = []
    for j, n in enumerate((300, 1000, 2500)):
        hits = 0
        for k in range(200):
            panel = gen_panel(tpl.spec_for(n, _replicate_seed(7, j, k)))
            f = fit(panel.y, 5)
            hits += rank_ratio(f.eigen, n) == 2
        freqs.append(hits / 200.0)
    drops = [max(0.0, freqs[i] - freqs[i + 1]) for i in range(2)]
    assert sum(d > 0 for d in drops) <= 1
    assert max(drops) <= 0.03
