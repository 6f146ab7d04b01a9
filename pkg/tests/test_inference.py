import math
import warnings

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import stats

from conftest import gaussian_problem, orthonormal_problem
from oracles import omega_block_inverse
from selinf.errors import MissingNextKnot, ModelNotNested, OutsideRegion
from selinf.inference import (
    coefficient_direction,
    estimate_sigma,
    omega,
    path_omega,
    selective_ci,
    selective_inference,
    selective_pvalue,
    significance_pvalue,
    significance_test,
    spacing_report,
    spacing_test,
)
from selinf.lars import lars_path
from selinf.polytope import TruncationRegion


def test_unconditional_region_gives_z_test():
    eta = np.array([1.0, 0.0, 0.0])
    y = np.array([1.96, 0.3, -0.1])
    reg = TruncationRegion.whole_line()
    assert selective_pvalue(y, eta, 1.0, reg) == pytest.approx(2 * stats.norm.sf(1.96), rel=1e-12)
    lo, hi = selective_ci(y, eta, 1.0, reg, alpha=0.05)
    q = stats.norm.ppf(0.975)
    assert lo == pytest.approx(1.96 - q, abs=1e-9)
    assert hi == pytest.approx(1.96 + q, abs=1e-9)


def test_truncation_shifts_the_interval():
    # a statistic just above its truncation point carries little evidence
    eta = np.array([1.0, 0.0])
    y = np.array([2.1, 0.0])
    reg = TruncationRegion(((2.0, np.inf),))
    p = selective_pvalue(y, eta, 1.0, reg, sided="one")
    assert p > 0.5
    lo, hi = selective_ci(y, eta, 1.0, reg)
    assert lo < 0.0 < hi


def test_outside_region_raises():
    with pytest.raises(OutsideRegion):
        selective_pvalue(np.array([0.0]), np.array([1.0]), 1.0, TruncationRegion(((1.0, 2.0),)))


def test_report_serialization():
    rep = selective_inference(np.array([1.0, 0.0]), np.array([1.0, 0.0]), 1.0,
                              TruncationRegion(((0.0, np.inf),)))
    d = rep.to_dict()
    assert d["region"]["intervals"] == [[0.0, "inf"]]
    assert 0 < d["p_value"] <= 1 and d["ci"][0] < d["ci"][1]


def test_coefficient_direction_gives_ls_coefficient(rng):
    X, y = gaussian_problem(rng, 15, 4)
    M = [0, 2, 3]
    eta = coefficient_direction(X, M, 1)
    assert eta @ y == pytest.approx(np.linalg.lstsq(X[:, M], y, rcond=None)[0][1])


@given(st.integers(0, 2**32 - 1))
def test_omega_closed_form_and_c_norm(seed):
    r = np.random.default_rng(seed)
    X, y = gaussian_problem(r, 20, 6)
    path = lars_path(X, y, 4)
    for k in range(1, 5):
        w = path_omega(path, k)
        j, s = path.entries[k - 1]
        assert w == pytest.approx(omega_block_inverse(X, path.active(k - 1), path.signs(k - 1), j, s),
                                  rel=1e-9)
        assert np.linalg.norm(path.c(k)) * w == pytest.approx(1.0, abs=1e-9)


def test_omega_requires_nesting(rng):
    X, _ = gaussian_problem(rng, 10, 4)
    with pytest.raises(ModelNotNested):
        omega(X, (0, 1), (1, 1), (2,), (1,))


def test_orthonormal_omega_is_one(rng):
    X, y = orthonormal_problem(rng, 30, 6)
    path = lars_path(X, y, 5)
    for k in range(1, 6):
        assert path_omega(path, k) == pytest.approx(1.0, abs=1e-12)
    T = significance_test(path, 1, 1.0)
    assert T == pytest.approx(path.knots[0] * (path.knots[0] - path.knots[1]))


@given(st.integers(0, 2**32 - 1))
def test_significance_direct_matches_closed_form(seed):
    r = np.random.default_rng(seed)
    X, y = gaussian_problem(r, 30, 8, beta=np.array([4.0, -3.0] + [0.0] * 6))
    path = lars_path(X, y, 4)
    for k in (1, 2, 3):
        try:
            direct = significance_test(path, k, 1.0, "direct")
        except ModelNotNested:  # a sign change along the path ends nesting
            continue
        closed = significance_test(path, k, 1.0, "closed_form")
        assert direct == pytest.approx(closed, rel=1e-6, abs=1e-10)


def test_significance_needs_next_knot(rng):
    X, y = gaussian_problem(rng, 20, 5)
    path = lars_path(X, y, 2)
    with pytest.raises(MissingNextKnot):
        significance_test(path, 2, 1.0)


def test_significance_pvalue():
    assert significance_pvalue(1.0) == pytest.approx(math.exp(-1))
    with warnings.catch_warnings(record=True) as w:
        warnings.simplefilter("always")
        assert significance_pvalue(1.0, r=2) == pytest.approx(math.exp(-2))
    assert w


def test_spacing_orthonormal_closed_form(rng):
    X, y = orthonormal_problem(rng, 40, 6)
    path = lars_path(X, y, 3)
    lam = path.knots
    # k = 1: (1 - Phi(l1)) / (1 - Phi(c*)), and the exact lower bound is l2 here
    ref = stats.norm.sf(lam[0]) / stats.norm.sf(lam[1])
    T_exact, _ = spacing_test(path, 1, 1.0, "exact")
    T_simple, _ = spacing_test(path, 1, 1.0, "simplified")
    assert T_exact == pytest.approx(ref, rel=1e-10)
    assert T_simple == pytest.approx(ref, rel=1e-10)
    # k = 2: (Phi(l1) - Phi(l2)) / (Phi(l1) - Phi(l3))
    ref2 = (stats.norm.cdf(lam[0]) - stats.norm.cdf(lam[1])) / (
        stats.norm.cdf(lam[0]) - stats.norm.cdf(lam[2]))
    assert spacing_test(path, 2, 1.0, "simplified")[0] == pytest.approx(ref2, rel=1e-8)


@given(st.integers(0, 2**32 - 1))
def test_exact_spacing_never_exceeds_simplified(seed):
    r = np.random.default_rng(seed)
    X, y = gaussian_problem(r, 20, 6)
    path = lars_path(X, y, 3)
    for k in (1, 2):
        T_ex, _ = spacing_test(path, k, 1.0, "exact")
        T_sp, _ = spacing_test(path, k, 1.0, "simplified")
        assert T_ex <= T_sp + 1e-12


def test_spacing_report_fields(rng):
    X, y = gaussian_problem(rng, 20, 5, beta=np.array([5.0, 0, 0, 0, 0]))
    path = lars_path(X, y, 2)
    rep = spacing_report(path, 1, 1.0)
    d = rep.to_dict()
    assert d["k"] == 1 and d["variable"] == path.entries[0][0]
    assert d["ci"][0] < d["ci"][1]
    assert d["omega"] == pytest.approx(1 / np.linalg.norm(path.c(1)))


def test_estimate_sigma(rng):
    X = rng.standard_normal((400, 5))
    y = X @ np.ones(5) + 2.0 * rng.standard_normal(400)
    assert estimate_sigma(X, y) == pytest.approx(2.0, rel=0.1)
    with pytest.raises(ValueError):
        estimate_sigma(X[:5], y[:5])
