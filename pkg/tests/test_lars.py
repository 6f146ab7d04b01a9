import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import gaussian_problem, orthonormal_problem
from selinf.errors import DegenerateDenominator, SelinfError
from selinf.lars import lars_c, lars_h, lars_path, lars_polyhedron, next_knot, s_plus_max
from selinf.lasso import lasso_fit
from selinf.polytope import slice


def test_orthonormal_knots_are_sorted_abs_correlations(rng):
    X, y = orthonormal_problem(rng, 30, 6)
    path = lars_path(X, y, 6)
    u = X.T @ y
    np.testing.assert_allclose(path.knots, np.sort(np.abs(u))[::-1], rtol=1e-12)
    assert [j for j, _ in path.entries] == list(np.argsort(-np.abs(u)))
    assert [s for _, s in path.entries] == [int(np.sign(u[j])) for j, _ in path.entries]


def test_first_knot_is_max_abs_correlation(rng):
    X, y = gaussian_problem(rng, 20, 7)
    path = lars_path(X, y, 1)
    assert path.knots[0] == pytest.approx(np.max(np.abs(X.T @ y)), rel=1e-14)
    assert path.knot(0) == np.inf


@given(st.integers(0, 2**32 - 1))
def test_knot_is_inner_product_with_c(seed):
    r = np.random.default_rng(seed)
    X, y = gaussian_problem(r, 15, 6)
    path = lars_path(X, y, 4)
    for k in range(1, 5):
        assert float(path.c(k) @ y) == pytest.approx(path.knots[k - 1], rel=1e-10)
    assert np.all(np.diff(path.knots) <= 0)


@given(st.integers(0, 2**32 - 1))
def test_equicorrelation_along_path(seed):
    r = np.random.default_rng(seed)
    X, y = gaussian_problem(r, 15, 6)
    path = lars_path(X, y, 4)
    for k in range(1, 5):
        corr = X.T @ (y - X @ path.beta_at_knots[k - 1])
        lam = path.knots[k - 1]
        M = list(path.active(k))
        np.testing.assert_allclose(corr[M], lam * np.array(path.signs(k)), rtol=1e-9, atol=1e-12)
        assert np.max(np.abs(corr)) <= lam * (1 + 1e-9)


def test_c_vector_formula(rng):
    X, y = gaussian_problem(rng, 12, 5)
    M, s = [1, 3], [1, -1]
    XM = X[:, M]
    pinv = np.linalg.pinv(XM)
    Pperp = np.eye(12) - XM @ pinv
    j, sj = 0, -1
    ref = Pperp @ X[:, j] / (sj - X[:, j] @ pinv.T @ np.array(s, float))
    np.testing.assert_allclose(lars_c(X, M, s, j, sj).vector, ref, atol=1e-12)
    with pytest.raises(ValueError):
        lars_c(X, M, s, 1, 1)


def test_degenerate_denominator():
    # w = e1 and x_j^T w = 1, so s = +1 gives a zero denominator
    e = np.eye(3)
    with pytest.raises(DegenerateDenominator):
        lars_c(np.column_stack([e[:, 0], e[:, 0] + e[:, 1]]), [0], [1], 1, 1)


@given(st.integers(0, 2**32 - 1))
def test_h_equals_next_step_c(seed):
    r = np.random.default_rng(seed)
    X, y = gaussian_problem(r, 12, 5)
    path = lars_path(X, y, 2)
    (j1, s1) = path.entries[0]
    c1 = path.c(1)
    for j in range(5):
        if j == j1:
            continue
        for s in (1, -1):
            try:
                cjs = lars_c(X, [], [], j, s).vector
                nxt = lars_c(X, [j1], [s1], j, s).vector
            except DegenerateDenominator:
                continue
            np.testing.assert_allclose(lars_h(cjs, c1), nxt, atol=1e-9 * np.linalg.norm(nxt))


@given(st.integers(0, 2**32 - 1), st.sampled_from(["reduced", "exact"]))
def test_observation_in_own_polyhedron(seed, mode):
    r = np.random.default_rng(seed)
    X, y = gaussian_problem(r, 15, 6)
    path = lars_path(X, y, 3)
    for k in (1, 2, 3):
        poly = lars_polyhedron(path, k, mode)
        assert np.min(poly.slack(y)) >= -1e-9 * (1 + np.abs(poly.b).max())


def test_reduced_polyhedron_rows(rng):
    X, y = gaussian_problem(rng, 15, 6)
    path = lars_path(X, y, 3)
    poly = lars_polyhedron(path, 3, "reduced")
    assert poly.n_rows == 4
    cstar, _ = s_plus_max(path, 3)
    assert poly.b[-1] == pytest.approx(-cstar)


def test_exact_polyhedron_is_the_selection_event(rng):
    X, y = gaussian_problem(rng, 10, 4)
    path = lars_path(X, y, 2)
    poly = lars_polyhedron(path, 2, "exact")
    for _ in range(300):
        y2 = y + 0.5 * rng.standard_normal(10)
        try:
            p2 = lars_path(X, y2, 2)
            same = p2.entries == path.entries and p2.competitors == path.competitors
        except SelinfError:
            same = False
        assert poly.contains(y2, tol=0.0) == same


@given(st.integers(0, 2**32 - 1))
def test_spacing_slice_endpoints(seed):
    r = np.random.default_rng(seed)
    X, y = gaussian_problem(r, 15, 6)
    path = lars_path(X, y, 3)
    for k in (1, 2, 3):
        ck = path.c(k)
        reg = slice(lars_polyhedron(path, k, "reduced"), ck, 1.0, y)
        lo, hi = reg.intervals[0]
        cstar, _ = s_plus_max(path, k)
        assert hi == pytest.approx(path.knot(k - 1), rel=1e-9) if k > 1 else hi == np.inf
        assert lo == pytest.approx(max(cstar, 0.0), rel=1e-9, abs=1e-12)


@given(st.integers(0, 2**32 - 1))
def test_knot_coefficients_match_lasso(seed):
    r = np.random.default_rng(seed)
    X, y = gaussian_problem(r, 20, 5, beta=np.array([3.0, -2.0, 0, 0, 1.0]))
    path = lars_path(X, y, 4)
    for k in range(2, 5):
        lam = path.knots[k - 1]
        sol = lasso_fit(X, y, lam)
        # agreement holds only while no active coefficient has crossed zero
        if sorted(sol.active) != sorted(path.active(k - 1)):
            continue
        np.testing.assert_allclose(path.beta_at_knots[k - 1], sol.beta_hat, atol=1e-8)


def test_coef_at_interpolates(rng):
    X, y = gaussian_problem(rng, 20, 5)
    path = lars_path(X, y, 3)
    lam = 0.5 * (path.knots[1] + path.knots[2])
    b = path.coef_at(lam)
    corr = X.T @ (y - X @ b)
    M = list(path.active(2))
    np.testing.assert_allclose(corr[M], lam * np.array(path.signs(2)), rtol=1e-10)
    np.testing.assert_allclose(path.coef_at(path.knots[1]), path.beta_at_knots[1], atol=1e-12)
    with pytest.raises(ValueError):
        path.coef_at(0.5 * path.knots[2])


def test_next_knot_matches_longer_path(rng):
    X, y = gaussian_problem(rng, 20, 6)
    assert next_knot(lars_path(X, y, 2)) == pytest.approx(lars_path(X, y, 3).knots[2])


def test_steps_validation(rng):
    X, y = gaussian_problem(rng, 5, 8)
    with pytest.raises(ValueError):
        lars_path(X, y, 5)
