import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import optimize

from conftest import orthonormal_problem
from oracles import soft_threshold
from selinf.errors import DidNotConverge, TooManySignPatterns
from selinf.lasso import (
    duality_gap,
    kkt_check,
    lasso_fit,
    lasso_model_region,
    lasso_polyhedron,
    objective,
)


def _bound_constrained_lasso(X, y, lam):
    """Independent solve: beta = u - v with u, v >= 0, by L-BFGS-B."""
    p = X.shape[1]

    def f(w):
        b = w[:p] - w[p:]
        r = y - X @ b
        g = -X.T @ r
        return 0.5 * r @ r + lam * w.sum(), np.concatenate([g + lam, -g + lam])

    res = optimize.minimize(f, np.zeros(2 * p), jac=True, method="L-BFGS-B",
                            bounds=[(0, None)] * (2 * p),
                            options={"ftol": 1e-15, "gtol": 1e-12, "maxiter": 10_000})
    return res.x[:p] - res.x[p:]


def test_orthonormal_design_is_soft_thresholding(rng):
    X, y = orthonormal_problem(rng, 30, 6, sigma=2.0)
    lam = 1.0
    sol = lasso_fit(X, y, lam)
    np.testing.assert_allclose(sol.beta_hat, soft_threshold(X.T @ y, lam), atol=1e-12)


def test_matches_independent_solver(rng):
    X = rng.standard_normal((25, 8))
    y = X[:, :3] @ np.array([2.0, -1.0, 0.5]) + rng.standard_normal(25)
    lam = 4.0
    sol = lasso_fit(X, y, lam)
    ref = _bound_constrained_lasso(X, y, lam)
    assert objective(X, y, lam, sol.beta_hat) <= objective(X, y, lam, ref) + 1e-9
    np.testing.assert_allclose(sol.beta_hat, ref, atol=1e-5)


def test_zero_solution_above_lambda_max(rng):
    X = rng.standard_normal((10, 4))
    y = rng.standard_normal(10)
    sol = lasso_fit(X, y, 1.01 * np.max(np.abs(X.T @ y)))
    assert sol.active == () and np.all(sol.beta_hat == 0.0)


def test_objective_history_is_nonincreasing(rng):
    X = rng.standard_normal((40, 10))
    y = rng.standard_normal(40)
    sol = lasso_fit(X, y, 2.0)
    hist = np.array(sol.objective_path)
    assert np.all(np.diff(hist) <= 1e-12 * hist[0])


def test_did_not_converge_reports_state(rng):
    X = rng.standard_normal((20, 10))
    X[:, 1] = X[:, 0] + 1e-3 * rng.standard_normal(20)
    y = X[:, 0] + rng.standard_normal(20)
    with pytest.raises(DidNotConverge) as err:
        lasso_fit(X, y, 0.01, tol=1e-30, max_iter=2)
    assert err.value.beta.shape == (10,)


def test_invalid_lambda(rng):
    with pytest.raises(ValueError):
        lasso_fit(np.eye(3), np.ones(3), 0.0)


@given(st.integers(0, 2**32 - 1), st.floats(0.2, 3.0))
def test_kkt_holds_and_event_is_in_its_polyhedron(seed, lam):
    r = np.random.default_rng(seed)
    X = r.standard_normal((12, 5))
    y = r.standard_normal(12) * 2
    sol = lasso_fit(X, y, lam)
    _, viol = kkt_check(X, y, lam, sol.beta_hat)
    assert viol <= 1e-8
    assert duality_gap(X, y, lam, sol.beta_hat) <= 1e-9 * (1 + y @ y)
    poly = lasso_polyhedron(X, sol.active, sol.signs, lam)
    assert poly.n_rows == 2 * 5 - len(sol.active)
    assert np.min(poly.slack(y)) >= -1e-7


def test_polyhedron_rows_follow_formula(rng):
    X = rng.standard_normal((8, 3))
    M, s, lam = (0, 2), np.array([1.0, -1.0]), 0.7
    poly = lasso_polyhedron(X, M, s, lam)
    XM = X[:, M]
    pinv = np.linalg.pinv(XM)
    Pperp = np.eye(8) - XM @ pinv
    x1 = X[:, [1]]
    A_top = x1.T @ Pperp / lam
    np.testing.assert_allclose(poly.A[0], A_top[0], atol=1e-12)
    np.testing.assert_allclose(poly.A[1], -A_top[0], atol=1e-12)
    np.testing.assert_allclose(poly.A[2:], -np.diag(s) @ pinv, atol=1e-12)
    shift = x1.T @ pinv.T @ s
    np.testing.assert_allclose(poly.b[:2], [1 - shift[0], 1 + shift[0]], atol=1e-12)
    np.testing.assert_allclose(poly.b[2:], -lam * np.diag(s) @ np.linalg.solve(XM.T @ XM, s))
    assert poly.row_tags == ("lasso-inactive",) * 2 + ("lasso-sign",) * 2


def test_model_region_sign_patterns(rng):
    X = rng.standard_normal((10, 4))
    assert len(lasso_model_region(X, (0, 1, 3), 1.0)) == 8
    with pytest.raises(TooManySignPatterns):
        lasso_model_region(X, (0, 1, 3), 1.0, max_signs=4)


def test_empty_model_polyhedron(rng):
    X = rng.standard_normal((10, 3))
    poly = lasso_polyhedron(X, (), [], 1.0)
    assert poly.n_rows == 6
    np.testing.assert_allclose(poly.b, 1.0)
