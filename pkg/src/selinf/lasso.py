"""Lasso at a fixed penalty and its KKT selection polyhedra.

The solver is cyclic coordinate descent on 1/2 ||y - X b||^2 + lam ||b||_1
with a duality-gap stopping rule.  Once the support stabilises, the fit is
polished by solving the stationarity equations on the support exactly and
accepted only if the KKT conditions hold, which makes the returned
solutions accurate to rounding rather than to the gap tolerance.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .errors import DidNotConverge, SingularDesign, TooManySignPatterns
from .linmodel import as_array, projector
from .polytope import Polyhedron

ACTIVE_TOL = 1e-10
KKT_TOL = 1e-6
SLACK_TOL = 1e-9
MAX_SIGN_PATTERNS = 2**20


@dataclass(frozen=True)
class LassoSolution:
    beta_hat: np.ndarray
    lam: float
    active: tuple
    signs: tuple
    dual_gap: float
    n_iter: int = 0
    objective_path: tuple = field(default=(), repr=False)

    @property
    def event(self) -> tuple:
        """(active, signs), the selection event this fit realises."""
        return self.active, self.signs


def objective(X, y, lam, beta) -> float:
    r = y - X @ beta
    return 0.5 * float(r @ r) + lam * float(np.abs(beta).sum())


def duality_gap(X, y, lam, beta) -> float:
    r = y - X @ beta
    dual_norm = float(np.max(np.abs(X.T @ r))) if X.shape[1] else 0.0
    theta = r / max(1.0, dual_norm / lam)
    primal = 0.5 * float(r @ r) + lam * float(np.abs(beta).sum())
    dual = 0.5 * float(y @ y) - 0.5 * float((y - theta) @ (y - theta))
    return max(primal - dual, 0.0)


def support(beta, threshold: float = ACTIVE_TOL) -> tuple[tuple, tuple]:
    beta = np.asarray(beta, dtype=float)
    top = float(np.max(np.abs(beta))) if beta.size else 0.0
    if top == 0.0:
        return (), ()
    idx = np.flatnonzero(np.abs(beta) > threshold * top)
    return tuple(int(j) for j in idx), tuple(int(np.sign(beta[j])) for j in idx)


def kkt_check(X, y, lam, beta_hat) -> tuple[np.ndarray, float]:
    """Scaled correlations X^T(y - X b)/lam and the worst KKT violation.

    On the support the scaled correlation must equal the coefficient sign;
    off the support it must lie in [-1, 1].
    """
    X = as_array(X)
    y = np.asarray(y, dtype=float)
    beta_hat = np.asarray(beta_hat, dtype=float)
    s_hat = X.T @ (y - X @ beta_hat) / lam
    active, signs = support(beta_hat)
    on = np.zeros(X.shape[1], dtype=bool)
    on[list(active)] = True
    viol = 0.0
    if active:
        viol = float(np.max(np.abs(s_hat[on] - np.array(signs))))
    if (~on).any():
        viol = max(viol, float(np.max(np.maximum(np.abs(s_hat[~on]) - 1.0, 0.0))))
    return s_hat, viol


def _polish(X, y, lam, active, signs):
    """Exact solution on a guessed support, or None if it is not one."""
    p = X.shape[1]
    beta = np.zeros(p)
    if active:
        try:
            P = projector(X, active)
        except SingularDesign:
            return None
        s = np.array(signs, dtype=float)
        bM = P.solve(y) - lam * P.gram_solve(s)
        if np.any(np.sign(bM) != s):
            return None
        beta[list(active)] = bM
    corr = X.T @ (y - X @ beta)
    off = np.ones(p, dtype=bool)
    off[list(active)] = False
    if off.any() and np.max(np.abs(corr[off])) > lam * (1.0 + 1e-12):
        return None
    return beta


def _polish_any(X, y, lam, beta):
    """Try exact solves on the support cut at successively looser thresholds.

    Coordinates sitting on the KKT boundary decay slowly under coordinate
    descent; a looser cut drops them.  Any candidate passing the KKT check
    is a minimiser, so trying several is safe.
    """
    seen = set()
    for thr in (ACTIVE_TOL, 1e-8, 1e-6, 1e-4):
        cand = support(beta, thr)
        if cand in seen:
            continue
        seen.add(cand)
        polished = _polish(X, y, lam, *cand)
        if polished is not None:
            event = support(polished)
            # a boundary coordinate can come back as +/-1e-16
            mask = np.zeros(polished.size, dtype=bool)
            mask[list(event[0])] = True
            polished[~mask] = 0.0
            return polished, event
    return None, None


def lasso_fit(X, y, lam: float, tol: float = 1e-12, max_iter: int = 100_000) -> LassoSolution:
    """Minimise 1/2 ||y - X b||^2 + lam ||b||_1 by cyclic coordinate descent.

    Stops when the duality gap is below ``tol * ||y||^2 / 2`` or when an
    exact solve on the current support satisfies the KKT conditions.
    """
    if not lam > 0:
        raise ValueError("lam must be positive")
    X = as_array(X)
    y = np.asarray(y, dtype=float)
    n, p = X.shape
    G = X.T @ X
    Xty = X.T @ y
    diag = np.diag(G).copy()
    scale = 0.5 * float(y @ y)
    beta = np.zeros(p)
    if np.max(np.abs(Xty)) <= lam:
        return LassoSolution(beta, lam, (), (), duality_gap(X, y, lam, beta), 0, (scale,))

    history = [objective(X, y, lam, beta)]
    grad = Xty.copy()  # X^T (y - X beta)
    last_support = None
    for it in range(1, max_iter + 1):
        for j in range(p):
            if diag[j] == 0.0:
                continue
            old = beta[j]
            rho = grad[j] + diag[j] * old
            new = np.sign(rho) * max(abs(rho) - lam, 0.0) / diag[j]
            if new != old:
                grad -= G[:, j] * (new - old)
                beta[j] = new
        history.append(objective(X, y, lam, beta))
        gap = duality_gap(X, y, lam, beta)
        cur = support(beta)
        converged = gap <= tol * scale
        if converged or cur == last_support:
            polished, event = _polish_any(X, y, lam, beta)
            if polished is not None:
                history.append(objective(X, y, lam, polished))
                return LassoSolution(
                    polished, lam, *event, duality_gap(X, y, lam, polished), it, tuple(history)
                )
        if converged:
            return LassoSolution(beta.copy(), lam, *cur, gap, it, tuple(history))
        last_support = cur
    raise DidNotConverge(max_iter, beta.copy(), gap)


def lasso_polyhedron(X, M, s, lam: float) -> Polyhedron:
    """{y : the Lasso at ``lam`` has support M with signs s}.

    Inactive rows bound the scaled correlations of the excluded columns by
    one; sign rows keep the support coefficients on their signs.
    """
    X = as_array(X)
    n, p = X.shape
    M = tuple(int(j) for j in M)
    s = np.asarray(s, dtype=float).reshape(-1)
    if len(M) != s.size:
        raise ValueError("need one sign per active index")
    rest = [j for j in range(p) if j not in set(M)]
    P = projector(X, M)
    blocks, offsets, tags = [], [], []
    if rest:
        X_rest = X[:, rest]
        # X_{-M}^T P_perp / lam, formed by projecting the columns
        inner = np.column_stack([P.complement(X_rest[:, i]) for i in range(len(rest))]).T / lam
        shift = X_rest.T @ P.pinv_t(s)
        blocks += [inner, -inner]
        offsets += [1.0 - shift, 1.0 + shift]
        tags += ["lasso-inactive"] * (2 * len(rest))
    if M:
        # rows of X_M^+ = R^{-1} Q^T
        pinv = np.linalg.solve(P.R, P.Q.T)
        blocks.append(-s[:, None] * pinv)
        offsets.append(-lam * s * P.gram_solve(s))
        tags += ["lasso-sign"] * len(M)
    if not blocks:
        return Polyhedron(np.zeros((0, n)), np.zeros(0), ())
    return Polyhedron(np.vstack(blocks), np.concatenate(offsets), tuple(tags))


def lasso_model_region(X, M, lam: float, max_signs: int = MAX_SIGN_PATTERNS) -> list[Polyhedron]:
    """One polyhedron per sign pattern on M; their union is {support = M}."""
    m = len(M)
    if 2**m > max_signs:
        raise TooManySignPatterns(m, max_signs)
    return [lasso_polyhedron(X, M, s, lam) for s in itertools.product((-1, 1), repeat=m)]


def lasso_selector(X, lam: float):
    """Map y to its Lasso support, for use with the line-search region."""
    X = as_array(X)

    def select(y):
        return lasso_fit(X, y, lam).active

    return select
