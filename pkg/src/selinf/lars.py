"""Least angle regression path and its selection polyhedra.

Between knots the LARS fit moves along the least-squares direction of the
current active set, so for j outside the active set

    X_j^T r(lam) = X_j^T P_perp y + lam * X_j^T w,   w = (X_M^+)^T s_M,

and column j reaches correlation s * lam exactly when c(j, s)^T y = lam with
c(j, s) = P_perp X_j / (s - X_j^T w).  Every step is therefore a comparison
of linear functions of y.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import CollinearCandidate, DegenerateDenominator, NoFeasibleEntry
from .linmodel import Projector, as_array, projector
from .polytope import Polyhedron

DENOM_TOL = 1e-12
# relative tolerance for the c(j,s)^T c_k = ||c_k||^2 boundary class
INNER_TOL = 1e-10


@dataclass(frozen=True)
class CVector:
    j: int
    s: int
    vector: np.ndarray


@dataclass(frozen=True)
class LarsPath:
    """A LARS run of K steps.

    ``knots[k-1]`` is the k-th knot, ``entries[k-1]`` the (column, sign)
    entering there, ``beta_at_knots[k-1]`` the coefficients at that knot
    (the entering column still zero) and ``competitors[k-1]`` /
    ``excluded[k-1]`` the candidate pairs whose knot value was at most /
    above the previous knot.
    """

    knots: tuple
    entries: tuple
    beta_at_knots: tuple
    residual_at_knots: tuple
    competitors: tuple
    excluded: tuple
    X: np.ndarray = field(repr=False)
    y: np.ndarray = field(repr=False)

    def __len__(self):
        return len(self.knots)

    def active(self, k: int) -> tuple:
        """M_k, the columns active after k steps."""
        return tuple(j for j, _ in self.entries[:k])

    def signs(self, k: int) -> tuple:
        return tuple(s for _, s in self.entries[:k])

    def knot(self, k: int) -> float:
        """lambda_k, with lambda_0 = +inf."""
        return np.inf if k == 0 else self.knots[k - 1]

    def c(self, k: int, j: int | None = None, s: int | None = None) -> np.ndarray:
        """c_k(j, s); defaults to the pair that entered at step k."""
        if j is None:
            j, s = self.entries[k - 1]
        return lars_c(self.X, self.active(k - 1), self.signs(k - 1), j, s).vector

    def coef_at(self, lam: float) -> np.ndarray:
        """LARS coefficients at ``lam`` for lam >= the last knot."""
        K = len(self)
        if lam >= self.knots[0]:
            return np.zeros(self.X.shape[1])
        if lam < self.knots[-1]:
            raise ValueError(f"lam={lam} lies below the last computed knot {self.knots[-1]}")
        k = next(i for i in range(1, K) if self.knots[i] <= lam) if K > 1 else 1
        # lam in [knots[k], knots[k-1]]; active set M_k
        M = list(self.active(k))
        beta = self.beta_at_knots[k - 1].copy()
        step = projector(self.X, M).solve(self.residual_at_knots[k - 1])
        beta[M] += (1.0 - lam / self.knots[k - 1]) * step
        return beta


def lars_c(X, M_prev: Sequence[int], s_prev: Sequence[int], j: int, s: int,
           P: Projector | None = None, w: np.ndarray | None = None) -> CVector:
    """The vector whose inner product with y is column j's knot value."""
    X = as_array(X)
    if j in set(M_prev):
        raise ValueError(f"column {j} is already active")
    if P is None:
        P = projector(X, M_prev)
    if w is None:
        w = P.pinv_t(np.asarray(s_prev, dtype=float))
    xj = X[:, j]
    denom = s - float(xj @ w)
    if abs(denom) <= DENOM_TOL:
        raise DegenerateDenominator(f"denominator {denom:.3e} for (j={j}, s={s})")
    return CVector(int(j), int(s), P.complement(xj) / denom)


def lars_h(c_js, c_k) -> np.ndarray:
    """c_k(j,s) with its c_k-component removed, rescaled; equals c_{k+1}(j,s)."""
    ratio = float(c_js @ c_k) / float(c_k @ c_k)
    return (c_js - ratio * c_k) / (1.0 - ratio)


def _candidates(X, M, s_M, p):
    """All defined (j, s, c) for j outside M."""
    P = projector(X, M)
    w = P.pinv_t(np.asarray(s_M, dtype=float))
    out = []
    for j in range(p):
        if j in M:
            continue
        xj = X[:, j]
        u = P.complement(xj)
        if np.linalg.norm(u) < 1e-10 * max(np.linalg.norm(xj), 1e-300):
            continue
        for s in (1, -1):
            denom = s - float(xj @ w)
            if abs(denom) <= DENOM_TOL:
                continue
            out.append((j, s, u / denom))
    return out


def lars_path(X, y, steps: int) -> LarsPath:
    """Run ``steps`` steps of LARS.

    At step k the entering pair is the one with the largest knot value
    c_k(j,s)^T y among competitors, those with value in [0, lambda_{k-1}].
    Exact ties go to the smaller index and then to s = +1.
    """
    X = as_array(X)
    y = np.asarray(y, dtype=float)
    n, p = X.shape
    if not 1 <= steps <= min(n - 1, p):
        raise ValueError(f"steps must lie in [1, {min(n - 1, p)}]")
    M, sM = [], []
    knots, entries, betas, resids, comps, excl = [], [], [], [], [], []
    beta = np.zeros(p)
    r = y.copy()
    lam_prev = np.inf
    for _ in range(steps):
        cands = _candidates(X, M, sM, p)
        if not cands:
            raise CollinearCandidate(f"every remaining column is collinear with {M}")
        vals = [float(c @ y) for _, _, c in cands]
        C = [(j, s) for (j, s, _), v in zip(cands, vals) if v <= lam_prev]
        D = [(j, s) for (j, s, _), v in zip(cands, vals) if v > lam_prev]
        best, best_val = None, -np.inf
        for (j, s, _), v in zip(cands, vals):
            if 0.0 <= v <= lam_prev and v > best_val:
                best, best_val = (j, s), v
        if best is None:
            raise NoFeasibleEntry(f"no candidate knot in [0, {lam_prev:.6g}] after {len(M)} steps")
        lam = best_val
        if M:
            # advance from the previous knot to this one along the LS direction
            step = projector(X, M).solve(r)
            beta = beta.copy()
            beta[M] += (1.0 - lam / lam_prev) * step
            r = y - X @ beta
        knots.append(lam)
        entries.append(best)
        betas.append(beta.copy())
        resids.append(r.copy())
        comps.append(tuple(C))
        excl.append(tuple(D))
        M.append(best[0])
        sM.append(best[1])
        lam_prev = lam
    return LarsPath(tuple(knots), tuple(entries), tuple(betas), tuple(resids),
                    tuple(comps), tuple(excl), X, y)


def next_knot(path: LarsPath) -> float:
    """The knot that step K+1 would produce, without extending the path."""
    K = len(path)
    cands = _candidates(path.X, list(path.active(K)), list(path.signs(K)), path.X.shape[1])
    lam_K = path.knots[-1]
    vals = [float(c @ path.y) for _, _, c in cands]
    feasible = [v for v in vals if 0.0 <= v <= lam_K]
    if not feasible:
        raise NoFeasibleEntry("no further knot")
    return max(feasible)


def s_plus_max(path: LarsPath, k: int, y=None) -> tuple[float, bool]:
    """c*_{k+1}: the largest c_{k+1}(j,s)^T y over the S_k^+ pairs.

    S_k^+ holds the pairs (j,s), j outside M_k, with
    c_k(j,s)^T c_k <= ||c_k||^2 and c_k(j,s)^T y <= c_k^T y.  Returns
    (value, nonempty); an empty set gives 0.
    """
    X = path.X
    y = path.y if y is None else np.asarray(y, dtype=float)
    p = X.shape[1]
    Mk1, sk1 = list(path.active(k - 1)), list(path.signs(k - 1))
    jk, _ = path.entries[k - 1]
    ck = path.c(k)
    ck_sq = float(ck @ ck)
    lam_k = float(ck @ y)
    nxt = {(j, s): c for j, s, c in _candidates(X, Mk1 + [jk], list(sk1) + [path.entries[k - 1][1]], p)}
    best, found = -np.inf, False
    for j, s, c in _candidates(X, Mk1, sk1, p):
        if j == jk:
            continue
        if float(c @ ck) <= ck_sq * (1.0 + INNER_TOL) and float(c @ y) <= lam_k:
            if (j, s) not in nxt:
                continue
            found = True
            best = max(best, float(nxt[(j, s)] @ y))
    return (best, True) if found else (0.0, False)


def lars_polyhedron(path: LarsPath, k: int, mode: str = "reduced") -> Polyhedron:
    """Selection polyhedron after k LARS steps.

    ``reduced``: the k+1 rows c_1'y >= ... >= c_k'y >= 0 and
    c_k'y >= c*_{k+1}, the last offset evaluated at the observed y.

    ``exact``: every step l <= k contributes the competitor rows
    (c_l(j,s) <= lambda_{l-1} on C_l, >= on D_l, the entering pair beating the
    other competitors, nonnegative knot) plus the same comparisons regrouped by
    the sign of 1 - c_l(j,s)'c_l / ||c_l||^2.  All offsets are zero, so this is
    the event {same M_l, s_l, C_l for l <= k} as a set of y.
    """
    if mode not in ("reduced", "exact"):
        raise ValueError("mode must be 'reduced' or 'exact'")
    if not 1 <= k <= len(path):
        raise ValueError(f"k must lie in [1, {len(path)}]")
    X = path.X
    n = X.shape[0]
    cs = [path.c(l) for l in range(1, k + 1)]
    if mode == "reduced":
        rows = [-cs[l] + cs[l + 1] for l in range(k - 1)]
        rows += [-cs[k - 1], -cs[k - 1]]
        cstar, _ = s_plus_max(path, k)
        b = np.zeros(k + 1)
        b[k] = -cstar
        tags = ("lars-order",) * (k - 1) + ("lars-nonneg", "lars-next")
        return Polyhedron(np.array(rows), b, tags)

    rows, tags = [], []
    p = X.shape[1]
    for l in range(1, k + 1):
        M, sM = list(path.active(l - 1)), list(path.signs(l - 1))
        cl = cs[l - 1]
        cl_sq = float(cl @ cl)
        jl, sl = path.entries[l - 1]
        prev = cs[l - 2] if l >= 2 else None
        cand = {(j, s): c for j, s, c in _candidates(X, M, sM, p)}
        nxt = {(j, s): c for j, s, c in _candidates(X, M + [jl], sM + [sl], p)}
        for pair in path.competitors[l - 1]:
            c = cand[pair]
            if prev is not None:
                rows.append(c - prev)
                tags.append(f"lars-compete-{l}")
            if pair == (jl, sl):
                continue
            rows.append(c - cl)
            tags.append(f"lars-beat-{l}")
            if pair[0] == jl:
                continue
            ratio = float(c @ cl) / cl_sq
            if abs(ratio - 1.0) <= INNER_TOL:
                continue
            if pair in nxt:
                h = nxt[pair]
                rows.append(h - cl if ratio < 1.0 else cl - h)
                tags.append(f"lars-s{'plus' if ratio < 1.0 else 'minus'}-{l}")
        for pair in path.excluded[l - 1]:
            rows.append(prev - cand[pair])
            tags.append(f"lars-exclude-{l}")
        rows.append(-cl)
        tags.append(f"lars-nonneg-{l}")
    A = np.array(rows) if rows else np.zeros((0, n))
    return Polyhedron(A, np.zeros(A.shape[0]), tuple(tags))
