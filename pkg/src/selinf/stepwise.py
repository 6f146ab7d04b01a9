"""Forward stepwise regression and its selection polyhedron."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CollinearCandidate
from .linmodel import as_array, projector
from .polytope import Polyhedron

# Candidates whose residualised column is shorter than this (relative to the
# raw column) are skipped.
COLLINEAR_TOL = 1e-10


@dataclass(frozen=True)
class FSPath:
    order: tuple
    signs: tuple
    residuals: tuple
    rss: tuple

    def __len__(self):
        return len(self.order)


def _residualised(X, P, j):
    u = P.complement(X[:, j])
    norm = float(np.linalg.norm(u))
    if norm < COLLINEAR_TOL * max(float(np.linalg.norm(X[:, j])), 1e-300):
        return u, 0.0
    return u, norm


def fs_path(X, y, steps: int) -> FSPath:
    """Greedy forward selection for ``steps`` steps.

    Each step adds the column whose residualised version has the largest
    absolute correlation with the current residual, which is the column
    giving the largest drop in RSS.  Exact ties go to the smaller index.
    """
    X = as_array(X)
    y = np.asarray(y, dtype=float)
    n, p = X.shape
    if not 1 <= steps <= min(n - 1, p):
        raise ValueError(f"steps must lie in [1, {min(n - 1, p)}]")
    order, signs = [], []
    r = y.copy()
    residuals, rss = [r], [float(r @ r)]
    for _ in range(steps):
        P = projector(X, order)
        best, best_score, best_sign = None, -1.0, 0
        for j in range(p):
            if j in order:
                continue
            u, norm = _residualised(X, P, j)
            if norm == 0.0:
                continue
            corr = float(u @ y)
            score = abs(corr) / norm
            if score > best_score:
                best, best_score, best_sign = j, score, 1 if corr >= 0 else -1
        if best is None:
            raise CollinearCandidate(f"every remaining column is collinear with {order}")
        order.append(best)
        signs.append(best_sign)
        r = projector(X, order).complement(y)
        residuals.append(r)
        rss.append(float(r @ r))
    return FSPath(tuple(order), tuple(signs), tuple(residuals), tuple(rss))


def fs_polyhedron(X, path: FSPath, m: int) -> Polyhedron:
    """{y : forward stepwise picks the same first m columns with the same signs}.

    For step k and each column j not yet selected, two rows require the
    signed normalised correlation of the chosen column to dominate
    +/- that of column j.  2pm - m^2 - m rows in total.
    """
    X = as_array(X)
    n, p = X.shape
    if not 1 <= m <= len(path):
        raise ValueError(f"m must lie in [1, {len(path)}]")
    rows, tags = [], []
    for k in range(m):
        P = projector(X, path.order[:k])
        u, norm = _residualised(X, P, path.order[k])
        chosen = path.signs[k] * u / norm
        selected = set(path.order[: k + 1])
        for j in range(p):
            if j in selected:
                continue
            v, vnorm = _residualised(X, P, j)
            if vnorm == 0.0:
                continue
            v = v / vnorm
            rows += [v - chosen, -v - chosen]
            tags += [f"fs-step-{k + 1}"] * 2
    A = np.array(rows) if rows else np.zeros((0, n))
    return Polyhedron(A, np.zeros(A.shape[0]), tuple(tags))


def r_stat(path: FSPath, k: int, sigma: float) -> float:
    """Drop in RSS at step k divided by sigma^2."""
    if not 1 <= k <= len(path):
        raise ValueError(f"k must lie in [1, {len(path)}]")
    if not sigma > 0:
        raise ValueError("sigma must be positive")
    return max(path.rss[k - 1] - path.rss[k], 0.0) / sigma**2
