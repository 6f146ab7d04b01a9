"""Dense linear-model primitives.

Everything here goes through a thin QR factorization of the selected
columns; no normal-equation inverse is ever formed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.linalg

from .errors import SingularDesign, ZeroVarianceColumn

# Columns of X_M are treated as dependent when the smallest singular value of
# X_M falls below RANK_TOL times the largest.
RANK_TOL = 1e-10


@dataclass(frozen=True)
class DesignMatrix:
    """An n x p design with the centering/scaling that produced it.

    ``column_norms`` holds the factors each centered column was divided by
    (all ones when ``normalized`` is False), and ``column_means`` the means
    that were removed, so fitted coefficients can be mapped back to the
    original scale with :meth:`unscale`.
    """

    data: np.ndarray
    column_norms: np.ndarray
    centered: bool = False
    normalized: bool = False
    column_means: np.ndarray | None = None

    def __post_init__(self):
        data = np.asarray(self.data, dtype=float)
        if data.ndim != 2:
            raise ValueError("design must be a 2-d array")
        n, p = data.shape
        if n < 1 or p < 1:
            raise ValueError("design needs n >= 1 and p >= 1")
        if not np.all(np.isfinite(data)):
            raise ValueError("design contains non-finite entries")
        norms = np.asarray(self.column_norms, dtype=float)
        if norms.shape != (p,) or np.any(norms <= 0):
            raise ValueError("column_norms must be p positive reals")
        data.setflags(write=False)
        norms.setflags(write=False)
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "column_norms", norms)

    @classmethod
    def from_array(cls, X) -> "DesignMatrix":
        X = np.asarray(X, dtype=float)
        return cls(X, np.ones(X.shape[1]))

    @property
    def shape(self):
        return self.data.shape

    @property
    def n(self) -> int:
        return self.data.shape[0]

    @property
    def p(self) -> int:
        return self.data.shape[1]

    def unscale(self, beta) -> np.ndarray:
        """Map coefficients fitted on this design back to the raw columns."""
        return np.asarray(beta, dtype=float) / self.column_norms


def as_array(X) -> np.ndarray:
    if isinstance(X, DesignMatrix):
        return X.data
    return np.asarray(X, dtype=float)


def standardize(X, y, normalize: bool = True) -> tuple[DesignMatrix, np.ndarray]:
    """Center the columns of ``X`` and ``y``; optionally give X unit-norm columns.

    ``y`` is centered but never rescaled.
    """
    X = np.array(X, dtype=float)
    y = np.array(y, dtype=float)
    if X.ndim != 2:
        raise ValueError("X must be 2-d")
    n, p = X.shape
    if n < 2:
        raise ValueError("need at least two observations")
    if y.shape != (n,):
        raise ValueError(f"y has shape {y.shape}, expected ({n},)")
    means = X.mean(axis=0)
    Xc = X - means
    yc = y - y.mean()
    norms = np.ones(p)
    if normalize:
        raw = np.sqrt(np.sum(Xc**2, axis=0))
        scale = np.max(np.abs(X), axis=0)
        for j in range(p):
            # a constant column leaves only rounding noise after centering
            if raw[j] <= 1e-12 * max(scale[j], 1.0) * np.sqrt(n):
                raise ZeroVarianceColumn(j)
        norms = raw
        Xc = Xc / norms
    return DesignMatrix(Xc, norms, centered=True, normalized=normalize, column_means=means), yc


@dataclass(frozen=True)
class Projector:
    """Cached thin QR factor of ``X[:, M]``.

    With ``M`` empty the projector is the zero map and its complement is the
    identity.
    """

    M: tuple
    Q: np.ndarray
    R: np.ndarray
    n: int = field(default=0)

    @property
    def m(self) -> int:
        return len(self.M)

    def project(self, v) -> np.ndarray:
        v = np.asarray(v, dtype=float)
        if self.m == 0:
            return np.zeros_like(v)
        return self.Q @ (self.Q.T @ v)

    def complement(self, v) -> np.ndarray:
        v = np.asarray(v, dtype=float)
        return v - self.project(v)

    def solve(self, y) -> np.ndarray:
        """Least-squares coefficients of ``y`` on the columns ``M``."""
        if self.m == 0:
            return np.zeros(0)
        return scipy.linalg.solve_triangular(self.R, self.Q.T @ np.asarray(y, dtype=float))

    def gram_solve(self, s) -> np.ndarray:
        """(X_M^T X_M)^{-1} s."""
        if self.m == 0:
            return np.zeros(0)
        w = scipy.linalg.solve_triangular(self.R, np.asarray(s, dtype=float), trans="T")
        return scipy.linalg.solve_triangular(self.R, w)

    def pinv_t(self, s) -> np.ndarray:
        """(X_M^+)^T s = X_M (X_M^T X_M)^{-1} s, an n-vector."""
        if self.m == 0:
            return np.zeros(self.n)
        w = scipy.linalg.solve_triangular(self.R, np.asarray(s, dtype=float), trans="T")
        return self.Q @ w


def projector(X, M: Sequence[int], rank_tol: float = RANK_TOL) -> Projector:
    X = as_array(X)
    M = tuple(int(j) for j in M)
    n = X.shape[0]
    if not M:
        return Projector((), np.zeros((n, 0)), np.zeros((0, 0)), n)
    if len(set(M)) != len(M):
        raise SingularDesign(f"repeated column in {M}")
    XM = X[:, list(M)]
    if XM.shape[1] > n:
        raise SingularDesign(f"{XM.shape[1]} columns exceed n={n}")
    Q, R = np.linalg.qr(XM)
    sv = np.linalg.svd(R, compute_uv=False)
    if sv[0] == 0 or sv[-1] <= rank_tol * sv[0]:
        raise SingularDesign(f"columns {list(M)} are numerically dependent")
    return Projector(M, Q, R, n)


def least_squares(X_M, y) -> np.ndarray:
    """Coefficients minimizing ||y - X_M beta||^2 for a full-column-rank X_M."""
    X_M = as_array(X_M)
    return projector(X_M, range(X_M.shape[1])).solve(y)


def project(M: Sequence[int], X, v, complement: bool = False) -> np.ndarray:
    P = projector(X, M)
    return P.complement(v) if complement else P.project(v)


def pinv_transpose_apply(M: Sequence[int], X, s) -> np.ndarray:
    return projector(X, M).pinv_t(s)


def rss(X, M: Sequence[int], y) -> float:
    r = projector(X, M).complement(y)
    return float(r @ r)
