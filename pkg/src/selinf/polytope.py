"""Polyhedral selection events and their one-dimensional slices.

A selection event {A y <= b} intersected with the line y = z + c t, where
c = eta / ||eta||^2 and z = y - c eta^T y, is an interval in t.  With
Sigma = sigma^2 I the direction c does not depend on sigma, and z is
independent of eta^T y.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Hashable, Sequence

import numpy as np

from .errors import InfeasibleAtObservation, NoFeasibleComponent, SelectorFailure

# (Ac)_j is treated as zero below this multiple of ||A_j|| ||c||.
ZERO_TOL = 1e-10
FEASIBILITY_TOL = 1e-7


@dataclass(frozen=True)
class Polyhedron:
    """The set {y : A y <= b} with one provenance tag per row."""

    A: np.ndarray
    b: np.ndarray
    row_tags: tuple = ()

    def __post_init__(self):
        A = np.atleast_2d(np.asarray(self.A, dtype=float))
        b = np.asarray(self.b, dtype=float).reshape(-1)
        if A.shape[0] != b.shape[0]:
            raise ValueError(f"A has {A.shape[0]} rows but b has {b.shape[0]} entries")
        if not (np.all(np.isfinite(A)) and np.all(np.isfinite(b))):
            raise ValueError("polyhedron has non-finite entries")
        tags = tuple(self.row_tags) if self.row_tags else ("",) * A.shape[0]
        if len(tags) != A.shape[0]:
            raise ValueError("need one tag per row")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "row_tags", tags)

    @property
    def n_rows(self) -> int:
        return self.A.shape[0]

    @property
    def dim(self) -> int:
        return self.A.shape[1]

    def slack(self, y) -> np.ndarray:
        """b - A y; nonnegative entries mean the row is satisfied."""
        return self.b - self.A @ np.asarray(y, dtype=float)

    def contains(self, y, tol: float = 1e-9) -> bool:
        if self.n_rows == 0:
            return True
        return bool(np.all(self.slack(y) >= -tol))

    @classmethod
    def stack(cls, polys: Sequence["Polyhedron"]) -> "Polyhedron":
        return cls(
            np.vstack([P.A for P in polys]),
            np.concatenate([P.b for P in polys]),
            sum((P.row_tags for P in polys), ()),
        )


@dataclass(frozen=True)
class TruncationRegion:
    """A sorted union of disjoint closed intervals for eta^T y."""

    intervals: tuple
    nu0_ok: bool = True
    eta: np.ndarray | None = None
    z0: np.ndarray | None = None
    nu0: float = np.inf
    method: str = "polyhedral"

    def __post_init__(self):
        ivs = tuple((float(a), float(b)) for a, b in self.intervals)
        for a, b in ivs:
            if a > b:
                raise ValueError(f"empty interval [{a}, {b}]")
        for (_, b0), (a1, _) in zip(ivs, ivs[1:]):
            if a1 <= b0:
                raise ValueError("intervals must be disjoint and sorted")
        object.__setattr__(self, "intervals", ivs)

    @classmethod
    def whole_line(cls) -> "TruncationRegion":
        return cls(((-np.inf, np.inf),))

    @property
    def lower(self) -> float:
        return self.intervals[0][0]

    @property
    def upper(self) -> float:
        return self.intervals[-1][1]

    def contains(self, x: float, tol: float = 0.0) -> bool:
        return any(a - tol <= x <= b + tol for a, b in self.intervals)

    def clip(self, lo: float, hi: float) -> "TruncationRegion":
        out = [(max(a, lo), min(b, hi)) for a, b in self.intervals if b >= lo and a <= hi]
        return TruncationRegion(tuple(out), self.nu0_ok, self.eta, self.z0, self.nu0, self.method)

    def to_dict(self) -> dict:
        return {
            "intervals": [[_json_float(a), _json_float(b)] for a, b in self.intervals],
            "nu0": _json_float(self.nu0),
            "method": self.method,
        }


def _json_float(x: float):
    if np.isposinf(x):
        return "inf"
    if np.isneginf(x):
        return "-inf"
    return float(x)


def _direction(eta) -> tuple[np.ndarray, np.ndarray]:
    eta = np.asarray(eta, dtype=float)
    nn = float(eta @ eta)
    if not nn > 0:
        raise ValueError("eta must be nonzero")
    return eta, eta / nn


def _limits(poly: Polyhedron, eta, y_obs) -> tuple[float, float, float, np.ndarray]:
    eta, c = _direction(eta)
    y_obs = np.asarray(y_obs, dtype=float)
    z = y_obs - c * (eta @ y_obs)
    if poly.n_rows == 0:
        return -np.inf, np.inf, np.inf, z
    Ac = poly.A @ c
    resid = poly.b - poly.A @ z
    thresh = ZERO_TOL * np.linalg.norm(poly.A, axis=1) * np.linalg.norm(c)
    pos = Ac > thresh
    neg = Ac < -thresh
    zero = ~(pos | neg)
    upper = float(np.min(resid[pos] / Ac[pos])) if pos.any() else np.inf
    lower = float(np.max(resid[neg] / Ac[neg])) if neg.any() else -np.inf
    nu0 = float(np.min(resid[zero])) if zero.any() else np.inf
    return lower, upper, nu0, z


def slice(poly: Polyhedron, eta, sigma2: float, y_obs) -> TruncationRegion:
    """Intersect ``poly`` with the line through ``y_obs`` along eta.

    Returns the single interval [nu_minus, nu_plus].  ``sigma2`` only enters
    through c = Sigma eta / (eta^T Sigma eta), which is free of sigma for
    isotropic noise; it is validated and otherwise unused.
    """
    if not sigma2 > 0:
        raise ValueError("sigma2 must be positive")
    y_obs = np.asarray(y_obs, dtype=float)
    if poly.n_rows:
        slack = poly.slack(y_obs)
        worst = int(np.argmin(slack))
        if slack[worst] < -FEASIBILITY_TOL * (1.0 + abs(poly.b[worst])):
            raise InfeasibleAtObservation(
                f"row {worst} ({poly.row_tags[worst]}) violated by {-slack[worst]:.3e}"
            )
    lower, upper, nu0, z = _limits(poly, eta, y_obs)
    return TruncationRegion(((lower, upper),), nu0 >= -1e-9, np.asarray(eta, float), z, nu0)


def merge_intervals(intervals, tol: float = 0.0) -> list[tuple[float, float]]:
    ivs = sorted((float(a), float(b)) for a, b in intervals if a <= b)
    out: list[list[float]] = []
    for a, b in ivs:
        if out and a <= out[-1][1] + tol:
            out[-1][1] = max(out[-1][1], b)
        else:
            out.append([a, b])
    return [(a, b) for a, b in out]


def slice_union(polys: Sequence[Polyhedron], eta, sigma2: float, y_obs) -> TruncationRegion:
    """Union of the slices of several polyhedra, e.g. one per sign pattern.

    Slices with negative nu0 or nu_minus > nu_plus do not meet the line and
    are dropped.
    """
    if not sigma2 > 0:
        raise ValueError("sigma2 must be positive")
    eta = np.asarray(eta, dtype=float)
    y_obs = np.asarray(y_obs, dtype=float)
    pieces = []
    z = None
    for P in polys:
        lower, upper, nu0, z = _limits(P, eta, y_obs)
        if nu0 < -1e-9 or lower > upper:
            continue
        pieces.append((lower, upper))
    stat = float(eta @ y_obs)
    merged = merge_intervals(pieces)
    if not any(a - 1e-9 * (1 + abs(a)) <= stat <= b + 1e-9 * (1 + abs(b)) for a, b in merged):
        raise NoFeasibleComponent(f"no polyhedron contains the observation (eta'y={stat:.6g})")
    return TruncationRegion(tuple(merged), True, eta, z, 0.0)


def line_search_region(
    selector: Callable[[np.ndarray], Hashable],
    y_obs,
    eta,
    sigma2: float,
    span: float = 20.0,
    grid_points: int = 10_000,
    bisection_steps: int = 40,
) -> TruncationRegion:
    """Truncation region found by re-running ``selector`` along the line.

    The window is eta^T y_obs +/- span * sigma * ||eta||.  Runs of grid
    points reproducing the observed selection are kept and their interior
    endpoints refined by bisection.  Components narrower than the grid
    spacing can be missed; window edges are reported as is.
    """
    if grid_points < 100:
        raise ValueError("grid_points must be at least 100")
    if not sigma2 > 0:
        raise ValueError("sigma2 must be positive")
    eta, c = _direction(eta)
    y_obs = np.asarray(y_obs, dtype=float)
    stat = float(eta @ y_obs)
    z = y_obs - c * stat
    half = span * np.sqrt(sigma2) * np.linalg.norm(eta)

    def select(t):
        try:
            return selector(z + c * t)
        except Exception as exc:  # noqa: BLE001 - surfaced with context
            raise SelectorFailure(f"selector failed at t={t:.6g}: {exc}") from exc

    target = select(stat)
    grid = np.sort(np.append(np.linspace(stat - half, stat + half, grid_points), stat))
    grid_points = grid.size
    hit = np.array([select(t) == target for t in grid])

    def refine(inside, outside):
        for _ in range(bisection_steps):
            mid = 0.5 * (inside + outside)
            if select(mid) == target:
                inside = mid
            else:
                outside = mid
        return inside

    intervals = []
    i = 0
    while i < grid_points:
        if not hit[i]:
            i += 1
            continue
        j = i
        while j + 1 < grid_points and hit[j + 1]:
            j += 1
        a = grid[i] if i == 0 else refine(grid[i], grid[i - 1])
        b = grid[j] if j == grid_points - 1 else refine(grid[j], grid[j + 1])
        intervals.append((a, b))
        i = j + 1
    return TruncationRegion(tuple(merge_intervals(intervals)), True, eta, z, 0.0, "line-search")
