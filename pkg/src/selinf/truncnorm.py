"""Gaussian distributions truncated to a finite union of intervals.

Interval masses are kept in log space.  For an interval on one side of the
mean, the mass is a difference of two upper-tail probabilities; it is
formed as Q(a) * (1 - Q(b)/Q(a)) when the ratio is small, and by
Gauss-Legendre quadrature of the scaled density when the interval is so
narrow that the subtraction would cancel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import special

from .errors import BracketFailure, DegenerateMass

_SQRT2 = math.sqrt(2.0)
_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(32)


def _as_intervals(region) -> tuple[tuple[float, float], ...]:
    if hasattr(region, "intervals"):
        return tuple(region.intervals)
    region = tuple(region)
    if len(region) == 2 and np.isscalar(region[0]):
        return ((float(region[0]), float(region[1])),)
    return tuple((float(a), float(b)) for a, b in region)


@dataclass(frozen=True)
class TruncatedGaussian:
    """N(mu, sigma^2) conditioned to lie in ``region``.

    ``region`` is anything with an ``intervals`` attribute, a single
    ``(a, b)`` pair, or a sequence of pairs.
    """

    mu: float
    sigma: float
    region: object

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValueError("sigma must be positive")
        ivs = _as_intervals(self.region)
        if not ivs:
            raise DegenerateMass("empty truncation region")
        object.__setattr__(self, "region", ivs)

    @property
    def intervals(self):
        return self.region

    def log_masses(self) -> np.ndarray:
        return np.array([_log_mass(*self._std(a, b)) for a, b in self.region])

    def _std(self, a, b):
        return (a - self.mu) / self.sigma, (b - self.mu) / self.sigma

    def log_split(self, x: float) -> tuple[float, float]:
        """Log of the truncated mass to the left and to the right of ``x``."""
        if math.isnan(x):
            raise ValueError("x is NaN")
        left, right = [], []
        for a, b in self.region:
            if x >= b:
                left.append(_log_mass(*self._std(a, b)))
            elif x <= a:
                right.append(_log_mass(*self._std(a, b)))
            else:
                left.append(_log_mass(*self._std(a, x)))
                right.append(_log_mass(*self._std(x, b)))
        return _logsumexp(left), _logsumexp(right)

    def cdf(self, x: float) -> float:
        return tn_cdf(x, self)

    def sf(self, x: float) -> float:
        return tn_sf(x, self)


def _logsumexp(values: Sequence[float]) -> float:
    vals = [v for v in values if v > -np.inf]
    if not vals:
        return -np.inf
    top = max(vals)
    return top + math.log(sum(math.exp(v - top) for v in vals))


def _log_upper_tail(t: float) -> float:
    """log P(Z > t)."""
    return float(special.log_ndtr(-t))


def _log_mass(alpha: float, beta: float) -> float:
    """log P(alpha <= Z <= beta) for standard normal Z."""
    if not alpha < beta:
        return -np.inf
    if alpha < 0.0 < beta:
        # both erf terms are positive, so no cancellation
        val = 0.5 * (_erf_pos(beta) + _erf_pos(-alpha))
        return math.log(val)
    if beta <= 0.0:
        alpha, beta = -beta, -alpha
    # now 0 <= alpha < beta <= inf
    la = _log_upper_tail(alpha)
    if beta == np.inf:
        return la
    lb = _log_upper_tail(beta)
    ratio = math.exp(lb - la)
    if ratio < 0.5:
        return la + math.log1p(-ratio)
    return _log_narrow_mass(alpha, beta)


def _erf_pos(t: float) -> float:
    # erf(t / sqrt 2) for t >= 0, = P(-t <= Z <= t)
    if t == np.inf:
        return 1.0
    return float(special.erf(t / _SQRT2))


def _log_narrow_mass(alpha: float, beta: float) -> float:
    """log int_alpha^beta phi for 0 <= alpha < beta with alpha*(beta-alpha) = O(1).

    phi(alpha + u) / phi(alpha) = exp(-u*alpha - u^2/2) is smooth on [0, delta]
    in this regime, so a fixed Gauss-Legendre rule is exact to rounding.
    """
    delta = beta - alpha
    u = 0.5 * delta * (_GL_NODES + 1.0)
    integrand = np.exp(-u * alpha - 0.5 * u * u)
    integral = 0.5 * delta * float(_GL_WEIGHTS @ integrand)
    log_phi_alpha = -0.5 * alpha * alpha - _LOG_SQRT_2PI
    return log_phi_alpha + math.log(integral)


def _log_total(tg: TruncatedGaussian) -> float:
    total = _logsumexp(tg.log_masses())
    if not np.isfinite(total):
        raise DegenerateMass(f"truncation region {tg.region} carries no mass under mu={tg.mu}")
    return total


def tn_cdf(x: float, tg: TruncatedGaussian) -> float:
    """P(X <= x) for X ~ tg.  Flat across gaps between intervals."""
    left, right = tg.log_split(x)
    total = _logsumexp([left, right])
    if not np.isfinite(total):
        raise DegenerateMass(f"truncation region {tg.region} carries no mass under mu={tg.mu}")
    if left == -np.inf:
        return 0.0
    if right == -np.inf:
        return 1.0
    # take the smaller side directly and complement the larger
    if left <= right:
        return math.exp(left - total)
    return -math.expm1(right - total)


def tn_sf(x: float, tg: TruncatedGaussian) -> float:
    """P(X >= x); accurate when small."""
    left, right = tg.log_split(x)
    total = _logsumexp([left, right])
    if not np.isfinite(total):
        raise DegenerateMass(f"truncation region {tg.region} carries no mass under mu={tg.mu}")
    if right == -np.inf:
        return 0.0
    if left == -np.inf:
        return 1.0
    if right <= left:
        return math.exp(right - total)
    return -math.expm1(left - total)


def tn_logsf(x: float, tg: TruncatedGaussian) -> float:
    left, right = tg.log_split(x)
    return right - _logsumexp([left, right])


def _finite_bounds(a: float, b: float, mu: float, sigma: float) -> tuple[float, float]:
    # replace infinite ends by points carrying negligible mass beyond them
    if a == -np.inf:
        a = min(b, mu) - 40.0 * sigma if b < np.inf else mu - 40.0 * sigma
    if b == np.inf:
        b = max(a, mu) + 40.0 * sigma
    return a, b


def tn_quantile(p: float, tg: TruncatedGaussian, tol: float = 1e-12) -> float:
    """Inverse of :func:`tn_cdf` by bisection within the covering interval."""
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    ivs = tg.region
    if p == 0.0:
        return ivs[0][0]
    if p == 1.0:
        return ivs[-1][1]
    logm = tg.log_masses()
    total = _logsumexp(logm)
    if not np.isfinite(total):
        raise DegenerateMass(f"truncation region {tg.region} carries no mass under mu={tg.mu}")
    cum = np.cumsum(np.exp(logm - total))
    i = int(min(np.searchsorted(cum, p), len(ivs) - 1))
    lo, hi = _finite_bounds(ivs[i][0], ivs[i][1], tg.mu, tg.sigma)
    # compare on whichever side of the distribution is small
    if p <= 0.5:
        g = lambda x: tn_cdf(x, tg) - p  # noqa: E731
    else:
        g = lambda x: (1.0 - p) - tn_sf(x, tg)  # noqa: E731
    for _ in range(400):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        gm = g(mid)
        if gm == 0.0:
            return mid
        if gm < 0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= tol * max(1.0, abs(mid)) * 1e-3:
            break
    return 0.5 * (lo + hi)


def tn_root_mu(
    x: float,
    target: float,
    region,
    sigma: float,
    max_width: float = 50.0,
    ftol: float = 1e-10,
) -> float:
    """The mu with F_mu(x) = target, where F_mu is the truncated CDF.

    F_mu(x) strictly decreases in mu, so the root is unique.  The bracket
    grows from x +/- sigma by doubling up to x +/- max_width * sigma.
    """
    if not 0.0 < target < 1.0:
        raise ValueError("target must lie in (0, 1)")
    ivs = _as_intervals(region)

    def F(mu):
        tg = TruncatedGaussian(mu, sigma, ivs)
        if target > 0.5:
            return 1.0 - tn_sf(x, tg)
        return tn_cdf(x, tg)

    def resid(mu):
        # decreasing in mu; positive means mu is too small
        tg = TruncatedGaussian(mu, sigma, ivs)
        if target > 0.5:
            return (1.0 - target) - tn_sf(x, tg)
        return tn_cdf(x, tg) - target

    width = 1.0
    lo, hi = x - sigma, x + sigma
    r_lo, r_hi = resid(lo), resid(hi)
    while not (r_lo > 0 and r_hi < 0):
        if width >= max_width:
            raise BracketFailure(
                f"no root of F_mu({x:.6g}) = {target:.6g} for mu within x +/- {max_width:g} sigma "
                f"(F={F(lo):.3e} at mu={lo:.6g}, F={F(hi):.3e} at mu={hi:.6g})",
                lo, hi, F(lo), F(hi),
            )
        width = min(2.0 * width, max_width)
        if r_lo <= 0:
            lo = x - width * sigma
            r_lo = resid(lo)
        if r_hi >= 0:
            hi = x + width * sigma
            r_hi = resid(hi)
    for _ in range(300):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        r = resid(mid)
        if abs(r) <= ftol and hi - lo <= 1e-12 * max(1.0, abs(mid)):
            return mid
        if r > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
