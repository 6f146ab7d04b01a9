"""Selective p-values and intervals, the significance test and the spacing test."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import MissingNextKnot, ModelNotNested, OutsideRegion
from .lars import LarsPath, s_plus_max
from .lasso import lasso_fit
from .linmodel import as_array, projector
from .polytope import TruncationRegion, _json_float
from .truncnorm import TruncatedGaussian, tn_root_mu, tn_sf

P_FLOOR = 1e-300


def _clip_p(p: float) -> float:
    return float(min(max(p, P_FLOOR), 1.0))


@dataclass(frozen=True)
class InferenceReport:
    statistic: float
    eta: np.ndarray = field(repr=False)
    scale: float
    region: TruncationRegion
    p_value: float
    ci: tuple
    method: str
    k: int | None = None
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = {
            "method": self.method,
            "statistic": float(self.statistic),
            "scale": float(self.scale),
            "region": self.region.to_dict() if self.region is not None else None,
            "p_value": float(self.p_value),
            "ci": [_json_float(self.ci[0]), _json_float(self.ci[1])] if self.ci else None,
        }
        if self.k is not None:
            out["k"] = int(self.k)
        out.update(self.extra)
        return out


def _stat_scale(y_obs, eta, sigma):
    eta = np.asarray(eta, dtype=float)
    return float(eta @ np.asarray(y_obs, dtype=float)), sigma * float(np.linalg.norm(eta))


def _check_inside(stat, region):
    if not region.contains(stat, tol=1e-9 * (1.0 + abs(stat))):
        raise OutsideRegion(f"statistic {stat:.6g} lies outside {region.intervals}")


def selective_pvalue(y_obs, eta, sigma: float, region: TruncationRegion,
                     mu0: float = 0.0, sided: str = "two") -> float:
    """Truncated-Gaussian p-value for H0: eta^T mu = mu0.

    ``sided="one"`` gives the upper-tail survivor; ``"two"`` doubles the
    smaller tail.
    """
    if sided not in ("one", "two"):
        raise ValueError("sided must be 'one' or 'two'")
    stat, scale = _stat_scale(y_obs, eta, sigma)
    _check_inside(stat, region)
    upper = tn_sf(stat, TruncatedGaussian(mu0, scale, region))
    if sided == "one":
        return _clip_p(upper)
    return _clip_p(2.0 * min(upper, 1.0 - upper))


def selective_ci(y_obs, eta, sigma: float, region: TruncationRegion, alpha: float = 0.05,
                 max_width: float = 50.0) -> tuple[float, float]:
    """Interval [L, U] of means whose truncated CDF at the statistic lies in
    [alpha/2, 1 - alpha/2].

    ``max_width`` bounds the root search to statistic +/- max_width scales.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie in (0, 1)")
    stat, scale = _stat_scale(y_obs, eta, sigma)
    _check_inside(stat, region)
    lo = tn_root_mu(stat, 1.0 - alpha / 2.0, region, scale, max_width=max_width)
    hi = tn_root_mu(stat, alpha / 2.0, region, scale, max_width=max_width)
    return lo, hi


def selective_inference(y_obs, eta, sigma, region, alpha=0.05, mu0=0.0,
                        method="polyhedral", k=None, max_width=50.0, **extra) -> InferenceReport:
    stat, scale = _stat_scale(y_obs, eta, sigma)
    p = selective_pvalue(y_obs, eta, sigma, region, mu0=mu0)
    ci = selective_ci(y_obs, eta, sigma, region, alpha, max_width=max_width)
    return InferenceReport(stat, np.asarray(eta, float), scale, region, p, ci, method, k, extra)


def coefficient_direction(X, M, j_pos: int) -> np.ndarray:
    """eta with eta^T y the least-squares coefficient of the j_pos-th column of M."""
    e = np.zeros(len(M))
    e[j_pos] = 1.0
    return projector(X, M).pinv_t(e)


def omega(X, M_prev, s_prev, M_cur, s_cur) -> float:
    """|| (X_Mk^+)^T s_Mk - (X_Mk-1^+)^T s_Mk-1 ||_2."""
    X = as_array(X)
    if not (set(M_prev) < set(M_cur) and len(M_cur) == len(M_prev) + 1):
        raise ModelNotNested(f"{M_prev} is not M_cur minus one column: {M_cur}")
    cur = projector(X, M_cur).pinv_t(np.asarray(s_cur, dtype=float))
    prev = projector(X, M_prev).pinv_t(np.asarray(s_prev, dtype=float))
    return float(np.linalg.norm(cur - prev))


def path_omega(path: LarsPath, k: int) -> float:
    return omega(path.X, path.active(k - 1), path.signs(k - 1), path.active(k), path.signs(k))


def significance_test(path: LarsPath, k: int, sigma: float, mode: str = "closed_form") -> float:
    """Covariance-gain statistic for the k-th variable to enter.

    ``closed_form`` uses omega_k^2 lambda_k (lambda_k - lambda_{k+1}) / sigma^2.
    ``direct`` refits the Lasso at lambda_{k+1} on all columns and on M_{k-1}
    and differences the inner products <y, X beta>.
    """
    if mode not in ("closed_form", "direct"):
        raise ValueError("mode must be 'closed_form' or 'direct'")
    if not 1 <= k < len(path):
        raise MissingNextKnot(f"need lambda_{k + 1}; path has {len(path)} knots")
    lam_k, lam_next = path.knots[k - 1], path.knots[k]
    if mode == "closed_form":
        w = path_omega(path, k)
        return w * w * lam_k * (lam_k - lam_next) / sigma**2
    X, y = path.X, path.y
    full = lasso_fit(X, y, lam_next)
    M_k, s_k = path.active(k), path.signs(k)
    if sorted(zip(full.active, full.signs)) != sorted(zip(M_k, s_k)):
        raise ModelNotNested(
            f"Lasso support at lambda_{k + 1} is {full.active}, not the LARS set {M_k}"
        )
    fit_full = float(y @ (X @ full.beta_hat))
    M_prev = list(path.active(k - 1))
    fit_prev = 0.0
    if M_prev:
        restricted = lasso_fit(X[:, M_prev], y, lam_next)
        got = sorted((M_prev[i], s) for i, s in zip(restricted.active, restricted.signs))
        if got != sorted(zip(M_prev, path.signs(k - 1))):
            raise ModelNotNested(f"restricted Lasso on {M_prev} changed support or signs")
        fit_prev = float(y @ (X[:, M_prev] @ restricted.beta_hat))
    return (fit_full - fit_prev) / sigma**2


def significance_pvalue(T: float, r: int = 1) -> float:
    """Survival of Exp(1/r) (mean 1/r) at T.

    Only r = 1 is calibrated at finite samples; larger r are asymptotic.
    """
    if r < 1:
        raise ValueError("r must be a positive integer")
    if r > 1:
        warnings.warn("Exp(1/r) null for r > 1 is asymptotic only", stacklevel=2)
    return _clip_p(math.exp(-r * max(T, 0.0)))


def spacing_test(path: LarsPath, k: int, sigma: float, variant: str = "exact") -> tuple[float, float]:
    """Spacing statistic for the k-th LARS step and its two-sided p-value.

    The statistic is the upper-tail probability of lambda_k under a centred
    Gaussian with scale sigma / omega_k truncated to [lower, lambda_{k-1}],
    where lower is c*_{k+1}^T y (exact) or lambda_{k+1} (simplified) and
    lambda_0 = +inf.
    """
    T = _spacing(path, k, sigma, variant)[0]
    return T, _clip_p(2.0 * min(T, 1.0 - T))


def _spacing(path: LarsPath, k: int, sigma: float, variant: str):
    if variant not in ("exact", "simplified"):
        raise ValueError("variant must be 'exact' or 'simplified'")
    if not 1 <= k <= len(path):
        raise ValueError(f"k must lie in [1, {len(path)}]")
    w = path_omega(path, k)
    upper = path.knot(k - 1)
    lam_k = path.knots[k - 1]
    if variant == "exact":
        lower, _ = s_plus_max(path, k)
    else:
        if k >= len(path):
            raise MissingNextKnot(f"simplified spacing at k={k} needs lambda_{k + 1}")
        lower = path.knots[k]
    lower = min(lower, lam_k)
    region = TruncationRegion(((lower, upper),), method=f"spacing_{variant}")
    T = tn_sf(lam_k, TruncatedGaussian(0.0, sigma / w, region))
    return min(max(T, 0.0), 1.0), region, w


def spacing_report(path: LarsPath, k: int, sigma: float, variant: str = "exact",
                   alpha: float = 0.05, max_width: float = 50.0) -> InferenceReport:
    T, region, w = _spacing(path, k, sigma, variant)
    eta = path.c(k)
    lam_k = path.knots[k - 1]
    scale = sigma / w
    lo = tn_root_mu(lam_k, 1.0 - alpha / 2.0, region, scale, max_width=max_width)
    hi = tn_root_mu(lam_k, alpha / 2.0, region, scale, max_width=max_width)
    j, s = path.entries[k - 1]
    return InferenceReport(
        lam_k, eta, scale, region, _clip_p(2.0 * min(T, 1.0 - T)), (lo, hi),
        f"spacing_{variant}", k,
        {"spacing_statistic": float(T), "omega": float(w), "variable": int(j), "sign": int(s)},
    )


def estimate_sigma(X, y) -> float:
    """sqrt(RSS / (n - p)) from the full least-squares fit.

    Exactness of every test here assumes sigma is known; a plug-in estimate
    only approximates that.
    """
    X = as_array(X)
    n, p = X.shape
    if n <= p + 1:
        raise ValueError("need n > p + 1 to estimate sigma")
    r = projector(X, range(p)).complement(np.asarray(y, dtype=float))
    return math.sqrt(float(r @ r) / (n - p))
