"""Monte Carlo calibration scenarios.

Every replicate draws from its own Philox stream spawned from the master
seed, so a report depends only on (scenario, parameters, seed) and not on
how replicates are spread over workers.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import stats

from .inference import spacing_test
from .lars import lars_path
from .linmodel import standardize
from .stepwise import fs_path, r_stat

SCENARIOS = ("null_orthonormal", "null_gaussian_design", "signal_prop1", "rss_drop")
ALPHA_GRID = (0.01, 0.05, 0.10)


@dataclass
class SimConfig:
    scenario: str
    n: int = 100
    p: int = 20
    N: int = 2000
    sigma: float = 1.0
    seed: int = 0
    k_star: int = 3
    signal: float | None = None
    workers: int | None = None

    def __post_init__(self):
        if self.scenario not in SCENARIOS:
            raise ValueError(f"unknown scenario {self.scenario!r}; choose from {SCENARIOS}")
        if self.N < 100:
            raise ValueError("N must be at least 100")
        if not self.sigma > 0:
            raise ValueError("sigma must be positive")
        if self.scenario in ("null_orthonormal", "rss_drop", "null_gaussian_design"):
            if self.n < self.p + 2:
                raise ValueError("need n >= p + 2")
        if self.scenario == "signal_prop1" and not 0 <= self.k_star < self.p:
            raise ValueError("need 0 <= k_star < p")


@dataclass
class SimReport:
    scenario: str
    config: dict
    statistics: list
    pvalues: list
    ks_statistic: float
    ks_pvalue: float
    reference: str
    size: dict
    qq: list = field(repr=False)
    mean: float = 0.0
    variance: float = 0.0
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)


def orthonormal_design(rng, n, p) -> np.ndarray:
    Q, _ = np.linalg.qr(rng.standard_normal((n, p)))
    return Q


def _streams(seed: int, N: int):
    return np.random.SeedSequence(seed).spawn(N)


def _replicate(cfg: SimConfig, ss: np.random.SeedSequence) -> tuple:
    rng = np.random.Generator(np.random.Philox(ss))
    n, p, sigma = cfg.n, cfg.p, cfg.sigma
    if cfg.scenario == "null_orthonormal":
        X = orthonormal_design(rng, n, p)
        y = sigma * rng.standard_normal(n)
        path = lars_path(X, y, 2)
        exact, _ = spacing_test(path, 1, sigma, "exact")
        simple, _ = spacing_test(path, 1, sigma, "simplified")
        return exact, simple
    if cfg.scenario == "null_gaussian_design":
        X, y = standardize(rng.standard_normal((n, p)), sigma * rng.standard_normal(n))
        path = lars_path(X, y, 2)
        exact, _ = spacing_test(path, 1, sigma, "exact")
        simple, _ = spacing_test(path, 1, sigma, "simplified")
        return exact, simple
    if cfg.scenario == "rss_drop":
        X = orthonormal_design(rng, n, p)
        y = sigma * rng.standard_normal(n)
        return (r_stat(fs_path(X, y, 1), 1, sigma),)
    # signal_prop1: with X^T X = I the sufficient statistic U = X^T y ~ N(beta*, sigma^2 I)
    signal = cfg.signal if cfg.signal is not None else 10.0 * sigma * math.sqrt(2.0 * math.log(p))
    beta = np.zeros(p)
    beta[: cfg.k_star] = signal
    U = beta + sigma * rng.standard_normal(p)
    a = np.abs(U)
    event_b = cfg.k_star == 0 or a[: cfg.k_star].min() > a[cfg.k_star:].max()
    knots = np.sort(a)[::-1]
    k = cfg.k_star + 1
    T = knots[k - 1] * (knots[k - 1] - knots[k]) / sigma**2
    return T, float(event_b)


def _run_chunk(args):
    cfg, seqs = args
    return [_replicate(cfg, ss) for ss in seqs]


def _worker_count(requested: int | None, N: int) -> int:
    cap = os.environ.get("SELINF_THREADS")
    n = requested or (int(cap) if cap else 1)
    if cap:
        n = min(n, int(cap))
    return max(1, min(n, os.cpu_count() or 1, N // 50 or 1))


def run_replicates(cfg: SimConfig) -> np.ndarray:
    seqs = _streams(cfg.seed, cfg.N)
    workers = _worker_count(cfg.workers, cfg.N)
    if workers == 1:
        rows = _run_chunk((cfg, seqs))
    else:
        chunks = np.array_split(np.arange(cfg.N), workers)
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = pool.map(_run_chunk, [(cfg, [seqs[i] for i in idx]) for idx in chunks])
            rows = [r for part in parts for r in part]
    return np.array(rows, dtype=float)


def qq_pairs(sample, ppf) -> list:
    x = np.sort(np.asarray(sample, dtype=float))
    probs = (np.arange(1, x.size + 1) - 0.5) / x.size
    return [[float(t), float(e)] for t, e in zip(ppf(probs), x)]


def uniform_report(name, cfg, values, extra=None) -> SimReport:
    values = np.asarray(values, dtype=float)
    ks = stats.kstest(values, "uniform")
    size = {str(a): float(np.mean(values <= a)) for a in ALPHA_GRID}
    return SimReport(
        name, asdict(cfg), values.tolist(), values.tolist(), float(ks.statistic), float(ks.pvalue),
        "uniform", size, qq_pairs(values, stats.uniform.ppf),
        float(values.mean()), float(values.var(ddof=1)), extra or {},
    )


def simulate(cfg: SimConfig) -> SimReport:
    rows = run_replicates(cfg)
    if cfg.scenario in ("null_orthonormal", "null_gaussian_design"):
        exact, simple = rows[:, 0], rows[:, 1]
        se = {str(a): math.sqrt(a * (1 - a) / cfg.N) for a in ALPHA_GRID}
        extra = {
            "simplified": simple.tolist(),
            "simplified_size": {str(a): float(np.mean(simple <= a)) for a in ALPHA_GRID},
            "binomial_se": se,
            "ks_critical_1pct": ks_critical(cfg.N, 0.01),
        }
        return uniform_report(cfg.scenario, cfg, exact, extra)
    if cfg.scenario == "rss_drop":
        R = rows[:, 0]
        ks = stats.kstest(R, "chi2", args=(1,))
        naive_p = stats.chi2.sf(R, 1)
        return SimReport(
            cfg.scenario, asdict(cfg), R.tolist(), naive_p.tolist(), float(ks.statistic),
            float(ks.pvalue), "chi2(1)",
            {str(a): float(np.mean(naive_p <= a)) for a in ALPHA_GRID},
            qq_pairs(R, lambda q: stats.chi2.ppf(q, 1)), float(R.mean()), float(R.var(ddof=1)),
        )
    T, event_b = rows[:, 0], rows[:, 1]
    ks = stats.kstest(T, "expon")
    pv = np.exp(-T)
    return SimReport(
        cfg.scenario, asdict(cfg), T.tolist(), pv.tolist(), float(ks.statistic), float(ks.pvalue),
        "exp(1)", {str(a): float(np.mean(pv <= a)) for a in ALPHA_GRID},
        qq_pairs(T, stats.expon.ppf), float(T.mean()), float(T.var(ddof=1)),
        {"event_b_frequency": float(event_b.mean()), "k_star": cfg.k_star},
    )


def ks_critical(N: int, level: float) -> float:
    """Critical value of the one-sample KS statistic at ``level``."""
    return float(stats.kstwo.isf(level, N))
