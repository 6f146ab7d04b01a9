"""Naive versus selective intervals after a Lasso fit on synthetic data.

Repeats the selection on fresh noise and reports how often each kind of
interval covers the projected target e_j^T X_M^+ mu of the selected model.
"""

import argparse

import numpy as np

from selinf.inference import coefficient_direction, selective_ci
from selinf.lasso import lasso_fit, lasso_model_region
from selinf.polytope import TruncationRegion, slice_union


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=50)
    ap.add_argument("--p", type=int, default=10)
    ap.add_argument("--lam", type=float, default=4.0)
    ap.add_argument("--signal", type=float, default=1.0)
    ap.add_argument("--reps", type=int, default=300)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    X = rng.standard_normal((args.n, args.p))
    X /= np.linalg.norm(X, axis=0) / np.sqrt(args.n / 10)
    beta = np.zeros(args.p)
    beta[:2] = args.signal
    mu = X @ beta
    hits = {"naive": 0, "selective": 0}
    total = 0
    for _ in range(args.reps):
        y = mu + rng.standard_normal(args.n)
        sol = lasso_fit(X, y, args.lam)
        M = list(sol.active)
        if not M or len(M) > 8:
            continue
        polys = lasso_model_region(X, M, args.lam)
        for i in range(len(M)):
            eta = coefficient_direction(X, M, i)
            target = float(eta @ mu)
            for name, region in (("naive", TruncationRegion.whole_line()),
                                 ("selective", slice_union(polys, eta, 1.0, y))):
                lo, hi = selective_ci(y, eta, 1.0, region, 0.1, max_width=1e4)
                hits[name] += lo <= target <= hi
            total += 1
    for name, h in hits.items():
        print(f"{name:<10} coverage {h / total:.3f} over {total} intervals (nominal 0.90)")


if __name__ == "__main__":
    main()
