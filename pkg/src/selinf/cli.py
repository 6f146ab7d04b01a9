"""Command-line entry point: ``selinf path|infer|simulate``."""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .errors import (
    BracketFailure,
    MissingResponse,
    NonNumericCell,
    ParseError,
    SelinfError,
    TooManySignPatterns,
)
from .inference import (
    coefficient_direction,
    estimate_sigma,
    selective_inference,
    significance_pvalue,
    significance_test,
    spacing_report,
)
from .lars import lars_path
from .lasso import MAX_SIGN_PATTERNS, lasso_fit, lasso_model_region, lasso_selector
from .linmodel import DesignMatrix, standardize
from .polytope import TruncationRegion, line_search_region, slice, slice_union
from .simulate import SCENARIOS, SimConfig, simulate
from .stepwise import fs_path, fs_polyhedron

SCHEMA = "selinf/1"


@dataclass
class RunConfig:
    method: str
    lam: float | None = None
    steps: int | None = None
    sigma: float | str = 1.0
    alpha: float = 0.05
    seed: int = 0
    normalize: bool = True

    def __post_init__(self):
        if self.method not in ("lasso", "lars", "fs"):
            raise ValueError(f"unknown method {self.method!r}")
        if self.method == "lasso":
            if self.lam is None or self.steps is not None:
                raise ValueError("method lasso takes --lambda and no --steps")
            if not self.lam > 0:
                raise ValueError("--lambda must be positive")
        else:
            if self.steps is None or self.lam is not None:
                raise ValueError(f"method {self.method} takes --steps and no --lambda")
            if self.steps < 1:
                raise ValueError("--steps must be at least 1")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError("--alpha must lie in (0, 1)")
        if self.sigma != "estimate" and not float(self.sigma) > 0:
            raise ValueError("--sigma must be positive or 'estimate'")


def ingest(csv_path, response_column, normalize: bool = True):
    """Read a headed numeric CSV into a standardized design and centred response.

    ``response_column`` is a header name or a 0-based column index.
    Returns (DesignMatrix, y, predictor names).
    """
    with open(csv_path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ParseError("empty file", line=1)
    header = [h.strip() for h in rows[0]]
    if isinstance(response_column, str) and response_column in header:
        ycol = header.index(response_column)
    else:
        try:
            ycol = int(response_column)
        except (TypeError, ValueError):
            raise MissingResponse(f"no column named {response_column!r}") from None
        if not 0 <= ycol < len(header):
            raise MissingResponse(f"column index {ycol} out of range")
    if len(header) < 2:
        raise ParseError("need a response and at least one predictor", line=1)
    data = []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != len(header):
            raise ParseError(f"line {lineno} has {len(row)} fields, expected {len(header)}",
                             line=lineno)
        vals = []
        for col, cell in enumerate(row):
            try:
                v = float(cell)
            except ValueError:
                raise NonNumericCell(f"non-numeric cell {cell!r} at line {lineno}, column "
                                     f"{col + 1} ({header[col]})", line=lineno,
                                     column=col + 1) from None
            if not math.isfinite(v):
                raise NonNumericCell(f"non-finite cell at line {lineno}, column {col + 1}",
                                     line=lineno, column=col + 1)
            vals.append(v)
        data.append(vals)
    if len(data) < 3:
        raise ParseError(f"need at least 3 data rows, got {len(data)}")
    arr = np.array(data)
    y = arr[:, ycol]
    X = np.delete(arr, ycol, axis=1)
    names = [h for i, h in enumerate(header) if i != ycol]
    design, yc = standardize(X, y, normalize=normalize)
    return design, yc, names


def _sigma(config: RunConfig, X, y) -> float:
    if config.sigma == "estimate":
        return estimate_sigma(X, y)
    return float(config.sigma)


def cmd_path(config: RunConfig, X: DesignMatrix, y, names=None) -> dict:
    names = names or [f"x{j}" for j in range(X.p)]
    if config.method == "lars":
        if config.steps > min(X.n - 1, X.p):
            raise ValueError(f"--steps must be at most {min(X.n - 1, X.p)}")
        path = lars_path(X, y, config.steps)
        return {
            "knots": list(path.knots),
            "order": [int(j) for j, _ in path.entries],
            "names": [names[j] for j, _ in path.entries],
            "signs": [int(s) for _, s in path.entries],
            "coefficients": [b.tolist() for b in path.beta_at_knots],
            "coefficients_original_scale": [X.unscale(b).tolist() for b in path.beta_at_knots],
        }
    if config.method == "fs":
        if config.steps > min(X.n - 1, X.p):
            raise ValueError(f"--steps must be at most {min(X.n - 1, X.p)}")
        path = fs_path(X, y, config.steps)
        return {
            "order": list(path.order),
            "names": [names[j] for j in path.order],
            "signs": list(path.signs),
            "rss": list(path.rss),
        }
    sol = lasso_fit(X, y, config.lam)
    return {
        "lambda": config.lam,
        "active": list(sol.active),
        "names": [names[j] for j in sol.active],
        "signs": list(sol.signs),
        "coefficients": sol.beta_hat.tolist(),
        "coefficients_original_scale": X.unscale(sol.beta_hat).tolist(),
        "dual_gap": sol.dual_gap,
    }


def _with_name(report, names, j):
    d = report.to_dict()
    d["variable"] = int(j)
    d["name"] = names[j]
    return d


def cmd_infer(config: RunConfig, X: DesignMatrix, y, step=None, variable=None,
              variant="exact", line_search=False, condition=True, names=None,
              max_width=50.0) -> dict:
    names = names or [f"x{j}" for j in range(X.p)]
    sigma = _sigma(config, X, y)
    out = {"sigma": sigma, "reports": []}
    if config.method == "lars":
        K = config.steps
        avail = min(X.n - 1, X.p)
        if K > avail:
            raise ValueError(f"--steps must be at most {avail}")
        path = lars_path(X, y, min(K + 1, avail))
        ks = [step] if step is not None else list(range(1, K + 1))
        for k in ks:
            if not 1 <= k <= K:
                raise ValueError(f"--step must lie in [1, {K}]")
            rep = spacing_report(path, k, sigma, variant, config.alpha, max_width)
            d = _with_name(rep, names, path.entries[k - 1][0])
            if k < len(path):
                T = significance_test(path, k, sigma)
                d["significance"] = {"T": T, "p_value_exp1": significance_pvalue(T)}
            out["reports"].append(d)
        return out

    if config.method == "fs":
        if config.steps > min(X.n - 1, X.p):
            raise ValueError(f"--steps must be at most {min(X.n - 1, X.p)}")
        path = fs_path(X, y, config.steps)
        M = list(path.order)
        poly = fs_polyhedron(X, path, config.steps)
        make_region = lambda eta: slice(poly, eta, sigma**2, y)  # noqa: E731
        method = "polyhedral"
    else:
        sol = lasso_fit(X, y, config.lam)
        M = list(sol.active)
        out["active"] = M
        if not M:
            return out
        use_line = line_search
        if not use_line and 2 ** len(M) > MAX_SIGN_PATTERNS:
            raise TooManySignPatterns(len(M), MAX_SIGN_PATTERNS)
        if use_line:
            selector = lasso_selector(X, config.lam)
            make_region = lambda eta: line_search_region(selector, y, eta, sigma**2)  # noqa: E731
            method = "line-search"
        else:
            polys = lasso_model_region(X, M, config.lam)
            make_region = lambda eta: slice_union(polys, eta, sigma**2, y)  # noqa: E731
            method = "polyhedral"
    targets = M if variable is None else [variable]
    for j in targets:
        if j not in M:
            raise ValueError(f"variable {j} was not selected; selected: {M}")
        eta = coefficient_direction(X, M, M.index(j))
        region = make_region(eta) if condition else TruncationRegion.whole_line()
        rep = selective_inference(y, eta, sigma, region, config.alpha,
                                  method=method if condition else "unconditional",
                                  max_width=max_width)
        d = _with_name(rep, names, j)
        d["line_search"] = method == "line-search"
        out["reports"].append(d)
    return out


def write_qq_csv(report, path):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["theoretical", "empirical"])
        w.writerows(report.qq)


def _envelope(command, config, result=None, error=None) -> dict:
    doc = {"schema": SCHEMA, "version": __version__, "command": command, "config": config}
    if error is not None:
        doc["error"] = error
    else:
        doc["result"] = result
    return doc


def _error(exc) -> dict:
    err = {"type": type(exc).__name__, "message": str(exc)}
    for attr in ("line", "column"):
        if getattr(exc, attr, None) is not None:
            err[attr] = getattr(exc, attr)
    if isinstance(exc, TooManySignPatterns):
        err["hint"] = "rerun with --line-search"
    if isinstance(exc, BracketFailure):
        err["hint"] = "rerun with a larger --max-width"
    return err


def _parse_sigma(text):
    return text if text == "estimate" else float(text)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="selinf", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("data", help="CSV file with a header row")
        p.add_argument("--response", required=True, help="response column name or 0-based index")
        p.add_argument("--method", choices=("lasso", "lars", "fs"), default="lars")
        p.add_argument("--lambda", dest="lam", type=float)
        p.add_argument("--steps", type=int)
        p.add_argument("--sigma", type=_parse_sigma, default=1.0,
                       help="noise standard deviation, or 'estimate'")
        p.add_argument("--alpha", type=float, default=0.05)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--normalize", action=argparse.BooleanOptionalAction, default=True)

    for name in ("path", "infer"):
        p = sub.add_parser(name)
        common(p)
        p.add_argument("--out")
        p.add_argument("--compact", action="store_true")
        if name == "infer":
            p.add_argument("--step", type=int)
            p.add_argument("--variable", type=int)
            p.add_argument("--variant", choices=("exact", "simplified"), default="exact")
            p.add_argument("--line-search", action="store_true")
            p.add_argument("--no-condition", action="store_true",
                           help="ignore selection (classical z-test)")
            p.add_argument("--max-width", type=float, default=50.0,
                           help="CI root search half-width in units of sigma*||eta||")

    p = sub.add_parser("simulate")
    p.add_argument("scenario", choices=SCENARIOS)
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--p", type=int, default=20)
    p.add_argument("--N", type=int, default=2000)
    p.add_argument("--sigma", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--k-star", type=int, default=3)
    p.add_argument("--signal", type=float)
    p.add_argument("--out")
    p.add_argument("--qq-out", help="CSV of Q-Q pairs (default: <out>.qq.csv)")
    p.add_argument("--compact", action="store_true")
    return parser


def _emit(doc, out, compact):
    text = json.dumps(doc, sort_keys=True, indent=None if compact else 2,
                      separators=(",", ":") if compact else None)
    if out:
        Path(out).write_text(text + "\n", encoding="utf-8")
    else:
        sys.stdout.write(text + "\n")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    echo = {k: v for k, v in vars(args).items() if k not in ("out", "qq_out", "compact")}
    try:
        if args.command == "simulate":
            cfg = SimConfig(args.scenario, args.n, args.p, args.N, args.sigma, args.seed,
                            args.k_star, args.signal)
            report = simulate(cfg)
            result = report.to_dict()
            qq_path = args.qq_out or (f"{args.out}.qq.csv" if args.out else None)
            if qq_path:
                write_qq_csv(report, qq_path)
                result["qq_csv"] = qq_path
        else:
            config = RunConfig(args.method, args.lam, args.steps, args.sigma, args.alpha,
                               args.seed, args.normalize)
            X, y, names = ingest(args.data, args.response, config.normalize)
            if args.command == "path":
                result = cmd_path(config, X, y, names)
            else:
                result = cmd_infer(config, X, y, args.step, args.variable, args.variant,
                                   args.line_search, not args.no_condition, names,
                                   args.max_width)
    except (SelinfError, ValueError, OSError) as exc:
        _emit(_envelope(args.command, echo, error=_error(exc)), args.out, args.compact)
        return 2
    _emit(_envelope(args.command, echo, result), args.out, args.compact)
    return 0


if __name__ == "__main__":
    sys.exit(main())
