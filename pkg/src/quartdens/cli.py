"""Batch command line interface.

Subcommands compute density-constant rows for chosen fields, reproduce
the two reference tables with per-cell deviations, and run the moment /
census / bound evaluations.  Output is CSV or JSON with deterministic
ordering and formatting; table mode prints five decimals to mirror the
reference precision.

Exit codes: 0 all rows computed, 1 configuration error, 2 at least one
row failed.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor

from . import __version__
from .arith import is_squarefree
from .constants import (
    TABLE_1,
    TABLE_2,
    nonstat_ratio_bound,
    ratio_observed,
)
from .quadfield import build_field
from .stats import (
    exceptional_fraction,
    omega_census,
    second_moment,
    typical_chi_experiment,
)

__all__ = ["main"]


def _thread_count(args) -> int:
    env = os.environ.get("QC_THREADS")
    if env:
        return max(1, int(env))
    return max(1, args.threads)


def _emit(rows: list[dict], config: dict, args) -> None:
    if args.format == "json":
        doc = {"config": config, "rows": rows, "version": __version__}
        text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    else:
        if rows:
            cols = list(rows[0].keys())
            lines = [",".join(cols)]
            for r in rows:
                lines.append(",".join(_csv_cell(r[c]) for c in cols))
            text = "\n".join(lines) + "\n"
        else:
            text = ""
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _csv_cell(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _fixed5(v: float) -> str:
    return f"{v:.5f}"


# ----------------------------------------------------------------------
# constants / table
# ----------------------------------------------------------------------

def _constants_row(d: int, euler_cutoff: int, bound: int) -> dict:
    rep = ratio_observed(d, euler_cutoff=euler_cutoff, B=bound)
    F = build_field(d)
    row = {
        "d": d,
        "D_F": F.D,
        "h": F.h,
        "cl2": F.cl2,
        "s4_constant": rep.s4,
        "s4_tail": rep.s4_tail,
        "d4_constant": rep.d4,
        "d4_tail": rep.d4_tail,
        "d4_biquadratic": rep.d4_biquadratic,
        "d4_unramified_bare": rep.d4_unramified_bare,
        "d4_unramified_weighted": rep.d4_unramified_weighted,
        "percentage": rep.percentage,
        "percentage_biquadratic": 100.0 * rep.d4_biquadratic / (rep.d4_biquadratic + rep.s4),
    }
    for name, val in rep.bounds.items():
        row[name + "_qualitative"] = val
    return row


def cmd_constants(args) -> int:
    ds = []
    for tok in args.d:
        ds.append(int(tok))
    rows = []
    failed = False
    workers = _thread_count(args)

    def compute(d):
        if d in (0, 1) or not is_squarefree(d):
            return d, None, f"{d} is not a valid squarefree radicand"
        try:
            return d, _constants_row(d, args.euler_cutoff, args.bound), None
        except Exception as exc:  # per-row failure must not abort the batch
            return d, None, str(exc)

    with ThreadPoolExecutor(max_workers=workers) as pool:
        results = list(pool.map(compute, ds))
    for d, row, err in results:
        if row is None:
            rows.append({"d": d, "error": err})
            failed = True
        else:
            rows.append(row)
    _emit(rows, _config_dict(args), args)
    return 2 if failed else 0


def cmd_table(args) -> int:
    table = TABLE_1 if args.set == 1 else TABLE_2
    rows = []
    workers = _thread_count(args)

    def compute(item):
        d, (s4_ref, d4_ref, pct_ref) = item
        rep = ratio_observed(d, euler_cutoff=args.euler_cutoff, B=args.bound)
        biq = rep.d4_biquadratic
        pct_biq = 100.0 * biq / (biq + rep.s4)
        return {
            "d": d,
            "s4": _fixed5(rep.s4),
            "s4_ref": _fixed5(s4_ref),
            "s4_dev": _fixed5(rep.s4 - s4_ref),
            "d4": _fixed5(biq),
            "d4_ref": _fixed5(d4_ref),
            "d4_dev": _fixed5(biq - d4_ref),
            "d4_full": _fixed5(rep.d4),
            "pct": _fixed5(pct_biq),
            "pct_ref": _fixed5(pct_ref),
            "pct_dev": _fixed5(pct_biq - pct_ref),
        }

    with ThreadPoolExecutor(max_workers=workers) as pool:
        rows = list(pool.map(compute, sorted(table.items(), key=lambda kv: (abs(kv[0]), -kv[0]))))
    _emit(rows, _config_dict(args), args)
    return 0


# ----------------------------------------------------------------------
# moments / omega / ratio-bound
# ----------------------------------------------------------------------

def cmd_moments(args) -> int:
    rep = second_moment(args.modulus, args.y, args.t)
    rows = [
        {
            "modulus": rep.modulus,
            "family_size": rep.family_size,
            "second_moment_exact": rep.second_moment_exact,
            "second_moment_truncated": rep.second_moment_truncated,
            "T": rep.T,
            "Y": rep.Y,
            "bound_envelope": rep.bound_envelope,
        }
    ]
    _emit(rows, _config_dict(args), args)
    return 0


def cmd_omega(args) -> int:
    stats = omega_census(args.limit, args.y, cache_path=args.cache)
    row = {
        "X": stats.X,
        "Y": stats.Y,
        "count": stats.count,
        "empirical_mean": stats.empirical_mean,
        "empirical_variance": stats.empirical_variance,
        "theoretical_mean": stats.theoretical_mean,
        "theoretical_variance": stats.theoretical_variance,
    }
    for k in args.k:
        row[f"exceedance_{k}sigma"] = stats.exceedance(k)
    rows = [row]
    if args.typical_sample:
        summary = typical_chi_experiment(
            min(args.limit, args.typical_limit), args.typical_sample, args.c, args.eps
        )
        rows.append(
            {
                "experiment": "typical_chi",
                "sample_size": len(summary.sample),
                "median_fraction": summary.median_fraction,
                "min_fraction": summary.min_fraction,
            }
        )
    _emit(rows, _config_dict(args), args)
    return 0


def cmd_ratio_bound(args) -> int:
    if args.d in (0, 1) or not is_squarefree(args.d):
        sys.stderr.write(f"invalid radicand {args.d}\n")
        return 1
    F = build_field(args.d)
    rows = [
        {
            "d": args.d,
            "D_F": F.D,
            "cl2": F.cl2,
            "Y": args.y,
            "c": args.c,
            "nonstat_ratio_bound": nonstat_ratio_bound(F, args.y, args.c),
            "qualitative": True,
        }
    ]
    _emit(rows, _config_dict(args), args)
    return 0


def cmd_exceptional(args) -> int:
    rows = [
        {
            "X": args.limit,
            "k": args.k,
            "fraction": exceptional_fraction(args.limit, args.k, args.cache),
            "chebyshev_cap": 1.0 / args.k**2 + 0.01,
        }
    ]
    _emit(rows, _config_dict(args), args)
    return 0


def _config_dict(args) -> dict:
    skip = {"func"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


# ----------------------------------------------------------------------
# Parser
# ----------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="quartdens",
        description="Density constants for quartic extensions of quadratic fields",
    )
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--format", choices=("csv", "json"), default="csv")
        sp.add_argument("--out", default=None, help="output path (default stdout)")
        sp.add_argument("--threads", type=int, default=1)

    sp = sub.add_parser("constants", help="density constants for given radicands")
    sp.add_argument("--d", nargs="+", required=True, metavar="D")
    sp.add_argument("--euler-cutoff", type=int, default=10**6)
    sp.add_argument("--bound", "-B", type=int, default=10**4)
    common(sp)
    sp.set_defaults(func=cmd_constants)

    sp = sub.add_parser("table", help="reproduce a reference table with deviations")
    sp.add_argument("--set", type=int, choices=(1, 2), required=True)
    sp.add_argument("--euler-cutoff", type=int, default=10**6)
    sp.add_argument("--bound", "-B", type=int, default=10**4)
    common(sp)
    sp.set_defaults(func=cmd_table)

    sp = sub.add_parser("moments", help="second moment of log L(1,chi) mod D")
    sp.add_argument("--modulus", type=int, required=True)
    sp.add_argument("--y", type=int, default=100)
    sp.add_argument("--t", type=float, default=10**6)
    common(sp)
    sp.set_defaults(func=cmd_moments)

    sp = sub.add_parser("omega", help="census of omega_Y over fundamental discriminants")
    sp.add_argument("--limit", type=int, required=True)
    sp.add_argument("--y", type=int, required=True)
    sp.add_argument("--k", type=float, nargs="*", default=[2.0, 3.0])
    sp.add_argument("--cache", default=None)
    sp.add_argument("--typical-sample", type=int, default=0)
    sp.add_argument("--typical-limit", type=int, default=10**4)
    sp.add_argument("--c", type=float, default=1.0)
    sp.add_argument("--eps", type=float, default=0.05)
    common(sp)
    sp.set_defaults(func=cmd_omega)

    sp = sub.add_parser("exceptional", help="exceedance fraction at Y = log X")
    sp.add_argument("--limit", type=int, required=True)
    sp.add_argument("--k", type=float, default=2.0)
    sp.add_argument("--cache", default=None)
    common(sp)
    sp.set_defaults(func=cmd_exceptional)

    sp = sub.add_parser("ratio-bound", help="unconditional ratio lower bound shape")
    sp.add_argument("--d", type=int, required=True)
    sp.add_argument("--y", type=int, required=True)
    sp.add_argument("--c", type=float, default=1.0)
    common(sp)
    sp.set_defaults(func=cmd_ratio_bound)

    return p


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except (ValueError, OverflowError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
