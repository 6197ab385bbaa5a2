"""Command-line entry point: ``pengrad solve | bench | roots``.

Exit codes: 0 solved or report written, 2 not solved, 3 input error,
4 numeric failure.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from . import bench
from .errors import NumericFailure, PolySystemError, ZeroPolynomialError
from .polycore import parse_system
from .solver import SolveConfig, Status
from .univar import UniPoly, real_roots

EXIT_OK, EXIT_UNSOLVED, EXIT_INPUT, EXIT_NUMERIC = 0, 2, 3, 4


class InputError(Exception):
    pass


def _config(args) -> SolveConfig:
    data = {}
    if args.config:
        try:
            data = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise InputError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(data, dict):
            raise InputError("config file must hold a JSON object")
    if args.tol is not None:
        data["tol_rss"] = args.tol
    if args.max_iters is not None:
        data["max_iters"] = args.max_iters
    try:
        return SolveConfig.from_dict(data)
    except (TypeError, ValueError) as exc:
        raise InputError(str(exc)) from exc


def _write_trace(path, report):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["iter", "direction", "alpha", "rss", "max_abs_residual"])
        for it, label, alpha, f, rmax in report.trace_rows():
            w.writerow([it, label, repr(alpha), repr(f), repr(rmax)])


def cmd_solve(args) -> int:
    cfg = _config(args)
    try:
        s = parse_system(Path(args.system).read_text())
    except OSError as exc:
        raise InputError(f"cannot read system: {exc}") from exc
    try:
        x0 = bench.parse_start(args.start, s.nvars)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    rep = bench.run_method(s, x0, args.method, cfg)
    if args.trace:
        _write_trace(args.trace, rep)
    if args.json:
        out = {"method": rep.method, "status": rep.status.value, "iterations": rep.iterations,
               "final_rss": rep.final_rss, "final_x": [float(v) for v in rep.final_x],
               "message": rep.message}
        print(json.dumps(out, indent=2))
    else:
        print(f"status:     {rep.status}")
        print(f"iterations: {rep.iterations}")
        print(f"final rss:  {rep.final_rss:.6e}")
        print("final x:    " + " ".join(f"{v:.12g}" for v in rep.final_x))
        if rep.message:
            print(f"note:       {rep.message}")
    if rep.status is Status.SOLVED:
        return EXIT_OK
    if rep.status is Status.NUMERIC_FAIL:
        return EXIT_NUMERIC
    return EXIT_UNSOLVED


def cmd_bench(args) -> int:
    cfg = _config(args)
    methods = [m.strip().lower() for m in args.methods.split(",") if m.strip()]
    bad = [m for m in methods if m not in bench.METHODS]
    if bad or not methods:
        raise InputError(f"unknown methods {bad}; expected a subset of {bench.METHODS}")
    cases = bench.load_cases(args.cases, methods) if args.cases else bench.builtin_catalog(methods)
    report = bench.run_bench(cases, cfg, workers=args.workers)
    data = bench.emit_report(report, args.format)
    if args.out:
        Path(args.out).write_bytes(data)
    else:
        sys.stdout.buffer.write(data)
    return EXIT_OK


def cmd_roots(args) -> int:
    try:
        coeffs = [float(v) for v in args.poly.split(",")]
    except ValueError as exc:
        raise InputError(f"bad coefficient list {args.poly!r}") from exc
    for r in real_roots(UniPoly(coeffs), tol=args.tol):
        print(repr(r))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="pengrad", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--tol", type=float, default=None, help="rss tolerance (default 1e-8)")
        sp.add_argument("--max-iters", type=int, default=None)
        sp.add_argument("--config", help="JSON file with SolveConfig fields")

    sp = sub.add_parser("solve", help="solve one system")
    sp.add_argument("--system", required=True)
    sp.add_argument("--start", default="zeros", help="comma-separated reals, zeros or ones")
    sp.add_argument("--method", default="rss1rmax2", choices=bench.METHODS)
    sp.add_argument("--trace", help="write the iteration trace as CSV")
    sp.add_argument("--json", action="store_true")
    common(sp)
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("bench", help="run a benchmark batch")
    src = sp.add_mutually_exclusive_group()
    src.add_argument("--catalog", action="store_true", help="built-in catalog (default)")
    src.add_argument("--cases", help="directory of .sys files")
    sp.add_argument("--methods", default=",".join(bench.DEFAULT_METHODS))
    sp.add_argument("--out")
    sp.add_argument("--format", default="json", choices=bench.FORMATS)
    sp.add_argument("--workers", type=int, default=None)
    common(sp)
    sp.set_defaults(func=cmd_bench)

    sp = sub.add_parser("roots", help="real roots of a univariate polynomial")
    sp.add_argument("--poly", required=True, help="ascending coefficients, comma-separated")
    sp.add_argument("--tol", type=float, default=1e-8)
    sp.set_defaults(func=cmd_roots)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except NumericFailure as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (InputError, PolySystemError, ZeroPolynomialError, FileNotFoundError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ValueError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
