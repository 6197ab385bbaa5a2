"""Benchmark catalog, batch runner and report emission.

Each catalog case is a system file under ``pengrad/data`` whose leading
comments carry metadata::

    # name: lorentz
    # start: 1,2,2,1            (or zeros / ones)
    # published_iterations: rss1rmax2=4 backnlm=4 wolfenlm=4 pgnlm=4

Published iteration counts are informational only.  The only thing a run is
judged on is whether it ends SOLVED.
"""
from __future__ import annotations

import csv
import io
import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import NumericFailure, PolySystemError
from .polycore import PolySystem, parse_system, rss
from .quasilin import solve_quasilinear
from .solver import (BASELINES, SolveConfig, SolveReport, Status, deepest_descent,
                     solve_baseline)

METHODS = ("rss1rmax2", "deepest", "backnlm", "wolfenlm", "pgnlm", "quasilinear")
DEFAULT_METHODS = ("rss1rmax2", "backnlm", "wolfenlm", "pgnlm")
FORMATS = ("json", "csv", "table")
# a status outside the solver's set: the run raised instead of returning
ERROR = "ERROR"


def run_method(s: PolySystem, x0, method: str, cfg: SolveConfig) -> SolveReport:
    """Dispatch one solver by its CLI/bench label."""
    method = method.lower()
    if method == "rss1rmax2":
        return deepest_descent(s, x0, cfg.replace(heuristic="rss1rmax2"))
    if method == "deepest":
        return deepest_descent(s, x0, cfg.replace(heuristic="plain_deepest"))
    if method in BASELINES:
        return solve_baseline(s, x0, method, cfg)
    if method == "quasilinear":
        return solve_quasilinear(s, x0, cfg)
    raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")


def parse_start(text: str, n: int) -> np.ndarray:
    """``zeros``, ``ones`` or comma-separated reals."""
    text = text.strip()
    if text == "zeros":
        return np.zeros(n)
    if text == "ones":
        return np.ones(n)
    try:
        x = np.array([float(v) for v in text.replace(" ", "").split(",")])
    except ValueError as exc:
        raise ValueError(f"bad start vector {text!r}") from exc
    if x.size != n:
        raise ValueError(f"start vector has {x.size} entries, system has {n} unknowns")
    return x


@dataclass
class BenchCase:
    name: str
    system: PolySystem
    start: np.ndarray
    methods: tuple[str, ...] = DEFAULT_METHODS
    expect_solved: dict = field(default_factory=dict)
    published_iterations: dict = field(default_factory=dict)
    provenance: str = ""

    def __post_init__(self):
        self.start = np.asarray(self.start, dtype=float).reshape(-1)
        if self.start.size != self.system.nvars:
            raise ValueError(f"{self.name}: start has {self.start.size} entries, "
                             f"system has {self.system.nvars} unknowns")

    @property
    def n(self) -> int:
        return self.system.nvars

    @property
    def degree(self) -> int:
        return self.system.total_degree


def _metadata(text: str) -> dict:
    meta = {}
    for line in text.splitlines():
        line = line.strip()
        if not line.startswith("#") or ":" not in line:
            continue
        key, _, value = line[1:].partition(":")
        meta[key.strip()] = value.strip()
    return meta


def load_case(path, methods=DEFAULT_METHODS) -> BenchCase:
    path = Path(path)
    text = path.read_text()
    return case_from_text(text, path.stem, methods)


def case_from_text(text: str, default_name: str, methods=DEFAULT_METHODS) -> BenchCase:
    s = parse_system(text)
    meta = _metadata(text)
    counts = {}
    for item in meta.get("published_iterations", "").split():
        k, _, v = item.partition("=")
        if v and v != "-":
            counts[k] = int(v)
    # every shipped case is expected to be solved by rss1rmax2 only
    expect = {m: m == "rss1rmax2" for m in methods}
    return BenchCase(
        name=meta.get("name", default_name),
        system=s,
        start=parse_start(meta.get("start", "zeros"), s.nvars),
        methods=tuple(methods),
        expect_solved=expect,
        published_iterations=counts,
        provenance=meta.get("provenance", ""),
    )


def builtin_catalog(methods=DEFAULT_METHODS) -> list[BenchCase]:
    root = resources.files("pengrad") / "data"
    files = sorted((f for f in root.iterdir() if f.name.endswith(".sys")), key=lambda f: f.name)
    return [case_from_text(f.read_text(), f.name[:-4], methods) for f in files]


def load_cases(directory, methods=DEFAULT_METHODS) -> list[BenchCase]:
    files = sorted(Path(directory).glob("*.sys"))
    if not files:
        raise FileNotFoundError(f"no .sys files in {directory}")
    return [load_case(f, methods) for f in files]


@dataclass
class BenchResult:
    method: str
    status: str
    iterations: int
    final_rss: float
    final_x: list
    wall_time: float
    message: str = ""

    def to_dict(self) -> dict:
        return {"method": self.method, "status": self.status, "iterations": self.iterations,
                "final_rss": self.final_rss, "final_x": self.final_x,
                "wall_time": self.wall_time}


@dataclass
class CaseResult:
    name: str
    n: int
    degree: int
    start: list
    results: list[BenchResult]
    published_iterations: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"name": self.name, "n": self.n, "degree": self.degree, "start": self.start,
                "results": [r.to_dict() for r in self.results]}


@dataclass
class BenchReport:
    tol: float
    max_iters: int
    config_hash: str
    cases: list[CaseResult] = field(default_factory=list)

    def solve_counts(self) -> dict:
        counts: dict[str, int] = {}
        for c in self.cases:
            for r in c.results:
                counts.setdefault(r.method, 0)
                counts[r.method] += r.status == Status.SOLVED.value
        return counts

    def to_dict(self, timing: bool = True) -> dict:
        out = {"meta": {"tol": self.tol, "max_iters": self.max_iters,
                        "config_hash": self.config_hash},
               "cases": [c.to_dict() for c in self.cases]}
        if not timing:
            for c in out["cases"]:
                for r in c["results"]:
                    r.pop("wall_time")
        return out


def case_budget(case: BenchCase, cfg: SolveConfig) -> int:
    """Iteration cap: ``max(cfg.max_iters, 10 * largest published count)``."""
    published = max(case.published_iterations.values(), default=0)
    return max(cfg.max_iters, 10 * published)


def _run_one(case: BenchCase, method: str, cfg: SolveConfig) -> BenchResult:
    t0 = time.perf_counter()
    try:
        rep = run_method(case.system, case.start, method, cfg.replace(max_iters=case_budget(case, cfg)))
        status, iters, x, msg = rep.status.value, rep.iterations, rep.final_x, rep.message
    except NumericFailure as exc:
        status, iters, x, msg = Status.NUMERIC_FAIL.value, 0, case.start, str(exc)
    except (PolySystemError, ValueError, ArithmeticError) as exc:
        status, iters, x, msg = ERROR, 0, case.start, f"{type(exc).__name__}: {exc}"
    wall = time.perf_counter() - t0
    x = np.asarray(x, dtype=float)
    # independent re-evaluation, not the solver's own bookkeeping
    with np.errstate(all="ignore"):
        f = rss(case.system, x) if np.all(np.isfinite(x)) else float("nan")
    return BenchResult(method, status, int(iters), float(f), [float(v) for v in x], wall, msg)


def run_bench(cases: list[BenchCase], cfg: SolveConfig | None = None, methods=None,
              workers: int | None = None) -> BenchReport:
    """Run every (case, method) pair; failures are recorded, never raised.

    ``methods`` overrides each case's own list.  With ``workers > 1`` pairs
    run on a thread pool; results are merged in case-name, then method order
    either way, so the report does not depend on scheduling.
    """
    cfg = cfg or SolveConfig()
    if not cases:
        raise ValueError("no benchmark cases given")
    jobs = []
    for case in sorted(cases, key=lambda c: c.name):
        for m in (methods or case.methods):
            jobs.append((case, m))
    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda job: _run_one(job[0], job[1], cfg), jobs))
    else:
        results = [_run_one(c, m, cfg) for c, m in jobs]
    report = BenchReport(cfg.tol_rss, cfg.max_iters, cfg.config_hash())
    by_case: dict[str, CaseResult] = {}
    for (case, _), res in zip(jobs, results):
        cr = by_case.get(case.name)
        if cr is None:
            cr = CaseResult(case.name, case.n, case.degree, [float(v) for v in case.start], [],
                            dict(case.published_iterations))
            by_case[case.name] = cr
            report.cases.append(cr)
        cr.results.append(res)
    return report


def _table(r: BenchReport) -> str:
    methods: list[str] = []
    for c in r.cases:
        for res in c.results:
            if res.method not in methods:
                methods.append(res.method)
    head = ["name", "n", "degree", "start"] + methods
    rows = []
    for c in r.cases:
        start = " ".join(f"{v:g}" for v in c.start)
        if all(v == 0 for v in c.start):
            start = "zeros"
        elif all(v == 1 for v in c.start):
            start = "ones"
        else:
            start = f"[{start}]"
        cells = {res.method: (str(res.iterations) if res.status == Status.SOLVED.value else "-")
                 for res in c.results}
        rows.append([c.name, str(c.n), str(c.degree), start] + [cells.get(m, "") for m in methods])
    widths = [max(len(x) for x in col) for col in zip(head, *rows)]
    lines = ["  ".join(v.ljust(w) for v, w in zip(row, widths)).rstrip() for row in [head, *rows]]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"


def emit_report(r: BenchReport, fmt: str = "json", timing: bool = True) -> bytes:
    """Serialize a report as ``json``, ``csv`` or a plain-text ``table``."""
    if fmt == "json":
        return (json.dumps(r.to_dict(timing), indent=2) + "\n").encode()
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["name", "n", "degree", "method", "status", "iterations", "final_rss"]
                   + (["wall_time"] if timing else []))
        for c in r.cases:
            for res in c.results:
                w.writerow([c.name, c.n, c.degree, res.method, res.status, res.iterations,
                            repr(res.final_rss)] + ([f"{res.wall_time:.6f}"] if timing else []))
        return buf.getvalue().encode()
    if fmt == "table":
        return _table(r).encode()
    raise ValueError(f"unsupported format {fmt!r}; expected one of {FORMATS}")
