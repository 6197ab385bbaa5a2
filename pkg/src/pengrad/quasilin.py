"""Derivative-free axis updates for quasi-linear systems, and the Gauss-Seidel twin.

In a quasi-linear system no variable appears with a power above one, so with
every unknown but ``x_j`` fixed each equation collapses to ``a_i * x_j = c_i``.
The least-squares value of ``x_j`` is then ``(a . c) / |a|^2`` and replacing
``x_j`` by it minimizes rss along the ``j``-th axis.  For a plain linear
system, sweeping the axes in order reproduces Gauss-Seidel on the normal
equations ``A^T A x = A^T b`` update for update.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateAxis, DimensionError, NotQuasiLinear
from .polycore import Poly, PolySystem, residuals, rss
from .solver import SolveConfig, SolveReport, Status, TraceEntry, _start


@dataclass(frozen=True)
class AxisReduction:
    """Equation-wise collapsed coefficients ``a`` and effective right-hand sides."""

    a: np.ndarray
    c_eff: np.ndarray

    def solve(self) -> float:
        norm2 = float(self.a @ self.a)
        if norm2 == 0.0:
            raise DegenerateAxis("collapsed coefficient vector is zero")
        return float(self.a @ self.c_eff) / norm2


@dataclass(frozen=True)
class LinearSystem:
    A: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        A = np.array(self.A, dtype=float)
        b = np.array(self.b, dtype=float).reshape(-1)
        if A.ndim != 2 or A.shape[0] < 1 or A.shape[1] < 1:
            raise DimensionError("A must be a nonempty matrix")
        if b.shape != (A.shape[0],):
            raise DimensionError(f"b has length {b.size}, A has {A.shape[0]} rows")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)

    def to_polysystem(self) -> PolySystem:
        m, n = self.A.shape
        polys = []
        for row in self.A:
            terms = []
            for j, a in enumerate(row):
                e = [0] * n
                e[j] = 1
                terms.append((a, tuple(e)))
            polys.append(Poly(terms, n))
        return PolySystem(tuple(polys), self.b)


def check_quasilinear(s: PolySystem) -> None:
    for i, p in enumerate(s.equations):
        if p.terms and int(p.exponents.max()) > 1:
            raise NotQuasiLinear(f"equation {i + 1} has a variable with exponent above one")


class _AxisModel:
    """Per-axis split of each equation into the part with ``x_j`` and the rest."""

    def __init__(self, s: PolySystem):
        check_quasilinear(s)
        self.s = s
        self.n = s.nvars
        # for each axis: list over equations of (exps_with, coeffs_with, exps_without, coeffs_without)
        self.split = []
        for j in range(self.n):
            per_eq = []
            for p in s.equations:
                E, c = p.exponents, p.coeffs
                has = E[:, j] == 1 if E.size else np.zeros(0, dtype=bool)
                Ew = E[has].copy()
                Ew[:, j] = 0
                per_eq.append((Ew, c[has], E[~has], c[~has]))
            self.split.append(per_eq)

    @staticmethod
    def _eval(E, c, x):
        if c.size == 0:
            return 0.0
        return float(np.prod(x[None, :] ** E, axis=1) @ c)

    def reduction(self, x: np.ndarray, j: int) -> AxisReduction:
        a = np.empty(self.s.m)
        c_eff = np.empty(self.s.m)
        for i, (Ew, cw, Eo, co) in enumerate(self.split[j]):
            a[i] = self._eval(Ew, cw, x)
            c_eff[i] = self.s.rhs[i] - self._eval(Eo, co, x)
        return AxisReduction(a, c_eff)


def axis_reduction(s: PolySystem, x, j: int) -> AxisReduction:
    x = _start(s, x)
    if not 0 <= j < s.nvars:
        raise IndexError(f"axis {j} out of range")
    return _AxisModel(s).reduction(x, j)


def axis_ls_update(s: PolySystem, x, j: int) -> float:
    """Least-squares value of ``x_j`` with the other unknowns held at ``x``."""
    return axis_reduction(s, x, j).solve()


def _sweeps(model: _AxisModel, x: np.ndarray, sweeps: int | None):
    """Yield ``(sweep, j, new_value_or_None)`` while updating ``x`` in place."""
    k = 0
    while sweeps is None or k < sweeps:
        k += 1
        for j in range(model.n):
            try:
                x[j] = model.reduction(x, j).solve()
                yield k, j, x[j]
            except DegenerateAxis:
                yield k, j, None


def solve_quasilinear(s: PolySystem, x0, cfg: SolveConfig | None = None) -> SolveReport:
    """Cycle exact axis updates ``j = 1..n`` until solved or at a fixed point.

    ``cfg.max_iters`` bounds the number of full sweeps.  A sweep that moves
    no unknown by more than ``cfg.xtol * (1 + max|x|)`` means every axis is
    already optimal; the run then ends SOLVED or LOCAL_MIN depending on rss.
    """
    cfg = cfg or SolveConfig()
    model = _AxisModel(s)
    x = _start(s, x0)
    r = residuals(s, x)
    f = float(r @ r)
    trace = [TraceEntry(0, "start", 0.0, f, float(np.max(np.abs(r))))]
    if f < cfg.tol_rss:
        return SolveReport(Status.SOLVED, 0, x, f, trace, "quasilinear")
    status, message = Status.MAX_ITERS, ""
    degenerate = set()
    sweep = 0
    before = x.copy()
    for sweep_k, j, val in _sweeps(model, x, cfg.max_iters):
        if val is None:
            degenerate.add(j)
            label = f"axis{j + 1}(degenerate)"
            alpha = 0.0
        else:
            label = f"axis{j + 1}"
            alpha = float(x[j] - before[j])
        r = residuals(s, x)
        trace.append(TraceEntry(sweep_k, label, alpha, float(r @ r), float(np.max(np.abs(r)))))
        if j < model.n - 1:
            continue
        sweep = sweep_k
        f = float(r @ r)
        if not np.all(np.isfinite(x)):
            status, message = Status.NUMERIC_FAIL, "non-finite iterate"
            break
        if f < cfg.tol_rss:
            status = Status.SOLVED
            break
        if len(degenerate) == model.n:
            status, message = Status.LOCAL_MIN, "every axis is degenerate"
            break
        step = float(np.max(np.abs(x - before)))
        if step <= cfg.xtol * (1.0 + float(np.max(np.abs(x)))):
            status, message = Status.LOCAL_MIN, "axis sweep reached a fixed point"
            break
        before = x.copy()
    if degenerate:
        message = (message + "; " if message else "") + \
            "degenerate axes skipped: " + ",".join(str(j + 1) for j in sorted(degenerate))
    return SolveReport(status, sweep, x, rss(s, x), trace, "quasilinear", message)


def gauss_seidel_normal(ls: LinearSystem, x0, sweeps: int, record: list | None = None) -> np.ndarray:
    """Gauss-Seidel on ``C y = d`` with ``C = A^T A`` and ``d = A^T b``."""
    C = ls.A.T @ ls.A
    d = ls.A.T @ ls.b
    y = np.array(x0, dtype=float).reshape(-1)
    n = C.shape[0]
    if y.shape != (n,):
        raise DimensionError(f"start has length {y.size}, expected {n}")
    diag = np.diag(C)
    if np.any(diag == 0.0):
        raise DegenerateAxis("zero diagonal entry in A^T A")
    for _ in range(sweeps):
        for k in range(n):
            off = C[k, :k] @ y[:k] + C[k, k + 1:] @ y[k + 1:]
            y[k] = (d[k] - off) / C[k, k]
            if record is not None:
                record.append(y[k])
    return y


def check_gs_equivalence(ls: LinearSystem, x0, sweeps: int) -> float:
    """Largest gap between matching single-unknown updates of both methods."""
    s = ls.to_polysystem()
    model = _AxisModel(s)
    x = _start(s, x0)
    ours = []
    for _, _, val in _sweeps(model, x, sweeps):
        if val is None:
            raise DegenerateAxis("zero column in A")
        ours.append(val)
    theirs: list[float] = []
    gauss_seidel_normal(ls, x0, sweeps, record=theirs)
    return float(np.max(np.abs(np.array(ours) - np.array(theirs)))) if ours else 0.0
