"""Penetrating line steps, the deepest-descent strategy and Newton-LM baselines.

A penetrating step finds the exact global minimizer of rss along a whole
line: it builds ``phi'`` for the probe, takes every real root, and keeps the
one with the lowest rss (``a = 0`` is always a candidate, so a step never
makes things worse).  Deepest descent probes several directions per
iteration (negative gradient first, then Newton, then the coordinate axes)
and moves to the deepest point found.  The ``rss1rmax2`` variant only
accepts a non-gradient candidate when none of its residuals exceeds the
largest residual of the gradient-direction point.
"""
from __future__ import annotations

import hashlib
import json
import warnings
from dataclasses import asdict, dataclass, field, fields
from enum import Enum

import numpy as np

from .errors import (DimensionError, FlatLineError, NumericFailure,
                     SingularDirection, ZeroGradient)
from .lineres import LineProbe, summary_phi_prime
from .polycore import PolySystem, grad_rss, jacobian, residuals, rss, rss_with_bound
from .univar import IMAG_THRESHOLD, real_root_candidates

TIE_EPS = 1e-12
GATE_EPS = 1e-12
DAMPING_MIN, DAMPING_MAX = 1e-12, 1e8
COND_LIMIT = 1e12


class Status(str, Enum):
    SOLVED = "SOLVED"
    LOCAL_MIN = "LOCAL_MIN"
    MAX_ITERS = "MAX_ITERS"
    STAGNATED = "STAGNATED"
    NUMERIC_FAIL = "NUMERIC_FAIL"

    def __str__(self):
        return self.value


HEURISTICS = ("plain_deepest", "rss1rmax2")


@dataclass(frozen=True)
class SolveConfig:
    """Tolerances and strategy switches shared by every solver and the bench.

    The gradient direction is part of every deepest-descent iteration and
    cannot be switched off.
    """

    tol_rss: float = 1e-8
    max_iters: int = 5000
    gradient: bool = True
    coordinate_axes: bool = True
    newton: bool = True
    heuristic: str = "rss1rmax2"
    root_real_threshold: float = IMAG_THRESHOLD
    stagnation_eps: float = 1e-14
    stagnation_window: int = 20
    lm_damping_init: float = 1e-3
    grad_tol: float = 1e-12
    xtol: float = 1e-15

    def __post_init__(self):
        if not self.gradient:
            raise ValueError("the gradient direction cannot be disabled")
        if self.heuristic not in HEURISTICS:
            raise ValueError(f"heuristic must be one of {HEURISTICS}, got {self.heuristic!r}")
        if self.max_iters < 1:
            raise ValueError("max_iters must be positive")
        if self.tol_rss <= 0:
            raise ValueError("tol_rss must be positive")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "SolveConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)

    def replace(self, **changes) -> "SolveConfig":
        return SolveConfig(**{**self.to_dict(), **changes})

    def config_hash(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


@dataclass(frozen=True)
class StepResult:
    alpha_star: float
    x_new: np.ndarray
    rss_new: float
    candidates_examined: int
    flat: bool = False
    rss_upper: float = float("nan")


@dataclass(frozen=True)
class TraceEntry:
    iter: int
    direction: str
    alpha: float
    rss: float
    max_abs_residual: float
    grad_norm: float = float("nan")


@dataclass
class SolveReport:
    status: Status
    iterations: int
    final_x: np.ndarray
    final_rss: float
    trace: list[TraceEntry] = field(default_factory=list)
    method: str = ""
    message: str = ""

    @property
    def solved(self) -> bool:
        return self.status is Status.SOLVED

    def trace_rows(self):
        for t in self.trace:
            yield (t.iter, t.direction, t.alpha, t.rss, t.max_abs_residual)


# ---------------------------------------------------------------------------
# single-line step

def pg_step(s: PolySystem, probe: LineProbe, cfg: SolveConfig | None = None) -> StepResult:
    """Move to the global minimizer of rss on the line through ``probe``.

    Raises :class:`NumericFailure` if root extraction breaks down.  A flat
    line (rss constant along it) returns ``alpha_star = 0`` with ``flat``
    set.
    """
    threshold = cfg.root_real_threshold if cfg is not None else IMAG_THRESHOLD
    x, d = probe.base, probe.direction
    if s.nvars != probe.n:
        raise DimensionError(f"system has {s.nvars} variables, probe has {probe.n}")
    try:
        dphi = summary_phi_prime(s, probe)
    except FlatLineError:
        plain, upper = rss_with_bound(s, x[None, :])
        return StepResult(0.0, x.copy(), float(plain[0]), 0, flat=True, rss_upper=float(upper[0]))
    roots = real_root_candidates(dphi, threshold)
    roots = roots[np.isfinite(roots)]
    alphas = np.concatenate(([0.0], roots))
    with np.errstate(over="ignore", invalid="ignore"):
        plain, upper = rss_with_bound(s, x[None, :] + alphas[:, None] * d[None, :])
    plain = np.where(np.isnan(plain), np.inf, plain)
    upper = np.where(np.isnan(upper), np.inf, upper)
    if not np.isfinite(plain[0]):
        raise NumericFailure("rss is not finite at the base point")
    # rank by the rounding-aware upper bound, never accepting a worse rss
    ok = plain <= plain[0]
    score = np.where(ok, upper, np.inf)
    best = float(score.min())
    near = np.flatnonzero(score <= best + TIE_EPS * max(1.0, best))
    # among (near-)ties take the smallest move
    k = int(near[np.argmin(np.abs(alphas[near]))])
    alpha = float(alphas[k])
    return StepResult(alpha, x + alpha * d, float(plain[k]), int(roots.size),
                      rss_upper=float(upper[k]))


# ---------------------------------------------------------------------------
# directions

def direction_gradient(s: PolySystem, x, grad_tol: float = 0.0) -> np.ndarray:
    """Unit vector along ``-grad rss``; :class:`ZeroGradient` at stationary points."""
    g = grad_rss(s, x)
    norm = float(np.linalg.norm(g))
    if not np.isfinite(norm):
        raise NumericFailure("gradient is not finite")
    if norm <= grad_tol or norm == 0.0:
        raise ZeroGradient(f"gradient norm {norm:.3e}")
    return -g / norm


def _lm_solve(J: np.ndarray, r: np.ndarray, damping: float):
    """Solve ``(J^T J + damping I) d = J^T r``; escalate damping x10 while singular."""
    JtJ = J.T @ J
    rhs = J.T @ r
    eye = np.eye(J.shape[1])
    lam = float(damping)
    while True:
        M = JtJ + lam * eye
        if np.all(np.isfinite(M)) and np.linalg.cond(M) < COND_LIMIT:
            return np.linalg.solve(M, rhs), lam
        if lam <= 0.0 or lam >= DAMPING_MAX:
            raise SingularDirection(f"normal matrix singular (damping {lam:g})")
        lam = min(max(lam * 10.0, DAMPING_MIN), DAMPING_MAX)


def direction_newton_lm(s: PolySystem, x, damping: float) -> np.ndarray:
    """Levenberg-Marquardt direction ``(J^T J + damping I)^-1 J^T r`` (not normalized)."""
    x = np.asarray(x, dtype=float)
    d, _ = _lm_solve(jacobian(s, x), residuals(s, x), damping)
    return d


def coordinate_directions(n: int) -> list[np.ndarray]:
    if n < 1:
        raise ValueError("dimension must be positive")
    return list(np.eye(n))


# ---------------------------------------------------------------------------
# drivers

def _start(s: PolySystem, x0) -> np.ndarray:
    x = np.array(x0, dtype=float).reshape(-1)
    if x.shape != (s.nvars,):
        raise DimensionError(f"start point has length {x.size}, system has {s.nvars} unknowns")
    if not np.all(np.isfinite(x)):
        raise ValueError("start point is not finite")
    return x


def _entry(s, k, label, alpha, x, gnorm=float("nan")):
    r = residuals(s, x)
    return TraceEntry(k, label, float(alpha), float(r @ r), float(np.max(np.abs(r))), gnorm)


class _Stagnation:
    def __init__(self, cfg: SolveConfig):
        self.eps = cfg.stagnation_eps
        self.window = cfg.stagnation_window
        self.count = 0

    def update(self, old: float, new: float) -> bool:
        rel = (old - new) / old if old > 0 else 0.0
        self.count = self.count + 1 if rel < self.eps else 0
        return self.count >= self.window


def deepest_descent(s: PolySystem, x0, cfg: SolveConfig | None = None) -> SolveReport:
    """Deepest-descent iteration; ``cfg.heuristic`` picks plain or rss1rmax2 acceptance."""
    cfg = cfg or SolveConfig()
    x = _start(s, x0)
    method = "rss1rmax2" if cfg.heuristic == "rss1rmax2" else "deepest"
    f = rss(s, x)
    trace = [_entry(s, 0, "start", 0.0, x)]
    if f < cfg.tol_rss:
        return SolveReport(Status.SOLVED, 0, x, f, trace, method)
    axes = coordinate_directions(s.nvars) if cfg.coordinate_axes else []
    use_newton = cfg.newton and s.m == s.nvars
    damping = cfg.lm_damping_init
    stag = _Stagnation(cfg)
    status, message = Status.MAX_ITERS, ""
    k = 0
    try:
        while k < cfg.max_iters:
            g = grad_rss(s, x)
            gnorm = float(np.linalg.norm(g))
            if not np.isfinite(gnorm):
                raise NumericFailure("gradient is not finite")
            if gnorm <= cfg.grad_tol:
                status, message = Status.LOCAL_MIN, f"gradient norm {gnorm:.3e}"
                break
            best = pg_step(s, LineProbe(x, -g / gnorm), cfg)
            label = "gradient"
            ref_rmax = float(np.max(np.abs(residuals(s, best.x_new))))

            extras = []
            if use_newton:
                try:
                    d, used = _lm_solve(jacobian(s, x), residuals(s, x), damping)
                    damping = used
                    dn = float(np.linalg.norm(d))
                    if dn > 0 and np.isfinite(dn):
                        extras.append(("newton", d / dn))
                except SingularDirection:
                    damping = DAMPING_MAX
            extras.extend((f"axis{j + 1}", e) for j, e in enumerate(axes))

            for lab, d in extras:
                st = pg_step(s, LineProbe(x, d), cfg)
                if not st.rss_upper < best.rss_upper:
                    continue
                if cfg.heuristic == "rss1rmax2":
                    rmax = float(np.max(np.abs(residuals(s, st.x_new))))
                    if rmax > ref_rmax + GATE_EPS:
                        continue
                best, label = st, lab

            if label == "newton":
                damping = max(damping / 10.0, DAMPING_MIN)
            x_new, f_new = best.x_new, best.rss_new
            if not f_new < f:
                # descent is guaranteed while the gradient is nonzero; no
                # progress here means floating point has run out of room
                status, message = Status.STAGNATED, "no rss decrease"
                break
            k += 1
            trace.append(_entry(s, k, label, best.alpha_star, x_new, gnorm))
            stalled = stag.update(f, f_new)
            x, f = x_new, f_new
            if best.rss_upper < cfg.tol_rss:
                status = Status.SOLVED
                break
            if stalled:
                status, message = Status.STAGNATED, "rss improvement below threshold"
                break
    except NumericFailure as exc:
        status, message = Status.NUMERIC_FAIL, str(exc)
    return SolveReport(status, k, x, f, trace, method, message)


def _certified_rss(s, x):
    plain, upper = rss_with_bound(s, np.asarray(x, dtype=float)[None, :])
    return float(plain[0]), float(upper[0])


BASELINES = ("backnlm", "wolfenlm", "pgnlm")


def _backtrack(s, x, f, g, d, c1=1e-4, shrink=0.5, trials=30):
    t = 1.0
    slope = float(g @ d)
    for _ in range(trials):
        f_t = rss(s, x + t * d)
        if f_t <= f + c1 * t * slope:
            return t
        t *= shrink
    return None


def _wolfe(s, x, f, g, d, c1=1e-4, c2=0.9):
    from scipy.optimize import line_search

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        out = line_search(lambda z: rss(s, z), lambda z: grad_rss(s, z), x, d,
                          gfk=g, old_fval=f, c1=c1, c2=c2, maxiter=30)
    alpha = out[0]
    return None if alpha is None else float(alpha)


def solve_baseline(s: PolySystem, x0, method: str, cfg: SolveConfig | None = None) -> SolveReport:
    """Newton-LM with backtracking (``backnlm``), strong-Wolfe search
    (``wolfenlm``) or a penetrating step along the Newton direction (``pgnlm``).
    """
    cfg = cfg or SolveConfig()
    method = method.lower()
    if method not in BASELINES:
        raise ValueError(f"unknown baseline {method!r}; expected one of {BASELINES}")
    x = _start(s, x0)
    f = rss(s, x)
    trace = [_entry(s, 0, "start", 0.0, x)]
    if f < cfg.tol_rss:
        return SolveReport(Status.SOLVED, 0, x, f, trace, method)
    damping = cfg.lm_damping_init
    stag = _Stagnation(cfg)
    status, message = Status.MAX_ITERS, ""
    k = attempts = 0
    try:
        while attempts < cfg.max_iters:
            attempts += 1
            r = residuals(s, x)
            J = jacobian(s, x)
            g = -2.0 * J.T @ r
            gnorm = float(np.linalg.norm(g))
            if not np.isfinite(gnorm):
                raise NumericFailure("gradient is not finite")
            if gnorm <= cfg.grad_tol:
                status, message = Status.LOCAL_MIN, f"gradient norm {gnorm:.3e}"
                break
            try:
                d, damping = _lm_solve(J, r, damping)
            except SingularDirection as exc:
                status, message = Status.STAGNATED, str(exc)
                break
            if method == "backnlm":
                t = _backtrack(s, x, f, g, d)
            elif method == "wolfenlm":
                t = _wolfe(s, x, f, g, d)
            else:
                dn = float(np.linalg.norm(d))
                t = None
                if dn > 0:
                    st = pg_step(s, LineProbe(x, d / dn), cfg)
                    if st.rss_new < f:
                        t = st.alpha_star / dn
            x_new = x + t * d if t is not None else None
            step = t * float(np.linalg.norm(d)) if t is not None else 0.0
            f_new = rss(s, x_new) if x_new is not None else np.inf
            if t is None or not f_new < f:
                if damping >= DAMPING_MAX:
                    status, message = Status.STAGNATED, "line search failed"
                    break
                damping = min(damping * 10.0, DAMPING_MAX)
                continue
            damping = max(damping / 10.0, DAMPING_MIN)
            k += 1
            # alpha is logged as signed distance along the unit direction
            trace.append(_entry(s, k, "newton", step, x_new, gnorm))
            stalled = stag.update(f, f_new)
            x, f = x_new, f_new
            if _certified_rss(s, x)[1] < cfg.tol_rss:
                status = Status.SOLVED
                break
            if stalled:
                status, message = Status.STAGNATED, "rss improvement below threshold"
                break
    except NumericFailure as exc:
        status, message = Status.NUMERIC_FAIL, str(exc)
    return SolveReport(status, k, x, f, trace, method, message)
