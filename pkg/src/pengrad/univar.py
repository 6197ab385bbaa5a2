"""Dense univariate polynomials (ascending coefficients) and real-root extraction."""
from __future__ import annotations

import numpy as np

from .errors import NumericFailure, ZeroPolynomialError

# eigenvalue accepted as real when |Im| <= IMAG_THRESHOLD * (1 + |Re|)
IMAG_THRESHOLD = 1e-8
# looser band: these are polished too and survive only via the residual bound
NEAR_REAL = 1e-4
MERGE_TOL = 1e-8
# candidates closer than this (relative) are treated as one multiple root
CLUSTER_TOL = 1e-5


class UniPoly:
    """Immutable polynomial ``sum_k coeffs[k] * a**k``, trailing zeros stripped."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=(0.0,)):
        c = np.array(coeffs, dtype=float).reshape(-1)
        if c.size == 0:
            c = np.zeros(1)
        nz = np.flatnonzero(c)
        c = c[: nz[-1] + 1] if nz.size else np.zeros(1)
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    def __setattr__(self, name, value):
        raise AttributeError("UniPoly is immutable")

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return len(self.coeffs) == 1 and self.coeffs[0] == 0.0

    @property
    def leading(self) -> float:
        return float(self.coeffs[-1])

    def __eq__(self, other):
        if not isinstance(other, UniPoly):
            return NotImplemented
        return np.array_equal(self.coeffs, other.coeffs)

    def __hash__(self):
        return hash(self.coeffs.tobytes())

    def __repr__(self):
        return f"UniPoly({self.coeffs.tolist()})"

    def __add__(self, other):
        return u_add(self, _lift(other))

    __radd__ = __add__

    def __sub__(self, other):
        return u_add(self, u_scale(_lift(other), -1.0))

    def __rsub__(self, other):
        return u_add(_lift(other), u_scale(self, -1.0))

    def __neg__(self):
        return u_scale(self, -1.0)

    def __mul__(self, other):
        if isinstance(other, UniPoly):
            return u_mul(self, other)
        return u_scale(self, float(other))

    __rmul__ = __mul__

    def __call__(self, alpha):
        return u_eval(self, alpha)


def _lift(v) -> UniPoly:
    return v if isinstance(v, UniPoly) else UniPoly([float(v)])


def u_add(a: UniPoly, b: UniPoly) -> UniPoly:
    n = max(len(a.coeffs), len(b.coeffs))
    out = np.zeros(n)
    out[: len(a.coeffs)] += a.coeffs
    out[: len(b.coeffs)] += b.coeffs
    return UniPoly(out)


def u_scale(a: UniPoly, k: float) -> UniPoly:
    return UniPoly(a.coeffs * k)


def u_mul(a: UniPoly, b: UniPoly) -> UniPoly:
    """Product by direct convolution of coefficient vectors."""
    return UniPoly(np.convolve(a.coeffs, b.coeffs))


def u_derivative(p: UniPoly) -> UniPoly:
    if p.degree == 0:
        return UniPoly()
    return UniPoly(p.coeffs[1:] * np.arange(1, len(p.coeffs)))


def u_eval(p: UniPoly, alpha):
    """Horner evaluation; ``alpha`` may be a scalar or an array."""
    a = np.asarray(alpha, dtype=float) if not np.iscomplexobj(alpha) else np.asarray(alpha)
    acc = np.zeros_like(a) + p.coeffs[-1]
    for c in p.coeffs[-2::-1]:
        acc = acc * a + c
    return acc.item() if acc.ndim == 0 else acc


def _horner_pair(c, x):
    """p(x) and p'(x) for ascending coefficients ``c``."""
    val = c[-1]
    der = 0.0
    for k in range(len(c) - 2, -1, -1):
        der = der * x + val
        val = val * x + c[k]
    return val, der


def _polish(c, x, steps=8):
    """A few guarded Newton steps; never returns a point with larger |p|."""
    val, der = _horner_pair(c, x)
    best, best_val = x, abs(val)
    for _ in range(steps):
        if der == 0.0 or not np.isfinite(der):
            break
        x = x - val / der
        val, der = _horner_pair(c, x)
        if not np.isfinite(val):
            break
        if abs(val) < best_val:
            best, best_val = x, abs(val)
        else:
            break
        if best_val == 0.0:
            break
    return best


_SPLIT = 134217729.0  # 2**27 + 1


def _two_sum(a, b):
    s = a + b
    z = s - a
    return s, (a - (s - z)) + (b - z)


def _two_prod(a, b):
    p = a * b
    t = _SPLIT * a
    ah = t - (t - a)
    al = a - ah
    t = _SPLIT * b
    bh = t - (t - b)
    bl = b - bh
    return p, al * bl - (((p - ah * bh) - al * bh) - ah * bl)


def _comp_horner(c, x):
    """Compensated Horner: about twice the working precision for p(x)."""
    s = float(c[-1])
    err = 0.0
    for k in range(len(c) - 2, -1, -1):
        prod, pe = _two_prod(s, x)
        s, se = _two_sum(prod, float(c[k]))
        err = err * x + (pe + se)
    return s + err


def _polish_accurate(c, x, steps=4):
    """Newton with a compensated residual; never returns a worse point."""
    best, best_val = x, abs(_comp_horner(c, x))
    for _ in range(steps):
        if best_val == 0.0:
            break
        _, der = _horner_pair(c, best)
        if der == 0.0 or not np.isfinite(der):
            break
        cand = best - _comp_horner(c, best) / der
        val = abs(_comp_horner(c, cand))
        if not val < best_val:
            break
        best, best_val = cand, val
    return best


def _companion_eigenvalues(c: np.ndarray) -> np.ndarray:
    # c: ascending, nonzero constant and leading coefficient, degree >= 1
    c = c / np.max(np.abs(c))
    monic = c[:-1] / c[-1]
    deg = len(monic)
    if deg == 1:
        return np.array([-monic[0] + 0j])
    comp = np.zeros((deg, deg))
    comp[1:, :-1] = np.eye(deg - 1)
    comp[:, -1] = -monic
    if not np.all(np.isfinite(comp)):
        raise NumericFailure("non-finite companion matrix")
    try:
        # LAPACK geev balances the matrix before the QR iteration
        return np.linalg.eigvals(comp)
    except np.linalg.LinAlgError as exc:
        raise NumericFailure(f"eigenvalue iteration did not converge: {exc}") from exc


def real_root_candidates(p: UniPoly, imag_threshold: float = IMAG_THRESHOLD) -> np.ndarray:
    """Polished real parts of all (near-)real companion eigenvalues, unfiltered.

    Callers that rank candidates by another criterion (the line search ranks
    them by rss) use this instead of :func:`real_roots`.
    """
    if p.is_zero():
        raise ZeroPolynomialError("identically zero polynomial has no isolated roots")
    c = np.asarray(p.coeffs, dtype=float)
    if not np.all(np.isfinite(c)):
        raise NumericFailure("non-finite polynomial coefficients")
    if p.degree == 0:
        return np.zeros(0)
    shift = int(np.flatnonzero(c)[0])
    reals = [0.0] if shift else []
    core = c[shift:]
    if len(core) > 1:
        eig = _companion_eigenvalues(core)
        scale = 1.0 + np.abs(eig.real)
        # strictly real eigenvalues and near-real pairs alike; a split double
        # root has |Im| ~ sqrt(eps) and is still a valid stationary point
        near = np.abs(eig.imag) <= max(NEAR_REAL, imag_threshold) * scale
        cs = c / np.max(np.abs(c))
        for lam in eig[near]:
            reals.append(_polish(cs, float(lam.real)))
    return np.array(reals, dtype=float)


def residual_bound(p: UniPoly, r: float, tol: float) -> float:
    return tol * float(np.max(np.abs(p.coeffs))) * max(1.0, abs(r)) ** p.degree


def real_roots(p: UniPoly, tol: float = 1e-8, imag_threshold: float = IMAG_THRESHOLD) -> list[float]:
    """Distinct real roots of ``p`` in ascending order.

    Roots come from the eigenvalues of the (balanced) companion matrix of the
    coefficient vector scaled to unit max-norm, followed by a Newton polish on
    ``p``.  Each reported root ``r`` satisfies
    ``|p(r)| <= tol * max|coeff| * max(1, |r|)**deg``; roots closer than
    1e-8 are merged.  A nonzero constant has no roots; the zero polynomial
    raises :class:`ZeroPolynomialError`.
    """
    keep = []
    for r in real_root_candidates(p, imag_threshold):
        resid = abs(u_eval(p, r))
        if resid <= residual_bound(p, r, tol):
            keep.append((r, resid))
    keep.sort()
    # a multiple root shows up as a tight cluster of eigenvalues; it is also
    # a root of p', where Newton converges properly
    dc = None
    out: list[tuple[float, float]] = []
    i = 0
    while i < len(keep):
        j = i + 1
        while j < len(keep) and keep[j][0] - keep[j - 1][0] <= CLUSTER_TOL * (1 + abs(keep[j][0])):
            j += 1
        group = keep[i:j]
        if len(group) > 1:
            if dc is None:
                dc = u_derivative(p).coeffs
                dc = dc / np.max(np.abs(dc))
            mid = float(np.mean([r for r, _ in group]))
            refined = _polish(dc, mid, steps=50)
            resid = abs(u_eval(p, refined))
            # |p| is flat near a multiple root, so trust the p' refinement
            if resid <= residual_bound(p, refined, tol):
                group = [(refined, resid)]
        out.append(min(group, key=lambda rr: rr[1]))
        i = j
    cs = np.asarray(p.coeffs) / np.max(np.abs(p.coeffs))
    out = [(r2, abs(u_eval(p, r2))) for r2 in (_polish_accurate(cs, r) for r, _ in out)]
    merged: list[tuple[float, float]] = []
    for r, resid in out:
        if merged and abs(r - merged[-1][0]) <= MERGE_TOL:
            if resid < merged[-1][1]:
                merged[-1] = (r, resid)
            continue
        merged.append((r, resid))
    return [float(r) for r, _ in merged]
