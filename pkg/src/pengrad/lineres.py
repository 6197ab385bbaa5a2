"""Restriction of a polynomial system to the line ``x + a*d``.

Along a line every variable is a first-degree polynomial in the step ``a``,
so each equation becomes a univariate polynomial and rss becomes the
univariate *summary polynomial* ``phi(a)``.  Its stationary points are the
real roots of ``phi'``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, FlatLineError
from .polycore import Poly, PolySystem
from .univar import UniPoly


@dataclass(frozen=True)
class LineProbe:
    base: np.ndarray
    direction: np.ndarray

    def __post_init__(self):
        base = np.array(self.base, dtype=float).reshape(-1)
        d = np.array(self.direction, dtype=float).reshape(-1)
        if base.shape != d.shape:
            raise DimensionError("base point and direction differ in length")
        if not np.all(np.isfinite(base)) or not np.all(np.isfinite(d)):
            raise ValueError("probe contains non-finite values")
        if not np.any(d):
            raise ValueError("zero search direction")
        base.setflags(write=False)
        d.setflags(write=False)
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "direction", d)

    @property
    def n(self) -> int:
        return self.base.size

    def point(self, alpha: float) -> np.ndarray:
        return self.base + alpha * self.direction


class _Restrictor:
    """Caches powers of ``x_j + a*d_j`` for one probe (binary exponentiation)."""

    def __init__(self, probe: LineProbe):
        self.probe = probe
        self.lin = [np.array([xj, dj]) if dj != 0.0 else np.array([xj])
                    for xj, dj in zip(probe.base, probe.direction)]
        self.cache: dict[tuple[int, int], np.ndarray] = {}

    def power(self, j: int, e: int) -> np.ndarray:
        key = (j, e)
        hit = self.cache.get(key)
        if hit is not None:
            return hit
        if e == 1:
            out = self.lin[j]
        else:
            half = self.power(j, e // 2)
            out = np.convolve(half, half)
            if e % 2:
                out = np.convolve(out, self.lin[j])
        self.cache[key] = out
        return out

    def coeffs(self, p: Poly) -> np.ndarray:
        if p.nvars != self.probe.n:
            raise DimensionError(f"polynomial in {p.nvars} variables, probe in {self.probe.n}")
        total = np.zeros(p.degree + 1)
        for t in p.terms:
            prod = np.array([t.coeff])
            for j, e in enumerate(t.exponents):
                if e:
                    prod = np.convolve(prod, self.power(j, e))
            total[: prod.size] += prod
        return total


def restrict_poly(p: Poly, probe: LineProbe) -> UniPoly:
    """``q(a) = p(x + a*d)`` as a univariate polynomial."""
    return UniPoly(_Restrictor(probe).coeffs(p))


def _restricted_residuals(s: PolySystem, probe: LineProbe):
    if s.nvars != probe.n:
        raise DimensionError(f"system has {s.nvars} variables, probe has {probe.n}")
    rest = _Restrictor(probe)
    out = []
    for p, c in zip(s.equations, s.rhs):
        q = rest.coeffs(p)
        r = -q
        r[0] += c
        out.append(r)
    return out


def _deriv(c: np.ndarray) -> np.ndarray:
    if c.size == 1:
        return np.zeros(1)
    return c[1:] * np.arange(1, c.size)


def _accumulate(parts):
    size = max(part.size for part in parts)
    total = np.zeros(size)
    # fixed equation order keeps the reduction bit-stable
    for part in parts:
        total[: part.size] += part
    return total


def summary_phi(s: PolySystem, probe: LineProbe) -> UniPoly:
    """``phi(a) = sum_i (c_i - P_i(x + a*d))**2``."""
    res = _restricted_residuals(s, probe)
    return UniPoly(_accumulate([np.convolve(r, r) for r in res]))


def summary_phi_prime(s: PolySystem, probe: LineProbe) -> UniPoly:
    """Exact ``phi'(a)`` assembled as ``sum_i 2 * r_i(a) * r_i'(a)``.

    ``r_i(a) = c_i - P_i(x + a*d)``, so ``r_i' = -dP_i/da``.  Built from the
    per-equation products rather than by differentiating ``phi``.  Raises
    :class:`FlatLineError` when the result is identically zero.
    """
    res = _restricted_residuals(s, probe)
    out = UniPoly(_accumulate([2.0 * np.convolve(r, _deriv(r)) for r in res]))
    if out.is_zero():
        raise FlatLineError("rss is constant along this line")
    return out


def residual_form(s: PolySystem, probe: LineProbe) -> UniPoly:
    """``sum_i (c_i - q_i(a)) * q_i'(a)`` with ``q_i(a) = P_i(x + a*d)``.

    Equals ``-phi'/2``: same roots as :func:`summary_phi_prime`, and its
    leading coefficient is negative whenever no top-degree cancellation occurs.
    """
    res = _restricted_residuals(s, probe)
    return UniPoly(_accumulate([np.convolve(r, -_deriv(r)) for r in res]))
