"""Sparse multivariate polynomials and polynomial systems ``P(x) = c``.

A :class:`Poly` is a canonical list of terms ``coeff * x_1^p_1 ... x_n^p_n``
(merged, zero coefficients dropped, graded-lex descending order).  A
:class:`PolySystem` bundles ``m`` such polynomials with their right-hand
sides and the variable names used by the text format.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .errors import DimensionError, ParseError


class Term(NamedTuple):
    coeff: float
    exponents: tuple[int, ...]

    @property
    def degree(self) -> int:
        return sum(self.exponents)


def _grlex_key(exps):
    return (sum(exps), exps)


def canonicalize(terms: Iterable, nvars: int) -> tuple[Term, ...]:
    """Merge equal monomials, drop zero coefficients, sort graded-lex (descending)."""
    acc: dict[tuple[int, ...], float] = {}
    for t in terms:
        coeff, exps = t
        exps = tuple(int(e) for e in exps)
        if len(exps) != nvars:
            raise DimensionError(
                f"term exponent vector has length {len(exps)}, expected {nvars}")
        for e, raw in zip(exps, t[1]):
            if e < 0 or e != raw:
                raise ValueError(f"exponents must be nonnegative integers, got {t[1]}")
        acc[exps] = acc.get(exps, 0.0) + float(coeff)
    kept = [(e, c) for e, c in acc.items() if c != 0.0]
    kept.sort(key=lambda ec: _grlex_key(ec[0]), reverse=True)
    return tuple(Term(c, e) for e, c in kept)


class Poly:
    """Immutable sparse polynomial in ``nvars`` variables."""

    __slots__ = ("terms", "nvars", "_exps", "_coeffs")

    def __init__(self, terms: Iterable = (), nvars: int = 1):
        if nvars < 1:
            raise ValueError("nvars must be positive")
        object.__setattr__(self, "nvars", int(nvars))
        object.__setattr__(self, "terms", canonicalize(terms, nvars))
        exps = np.array([t.exponents for t in self.terms], dtype=np.int64).reshape(-1, nvars)
        coeffs = np.array([t.coeff for t in self.terms], dtype=float)
        exps.setflags(write=False)
        coeffs.setflags(write=False)
        object.__setattr__(self, "_exps", exps)
        object.__setattr__(self, "_coeffs", coeffs)

    def __setattr__(self, name, value):
        raise AttributeError("Poly is immutable")

    # constructors -------------------------------------------------------
    @classmethod
    def constant(cls, value: float, nvars: int) -> "Poly":
        return cls([(value, (0,) * nvars)], nvars)

    @classmethod
    def variable(cls, j: int, nvars: int) -> "Poly":
        exps = [0] * nvars
        exps[j] = 1
        return cls([(1.0, tuple(exps))], nvars)

    # basic properties ---------------------------------------------------
    @property
    def exponents(self) -> np.ndarray:
        """(k, nvars) integer array of exponent vectors, one row per term."""
        return self._exps

    @property
    def coeffs(self) -> np.ndarray:
        return self._coeffs

    @property
    def degree(self) -> int:
        # the zero polynomial has degree 0 by convention
        if not self.terms:
            return 0
        return int(self._exps.sum(axis=1).max())

    def degree_in(self, j: int) -> int:
        if not self.terms:
            return 0
        return int(self._exps[:, j].max())

    def is_zero(self) -> bool:
        return not self.terms

    def __len__(self):
        return len(self.terms)

    def __eq__(self, other):
        if not isinstance(other, Poly):
            return NotImplemented
        return self.nvars == other.nvars and self.terms == other.terms

    def __hash__(self):
        return hash((self.nvars, self.terms))

    def __repr__(self):
        return f"Poly({format_poly(self)!r}, nvars={self.nvars})"

    # arithmetic ---------------------------------------------------------
    def _coerce(self, other) -> "Poly":
        if isinstance(other, Poly):
            if other.nvars != self.nvars:
                raise DimensionError("polynomials live in different numbers of variables")
            return other
        return Poly.constant(float(other), self.nvars)

    def __add__(self, other):
        other = self._coerce(other)
        return Poly(self.terms + other.terms, self.nvars)

    __radd__ = __add__

    def __neg__(self):
        return Poly([(-t.coeff, t.exponents) for t in self.terms], self.nvars)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        prods = [(a.coeff * b.coeff, tuple(p + q for p, q in zip(a.exponents, b.exponents)))
                 for a in self.terms for b in other.terms]
        return Poly(prods, self.nvars)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0 or int(k) != k:
            raise ValueError("only nonnegative integer powers")
        out = Poly.constant(1.0, self.nvars)
        for _ in range(int(k)):
            out = out * self
        return out

    def __call__(self, x):
        return eval_poly(self, x)


def _as_points(x, nvars):
    arr = np.asarray(x, dtype=float)
    if arr.shape[-1:] != (nvars,) or arr.ndim > 2:
        raise DimensionError(f"point has shape {arr.shape}, expected ({nvars},) or (N, {nvars})")
    return arr


def _monomials(p: Poly, pts: np.ndarray) -> np.ndarray:
    # pts: (N, n) -> (N, k); numpy gives 0.0**0 == 1.0
    mono = np.ones((pts.shape[0], len(p.terms)))
    for j in range(p.nvars):
        col = p._exps[:, j]
        if col.any():
            mono *= pts[:, j:j + 1] ** col
    return mono


def eval_poly(p: Poly, x):
    """Value of ``p`` at a point (length ``nvars``) or at each row of an (N, nvars) array."""
    arr = _as_points(x, p.nvars)
    pts = np.atleast_2d(arr)
    if not p.terms:
        vals = np.zeros(pts.shape[0])
    else:
        # row-wise sum (not BLAS) so single points and batches agree bitwise
        vals = (_monomials(p, pts) * p._coeffs).sum(axis=1)
    return float(vals[0]) if arr.ndim == 1 else vals


def partial(p: Poly, j: int) -> Poly:
    """Formal partial derivative with respect to variable ``j``."""
    if not 0 <= j < p.nvars:
        raise IndexError(f"variable index {j} out of range for {p.nvars} variables")
    out = []
    for t in p.terms:
        e = t.exponents[j]
        if e == 0:
            continue
        exps = list(t.exponents)
        exps[j] = e - 1
        out.append((t.coeff * e, tuple(exps)))
    return Poly(out, p.nvars)


@dataclass(frozen=True)
class PolySystem:
    """``m`` polynomial equations ``P_i(x) = c_i`` in ``n`` unknowns."""

    equations: tuple[Poly, ...]
    rhs: np.ndarray
    var_names: tuple[str, ...] = field(default=())

    def __post_init__(self):
        eqs = tuple(self.equations)
        if not eqs:
            raise ValueError("a system needs at least one equation")
        n = eqs[0].nvars
        if any(p.nvars != n for p in eqs):
            raise DimensionError("all equations must share the same number of variables")
        rhs = np.array(self.rhs, dtype=float).reshape(-1)
        if rhs.shape != (len(eqs),):
            raise DimensionError(f"rhs has length {rhs.size}, expected {len(eqs)}")
        rhs.setflags(write=False)
        names = tuple(self.var_names) or tuple(f"x{j + 1}" for j in range(n))
        if len(names) != n:
            raise DimensionError(f"{len(names)} variable names for {n} variables")
        object.__setattr__(self, "equations", eqs)
        object.__setattr__(self, "rhs", rhs)
        object.__setattr__(self, "var_names", names)

    @classmethod
    def from_polys(cls, polys: Sequence[Poly], rhs=None, var_names=()):
        if rhs is None:
            rhs = np.zeros(len(polys))
        return cls(tuple(polys), rhs, tuple(var_names))

    @property
    def m(self) -> int:
        return len(self.equations)

    @property
    def nvars(self) -> int:
        return self.equations[0].nvars

    n = nvars

    @property
    def degrees(self) -> list[int]:
        return [p.degree for p in self.equations]

    @property
    def degree(self) -> int:
        """System degree: the largest equation degree."""
        return max(self.degrees)

    @property
    def total_degree(self) -> int:
        """Product of the equation degrees (Bezout count)."""
        out = 1
        for d in self.degrees:
            out *= d
        return out

    def is_quasilinear(self) -> bool:
        return all(p.terms == () or int(p.exponents.max()) <= 1 for p in self.equations)

    @cached_property
    def partials(self) -> tuple[tuple[Poly, ...], ...]:
        """``partials[i][j]`` is dP_i/dx_j, computed once per system."""
        return tuple(tuple(partial(p, j) for j in range(self.nvars)) for p in self.equations)

    def __eq__(self, other):
        if not isinstance(other, PolySystem):
            return NotImplemented
        return (self.equations == other.equations
                and np.array_equal(self.rhs, other.rhs)
                and self.var_names == other.var_names)

    def __hash__(self):
        return hash((self.equations, self.rhs.tobytes(), self.var_names))


def _check_point(s: PolySystem, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (s.nvars,):
        raise DimensionError(f"point has shape {x.shape}, expected ({s.nvars},)")
    return x


def evaluate(s: PolySystem, x) -> np.ndarray:
    """The vector ``P(x)`` (length m)."""
    x = _check_point(s, x)
    return np.array([eval_poly(p, x) for p in s.equations])


def residuals(s: PolySystem, x) -> np.ndarray:
    return s.rhs - evaluate(s, x)


def rss(s: PolySystem, x) -> float:
    x = _check_point(s, x)
    return float(rss_many(s, x[None, :])[0])


def rss_many(s: PolySystem, points) -> np.ndarray:
    """rss at each row of an (N, n) array."""
    return rss_with_bound(s, points)[0]


def rss_with_bound(s: PolySystem, points) -> tuple[np.ndarray, np.ndarray]:
    """rss at each row of ``points`` plus an upper bound covering rounding error.

    Each residual is widened by ``(k + deg + 1) * eps * sum|terms|``, the usual
    worst-case bound for forming and summing ``k`` monomials.  Far from the
    origin, cancellation can make the computed rss meaninglessly small; the
    bound exposes that.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != s.nvars:
        raise DimensionError(f"points have shape {pts.shape}, expected (N, {s.nvars})")
    total = np.zeros(pts.shape[0])
    upper = np.zeros(pts.shape[0])
    u = np.finfo(float).eps
    for p, c in zip(s.equations, s.rhs):
        if p.terms:
            parts = _monomials(p, pts) * p._coeffs
            val = parts.sum(axis=1)
            err = (len(p.terms) + p.degree + 1) * u * (np.abs(parts).sum(axis=1) + abs(c))
        else:
            val = np.zeros(pts.shape[0])
            err = np.zeros(pts.shape[0])
        r = np.abs(c - val)
        total += r * r
        upper += (r + err) ** 2
    return total, upper


def jacobian(s: PolySystem, x) -> np.ndarray:
    x = _check_point(s, x)
    return np.array([[eval_poly(d, x) for d in row] for row in s.partials]).reshape(s.m, s.nvars)


def grad_rss(s: PolySystem, x) -> np.ndarray:
    """Gradient of rss: ``-2 J^T r``."""
    x = _check_point(s, x)
    return -2.0 * jacobian(s, x).T @ residuals(s, x)


# ---------------------------------------------------------------------------
# text format

_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z][A-Za-z0-9_]*)
  | (?P<pow>\*\*|\^)
  | (?P<op>[-+*=])
""", re.VERBOSE)

_IDENT = re.compile(r"[A-Za-z][A-Za-z0-9_]*\Z")


def _tokenize(text, lineno, offset):
    pos = 0
    toks = []
    while pos < len(text):
        mt = _TOKEN.match(text, pos)
        if mt is None:
            raise ParseError(f"unexpected character {text[pos]!r}", lineno, offset + pos + 1)
        kind = mt.lastgroup
        if kind != "ws":
            toks.append((kind, mt.group(), offset + pos + 1))
        pos = mt.end()
    toks.append(("end", "", offset + len(text) + 1))
    return toks


class _EquationParser:
    def __init__(self, text, lineno, offset, index):
        self.toks = _tokenize(text, lineno, offset)
        self.pos = 0
        self.lineno = lineno
        self.index = index
        self.n = len(index)

    def peek(self):
        return self.toks[self.pos]

    def take(self):
        tok = self.toks[self.pos]
        self.pos += 1
        return tok

    def error(self, msg, tok=None):
        tok = tok or self.peek()
        return ParseError(msg, self.lineno, tok[2])

    def parse(self):
        terms = []
        sign = 1.0
        kind, val, _ = self.peek()
        if kind == "op" and val in "+-":
            self.take()
            sign = -1.0 if val == "-" else 1.0
        terms.append(self.term(sign))
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "+-":
                self.take()
                terms.append(self.term(-1.0 if val == "-" else 1.0))
            elif kind == "op" and val == "=":
                self.take()
                break
            else:
                raise self.error(f"expected '+', '-' or '=', got {val or 'end of line'!r}")
        rhs = self.real()
        if self.peek()[0] != "end":
            raise self.error(f"unexpected {self.peek()[1]!r} after right-hand side")
        return terms, rhs

    def real(self):
        sign = 1.0
        kind, val, _ = self.peek()
        if kind == "op" and val in "+-":
            self.take()
            sign = -1.0 if val == "-" else 1.0
        kind, val, col = self.take()
        if kind != "num":
            raise self.error(f"expected a number, got {val or 'end of line'!r}", (kind, val, col))
        return sign * float(val)

    def term(self, sign):
        coeff = [sign]
        exps = [0] * self.n
        kind, val, _ = self.peek()
        if kind == "op" and val in "+-":
            # signed coefficient such as "+ -1*x^2"
            coeff[0] *= self.real()
            if not self._more_factors():
                return (coeff[0], tuple(exps))
        self.factor(exps, coeff)
        while self._more_factors():
            self.factor(exps, coeff)
        return (coeff[0], tuple(exps))

    def _more_factors(self):
        kind, val, _ = self.peek()
        if kind == "op" and val == "*":
            self.take()
            return True
        return False

    def factor(self, exps, coeff_box):
        kind, val, col = self.take()
        if kind == "num":
            coeff_box[0] *= float(val)
            return
        if kind != "ident":
            raise self.error(f"expected a variable or number, got {val or 'end of line'!r}",
                             (kind, val, col))
        if val not in self.index:
            raise ParseError(f"unknown variable {val!r}", self.lineno, col)
        power = 1
        if self.peek()[0] == "pow":
            self.take()
            pkind, pval, pcol = self.take()
            if pkind == "op" and pval == "-":
                raise ParseError("negative exponent", self.lineno, pcol)
            if pkind != "num":
                raise ParseError(f"expected an exponent, got {pval!r}", self.lineno, pcol)
            if not pval.isdigit():
                raise ParseError(f"exponent {pval!r} is not a nonnegative integer",
                                 self.lineno, pcol)
            power = int(pval)
        exps[self.index[val]] += power


def parse_system(text: str) -> PolySystem:
    """Parse the ``vars:`` / ``eq:`` text format into a :class:`PolySystem`."""
    var_names = None
    polys, rhs = [], []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        lead = len(raw) - len(raw.lstrip())
        if var_names is None:
            if not stripped.startswith("vars:"):
                raise ParseError("first line must be 'vars: <names>'", lineno, lead + 1)
            names = stripped[5:].split()
            if not names:
                raise ParseError("no variables declared", lineno, lead + 6)
            for nm in names:
                if not _IDENT.match(nm):
                    raise ParseError(f"invalid variable name {nm!r}", lineno,
                                     raw.index(nm) + 1)
            if len(set(names)) != len(names):
                raise ParseError("duplicate variable name", lineno, lead + 1)
            var_names = names
            index = {nm: j for j, nm in enumerate(names)}
            continue
        if not stripped.startswith("eq:"):
            raise ParseError("expected 'eq: ...'", lineno, lead + 1)
        body_offset = lead + 3
        terms, c = _EquationParser(stripped[3:], lineno, body_offset, index).parse()
        polys.append(Poly(terms, len(var_names)))
        rhs.append(c)
    if var_names is None:
        raise ParseError("empty system: no 'vars:' line")
    if not polys:
        raise ParseError("empty system: no equations")
    return PolySystem(tuple(polys), np.array(rhs), tuple(var_names))


def _fmt_real(v: float) -> str:
    return repr(float(v))


def format_poly(p: Poly, var_names: Sequence[str] | None = None) -> str:
    names = list(var_names) if var_names else [f"x{j + 1}" for j in range(p.nvars)]
    if not p.terms:
        return "0"
    parts = []
    for t in p.terms:
        factors = []
        for nm, e in zip(names, t.exponents):
            if e == 1:
                factors.append(nm)
            elif e > 1:
                factors.append(f"{nm}^{e}")
        mag = abs(t.coeff)
        if not factors:
            body = _fmt_real(mag)
        elif mag == 1.0:
            body = "*".join(factors)
        else:
            body = "*".join([_fmt_real(mag)] + factors)
        sign = "-" if t.coeff < 0 else "+"
        parts.append((sign, body))
    first_sign, first = parts[0]
    out = ("-" if first_sign == "-" else "") + first
    for sign, body in parts[1:]:
        out += f" {sign} {body}"
    return out


def format_system(s: PolySystem) -> str:
    lines = ["vars: " + " ".join(s.var_names)]
    for p, c in zip(s.equations, s.rhs):
        lines.append(f"eq: {format_poly(p, s.var_names)} = {_fmt_real(c)}")
    return "\n".join(lines) + "\n"
