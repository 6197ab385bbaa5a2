"""Shared generators and independent oracles for the test-suite."""
import itertools
from fractions import Fraction

import numpy as np
import pytest

from pengrad.polycore import Poly, PolySystem

ROSEN_GRAD = """\
vars: x1 x2
eq: 400*x1^3 + 2*x1 - 400*x1*x2 - 2 = 0
eq: 200*x2 - 200*x1^2 = 0
"""


def random_poly(rng, n, beta, nterms=None, dense_top=True, coef=5.0):
    """Random polynomial in ``n`` variables of degree exactly ``beta``."""
    pool = [e for e in itertools.product(range(beta + 1), repeat=n) if sum(e) <= beta]
    top = [e for e in pool if sum(e) == beta]
    k = nterms or int(rng.integers(1, min(len(pool), 6) + 1))
    idx = rng.choice(len(pool), size=min(k, len(pool)), replace=False)
    exps = [pool[i] for i in idx]
    if dense_top:
        exps += top
    elif not any(sum(e) == beta for e in exps):
        exps.append(top[int(rng.integers(len(top)))])
    terms = [(float(rng.uniform(-coef, coef)), e) for e in exps]
    return Poly(terms, n)


def random_system(rng, n=None, m=None, beta=None, dense_top=False, coef=5.0):
    n = n or int(rng.integers(1, 5))
    m = m or int(rng.integers(1, 5))
    beta = beta or int(rng.integers(1, 5))
    polys = []
    for i in range(m):
        b = beta if i == 0 else int(rng.integers(1, beta + 1))
        polys.append(random_poly(rng, n, b, dense_top=dense_top, coef=coef))
    rhs = rng.uniform(-coef, coef, size=m)
    return PolySystem(tuple(polys), rhs)


def poly_from_roots(roots, lead=1.0):
    """Ascending coefficients of ``lead * prod(a - r)``, computed exactly, rounded once.

    Building the product in floating point moves clustered roots by more
    than the recovery tolerance before any root finder sees them.
    """
    c = [Fraction(float(lead))]
    for r in roots:
        r = Fraction(float(r))
        nxt = [Fraction(0)] * (len(c) + 1)
        for k, v in enumerate(c):
            nxt[k + 1] += v
            nxt[k] -= r * v
        c = nxt
    return np.array([float(v) for v in c])


def naive_eval(p: Poly, x):
    """Term-by-term evaluation with Python floats (oracle for eval_poly)."""
    total = 0.0
    for t in p.terms:
        v = t.coeff
        for xj, e in zip(x, t.exponents):
            v *= float(xj) ** int(e)
        total += v
    return total


def naive_rss(s: PolySystem, x):
    return sum((c - naive_eval(p, x)) ** 2 for p, c in zip(s.equations, s.rhs))


def fd_grad(fun, x, h=1e-6):
    x = np.asarray(x, dtype=float)
    g = np.empty_like(x)
    for j in range(x.size):
        e = np.zeros_like(x)
        e[j] = h
        g[j] = (fun(x + e) - fun(x - e)) / (2 * h)
    return g


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
