import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pengrad.errors import DegenerateAxis, DimensionError, NotQuasiLinear
from pengrad.polycore import Poly, PolySystem, parse_system, rss
from pengrad.quasilin import (AxisReduction, LinearSystem, axis_ls_update, axis_reduction,
                              check_gs_equivalence, gauss_seidel_normal, solve_quasilinear)
from pengrad.solver import SolveConfig, Status


def random_quasilinear(rng, n, m):
    polys = []
    for _ in range(m):
        terms = []
        for _ in range(int(rng.integers(1, 5))):
            e = tuple(int(v) for v in rng.integers(0, 2, n))
            terms.append((float(rng.uniform(-3, 3)), e))
        polys.append(Poly(terms, n))
    return PolySystem(tuple(polys), rng.uniform(-3, 3, m))


def test_axis_reduction_arithmetic():
    assert AxisReduction(np.array([1.0, 1.0]), np.array([2.0, 4.0])).solve() == 3.0
    assert AxisReduction(np.array([3.0, 4.0]), np.array([3.0, 4.0])).solve() == 1.0
    with pytest.raises(DegenerateAxis):
        AxisReduction(np.zeros(2), np.ones(2)).solve()


def test_axis_reduction_collapses_terms():
    s = parse_system("vars: x y\neq: 2*x*y + x + 3*y = 7")
    red = axis_reduction(s, [0.0, 2.0], 0)
    # a = 2y + 1 = 5, c_eff = 7 - 3y = 1
    assert red.a.tolist() == [5.0] and red.c_eff.tolist() == [1.0]


def test_degenerate_and_nonquasilinear():
    s = parse_system("vars: x y\neq: x = 1\neq: 2*x = 3")
    with pytest.raises(DegenerateAxis):
        axis_ls_update(s, [0.0, 0.0], 1)
    with pytest.raises(NotQuasiLinear):
        axis_ls_update(parse_system("vars: x\neq: x^2 = 1"), [0.0], 0)


def test_single_axis_optimality(rng):
    eps = 1e-4
    for _ in range(50):
        s = random_quasilinear(rng, 3, 4)
        x = rng.uniform(-2, 2, 3)
        j = int(rng.integers(3))
        try:
            x[j] = axis_ls_update(s, x, j)
        except DegenerateAxis:
            continue
        f = rss(s, x)
        for sgn in (-1, 1):
            y = x.copy()
            y[j] += sgn * eps
            assert rss(s, y) >= f - 1e-12 * (1 + f)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_rss_monotone_per_update(seed):
    rng = np.random.default_rng(seed)
    s = random_quasilinear(rng, 3, 3)
    rep = solve_quasilinear(s, rng.uniform(-2, 2, 3), SolveConfig(max_iters=20))
    vals = [t.rss for t in rep.trace]
    assert all(b <= a * (1 + 1e-12) + 1e-15 for a, b in zip(vals, vals[1:]))


def test_solve_small_linear():
    s = parse_system("vars: x1 x2\neq: x1 + x2 = 2\neq: x1 - x2 = 0")
    rep = solve_quasilinear(s, [0.0, 0.0])
    assert rep.solved
    np.testing.assert_allclose(rep.final_x, [1, 1], atol=1e-4)


def test_diagonal_one_sweep(rng):
    d = rng.uniform(1, 3, 4)
    b = rng.uniform(-3, 3, 4)
    s = LinearSystem(np.diag(d), b).to_polysystem()
    rep = solve_quasilinear(s, rng.uniform(-5, 5, 4))
    assert rep.solved and rep.iterations == 1
    np.testing.assert_allclose(rep.final_x, b / d)


def test_bilinear_system():
    s = parse_system("vars: x1 x2\neq: x1*x2 = 1\neq: x1 = 2")
    rep = solve_quasilinear(s, [1.0, 1.0])
    assert rep.solved
    np.testing.assert_allclose(rep.final_x, [2.0, 0.5], atol=1e-4)


def test_degenerate_axis_flagged():
    s = parse_system("vars: x y\neq: x = 1\neq: 2*x = 2")
    rep = solve_quasilinear(s, [0.0, 5.0])
    assert rep.solved
    assert any("degenerate" in t.direction for t in rep.trace)
    assert "degenerate axes skipped: 2" in rep.message


def test_every_axis_degenerate():
    s = PolySystem((Poly([(1.0, (0, 0))], 2),), [3.0])
    rep = solve_quasilinear(s, [0.0, 0.0])
    assert rep.status is Status.LOCAL_MIN


def test_inconsistent_reaches_fixed_point():
    s = parse_system("vars: x\neq: x = 1\neq: x = 3")
    rep = solve_quasilinear(s, [0.0])
    assert rep.status is Status.LOCAL_MIN
    assert rep.final_x[0] == pytest.approx(2.0)


def test_linear_system_validation():
    with pytest.raises(DimensionError):
        LinearSystem(np.eye(2), [1.0])
    with pytest.raises(DimensionError):
        LinearSystem(np.zeros((0, 2)), [])


def test_gauss_seidel_examples(rng):
    b = rng.uniform(-3, 3, 3)
    np.testing.assert_allclose(gauss_seidel_normal(LinearSystem(np.eye(3), b), np.zeros(3), 1), b)
    out = gauss_seidel_normal(LinearSystem([[2, 0], [0, 3]], [4, 9]), [0, 0], 1)
    np.testing.assert_allclose(out, [2, 3])
    A = rng.normal(size=(5, 5)) + 5 * np.eye(5)
    bb = rng.normal(size=5)
    ref = np.linalg.solve(A.T @ A, A.T @ bb)
    np.testing.assert_allclose(gauss_seidel_normal(LinearSystem(A, bb), np.zeros(5), 200), ref,
                               rtol=1e-8, atol=1e-10)
    with pytest.raises(DegenerateAxis):
        gauss_seidel_normal(LinearSystem([[1.0, 0.0]], [1.0]), [0, 0], 1)


def test_gs_equivalence_examples(rng):
    ls = LinearSystem(np.diag([2.0, -1.0, 4.0]), [1.0, 2.0, 3.0])
    assert check_gs_equivalence(ls, np.zeros(3), 3) == 0.0
    ls = LinearSystem(rng.normal(size=(4, 4)), rng.normal(size=4))
    assert check_gs_equivalence(ls, rng.normal(size=4), 10) <= 1e-10
    ls = LinearSystem(rng.normal(size=(6, 3)), rng.normal(size=6))
    assert check_gs_equivalence(ls, np.zeros(3), 10) <= 1e-10
