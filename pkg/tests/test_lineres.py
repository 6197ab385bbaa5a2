import numpy as np
import pytest

from conftest import ROSEN_GRAD, random_system
from pengrad.errors import DimensionError, FlatLineError
from pengrad.lineres import (LineProbe, residual_form, restrict_poly, summary_phi,
                             summary_phi_prime)
from pengrad.polycore import Poly, eval_poly, parse_system, rss
from pengrad.univar import UniPoly, u_derivative, u_eval

EQ29 = parse_system("vars: x1 x2\neq: x1*x2 + x1^2*x2 = 0")


def test_probe_validation():
    with pytest.raises(ValueError):
        LineProbe([0, 0], [0, 0])
    with pytest.raises(DimensionError):
        LineProbe([0, 0], [1])
    with pytest.raises(ValueError):
        LineProbe([np.nan], [1])
    p = LineProbe([1, 2], [0, 1])
    np.testing.assert_array_equal(p.point(2.0), [1, 4])


def test_restrict_hand_expansion():
    q = restrict_poly(EQ29.equations[0], LineProbe([0, 0], [1, 1]))
    assert q == UniPoly([0, 0, 1, 1])


def test_restrict_matches_evaluation(rng):
    for _ in range(30):
        s = random_system(rng)
        p = s.equations[0]
        probe = LineProbe(rng.uniform(-2, 2, s.nvars), rng.normal(size=s.nvars))
        q = restrict_poly(p, probe)
        assert q.degree <= p.degree
        assert u_eval(q, 0.0) == pytest.approx(eval_poly(p, probe.base), rel=1e-12, abs=1e-12)
        for a in rng.uniform(-3, 3, 5):
            assert u_eval(q, a) == pytest.approx(eval_poly(p, probe.point(a)), rel=1e-9, abs=1e-9)


def test_restrict_linear_degree():
    p = Poly([(2.0, (1, 0)), (-1.0, (0, 1)), (3.0, (0, 0))], 2)
    assert restrict_poly(p, LineProbe([4, -1], [0.3, 2])).degree <= 1


def test_restrict_dimension_mismatch():
    with pytest.raises(DimensionError):
        restrict_poly(EQ29.equations[0], LineProbe([0, 0, 0], [1, 1, 1]))


def test_summary_phi_hand_example():
    phi = summary_phi(EQ29, LineProbe([0, 0], [1, 1]))
    assert phi == UniPoly([0, 0, 0, 0, 1, 2, 1])
    dphi = summary_phi_prime(EQ29, LineProbe([0, 0], [1, 1]))
    assert dphi == UniPoly([0, 0, 0, 4, 10, 6])
    # residual form has the opposite sign and half the size
    assert residual_form(EQ29, LineProbe([0, 0], [1, 1])) == UniPoly([0, 0, 0, -2, -5, -3])


def test_phi_at_zero_and_solution():
    s = parse_system(ROSEN_GRAD)
    assert u_eval(summary_phi(s, LineProbe([1, 1], [0.3, -0.7])), 0.0) == 0.0
    probe = LineProbe([0.2, -1.0], [1.0, 2.0])
    assert u_eval(summary_phi(s, probe), 0.0) == pytest.approx(rss(s, probe.base))


def test_phi_consistency_with_rss(rng):
    for _ in range(100):
        s = random_system(rng)
        probe = LineProbe(rng.uniform(-2, 2, s.nvars), rng.normal(size=s.nvars))
        phi = summary_phi(s, probe)
        assert phi.leading >= 0 or phi.is_zero()
        a = float(rng.uniform(-10, 10))
        f = rss(s, probe.point(a))
        assert abs(u_eval(phi, a) - f) <= 1e-9 * (1 + f)


def test_phi_prime_matches_derivative(rng):
    for _ in range(100):
        s = random_system(rng)
        probe = LineProbe(rng.uniform(-2, 2, s.nvars), rng.normal(size=s.nvars))
        try:
            dphi = summary_phi_prime(s, probe).coeffs
        except FlatLineError:
            continue
        ref = u_derivative(summary_phi(s, probe)).coeffs
        assert dphi.shape == ref.shape
        assert np.max(np.abs(dphi - ref)) <= 1e-10 * np.max(np.abs(ref))


def test_linear_system_phi_prime_degree():
    s = parse_system("vars: x y\neq: x + y = 2\neq: x - y = 0")
    assert summary_phi_prime(s, LineProbe([0, 3], [1, 0.5])).degree <= 1


def test_rosenbrock_generic_degree(rng):
    s = parse_system(ROSEN_GRAD)
    for _ in range(100):
        probe = LineProbe(rng.uniform(-2, 2, 2), rng.normal(size=2))
        assert summary_phi_prime(s, probe).degree == 5


def test_flat_line():
    s = parse_system("vars: x y\neq: x = 1")
    with pytest.raises(FlatLineError):
        summary_phi_prime(s, LineProbe([0, 0], [0, 1]))
