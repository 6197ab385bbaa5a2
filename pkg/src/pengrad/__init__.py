"""Penetrating-gradient line search and deepest descent for polynomial systems."""
from .errors import (DegenerateAxis, DimensionError, FlatLineError, NotQuasiLinear,
                     NumericFailure, ParseError, PolySystemError, SingularDirection,
                     ZeroGradient, ZeroPolynomialError)
from .polycore import (Poly, PolySystem, Term, eval_poly, evaluate, format_poly, format_system,
                       grad_rss, jacobian, parse_system, partial, residuals, rss)
from .univar import UniPoly, real_roots, u_add, u_derivative, u_eval, u_mul, u_scale
from .lineres import LineProbe, residual_form, restrict_poly, summary_phi, summary_phi_prime
from .solver import (SolveConfig, SolveReport, Status, StepResult, coordinate_directions,
                     deepest_descent, direction_gradient, direction_newton_lm, pg_step,
                     solve_baseline)
from .quasilin import (AxisReduction, LinearSystem, axis_ls_update, check_gs_equivalence,
                       gauss_seidel_normal, solve_quasilinear)
from .bench import BenchCase, BenchReport, builtin_catalog, emit_report, run_bench

__version__ = "0.1.0"
