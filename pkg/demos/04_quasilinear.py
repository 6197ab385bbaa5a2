"""
Axis updates and Gauss-Seidel
=============================

When no variable appears squared, fixing all unknowns but one leaves a
linear least-squares problem in that unknown with a closed-form answer.
For a linear system, sweeping those exact axis updates is Gauss-Seidel on
the normal equations, update for update.
"""

import numpy as np

from pengrad import (LinearSystem, check_gs_equivalence, gauss_seidel_normal, parse_system,
                     solve_quasilinear)

rng = np.random.default_rng(7)

# An overdetermined linear system and its least-squares solution.
A = rng.normal(size=(8, 4))
b = rng.normal(size=8)
ls = LinearSystem(A, b)
ref = np.linalg.lstsq(A, b, rcond=None)[0]

rep = solve_quasilinear(ls.to_polysystem(), np.zeros(4))
print("axis sweeps:", rep.iterations, rep.status.value)
print("axis updates  ", np.round(rep.final_x, 10))
print("lstsq         ", np.round(ref, 10))
print("Gauss-Seidel  ", np.round(gauss_seidel_normal(ls, np.zeros(4), rep.iterations), 10))
print("largest gap between matching single updates:", check_gs_equivalence(ls, np.zeros(4), 25))

# Quasi-linear but not linear: products of distinct unknowns are allowed.
# (1, 2, 0.5) solves it, but it is not the only solution.
bilinear = parse_system("""
vars: x y z
eq: x*y + z = 2.5
eq: y*z - x = 0
eq: x + y + z = 3.5
""")
rep = solve_quasilinear(bilinear, [1.0, 1.0, 1.0])
print("\nbilinear:", rep.status.value, "after", rep.iterations, "sweeps, x =", rep.final_x)
