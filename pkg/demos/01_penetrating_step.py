"""
A single penetrating step
=========================

Along a line ``x + a*d`` every equation of a polynomial system becomes a
polynomial in ``a`` and rss becomes the summary polynomial ``phi(a)``.
Its global minimum sits at one of the real roots of ``phi'``, so one
eigenvalue computation gives the exact best step, however far away it is.
"""

import numpy as np

from pengrad import LineProbe, parse_system, pg_step, rss, summary_phi, summary_phi_prime
from pengrad.univar import real_roots, u_eval

# The gradient of the Rosenbrock function, set to zero, is a cubic system.
system = parse_system("""
vars: x1 x2
eq: 400*x1^3 + 2*x1 - 400*x1*x2 - 2 = 0
eq: 200*x2 - 200*x1^2 = 0
""")

# Probe from the origin along x1.
probe = LineProbe([0.0, 0.0], [1.0, 0.0])
phi = summary_phi(system, probe)
dphi = summary_phi_prime(system, probe)
print("phi  degree", phi.degree, " coefficients", np.round(phi.coeffs, 3))
print("phi' degree", dphi.degree)

# Every real stationary point of phi is a candidate step.
for a in real_roots(dphi):
    print(f"  a = {a: .6f}   rss = {u_eval(phi, a):.6f}")

# pg_step does the same ranking (plus a = 0) and moves to the winner.
step = pg_step(system, probe)
print("chosen a =", step.alpha_star, " rss", rss(system, [0, 0]), "->", step.rss_new)

# A probe that passes through a solution finds it in one step, whatever the distance.
far = LineProbe([-30.0, -30.0], [1.0, 1.0])
hit = pg_step(system, far)
print("from [-30, -30] along [1, 1]: x =", hit.x_new, " rss =", hit.rss_new)
