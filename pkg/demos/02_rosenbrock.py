"""
Rosenbrock from the far side of the valley
==========================================

Driving the Rosenbrock gradient to zero from ``[0, 0]``: the minimum at
``[1, 1]`` lies behind the curved valley wall.  Compare deepest descent,
the three Newton-LM line-search baselines and a gradient-only penetrating
search, and look at the longest single move each one makes.
"""

import numpy as np

from pengrad import SolveConfig, deepest_descent, parse_system, solve_baseline

system = parse_system("""
vars: x1 x2
eq: 400*x1^3 + 2*x1 - 400*x1*x2 - 2 = 0
eq: 200*x2 - 200*x1^2 = 0
""")
x0 = [0.0, 0.0]

runs = {
    "rss1rmax2": deepest_descent(system, x0),
    "gradient only": deepest_descent(system, x0, SolveConfig(newton=False, coordinate_axes=False,
                                                             max_iters=2000)),
    "backnlm": solve_baseline(system, x0, "backnlm"),
    "wolfenlm": solve_baseline(system, x0, "wolfenlm"),
    "pgnlm": solve_baseline(system, x0, "pgnlm"),
}

print(f"{'method':14s} {'status':10s} {'iters':>6s} {'longest step':>13s}  final x")
for name, rep in runs.items():
    longest = max(abs(t.alpha) for t in rep.trace)
    print(f"{name:14s} {rep.status.value:10s} {rep.iterations:6d} {longest:13.4f}  "
          f"{np.array2string(rep.final_x, precision=6)}")

# The trace of the penetrating baseline: the first few moves.
print()
for row in list(runs["pgnlm"].trace_rows())[:6]:
    print("iter {:3d} {:8s} step {: .4f} rss {:.3e} max|r| {:.3e}".format(*row))
