"""
The benchmark catalog
=====================

Run every bundled system with deepest descent and the three Newton-LM
baselines, then put the iteration counts next to the published ones.
Counts are informational; what matters is whether a run ends SOLVED.
"""

from pengrad import SolveConfig, builtin_catalog, emit_report, run_bench

cases = builtin_catalog()
report = run_bench(cases, SolveConfig(), workers=4)
print(emit_report(report, "table").decode())

published = {c.name: c.published_iterations for c in cases}
print("ours / published (rss1rmax2)")
for case in report.cases:
    ours = next(r for r in case.results if r.method == "rss1rmax2")
    ref = published[case.name].get("rss1rmax2", "n/a")
    print(f"  {case.name:16s} {ours.status:10s} {ours.iterations:5d} / {ref}")

print("\nsolved per method:", report.solve_counts())
