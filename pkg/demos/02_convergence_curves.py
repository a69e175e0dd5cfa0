"""
Convergence per period
======================

A "period" is one pass over the M rows of A for the LMS-type solvers and a
single attract-and-project step for ZAP.  With ``trace=True`` a run records
the squared error after every period, which shows how quickly each solver
settles and where it levels off.
"""

from l0cs import make_instance, preset, run

problem = make_instance(m=200, n=1000, k=30, sigma=3.2e-3, seed=7)

traces = {}
for kind in ("l0lms", "l0efwlms", "l0zap"):
    report = run(problem, preset(kind, trace=True))
    traces[kind] = dict(report.msd_trace)
    print(f"{kind}: {report.iterations} iterations, {len(report.msd_trace) - 1} periods")

print()
print(f"{'period':>7s}" + "".join(f"{k:>12s}" for k in traces))
for period in (0, 1, 2, 5, 10, 20, 50, 100, 200, 300, 400, 500, 1000):
    cells = [f"{traces[k][period]:12.3e}" if period in traces[k] else f"{'':12s}" for k in traces]
    print(f"{period:7d}" + "".join(cells))

# ZAP starts from the least-squares solution, so its first entry is already
# far below the others; it reaches its floor within a few hundred periods.
# The LMS-type solvers are still creeping down when they hit the iteration cap.
