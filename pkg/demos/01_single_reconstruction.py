"""
Reconstructing one sparse signal
================================

A 30-sparse signal of length 1000 is observed through 200 noisy Gaussian
measurements.  Each of the four adaptive solvers recovers it, and so do the
two reference methods (orthogonal matching pursuit, minimum-norm least
squares) for comparison.
"""

import numpy as np

from l0cs import make_instance, msd, preset, relative_error, run
from l0cs.baselines import least_squares, omp

# One instance: A has N(0, 1/M) entries, the nonzeros of s are Gaussian and
# scaled so the largest has magnitude 1, the noise has sigma = 3.2e-3.
problem = make_instance(m=200, n=1000, k=30, sigma=3.2e-3, seed=2024)
truth = problem.truth.values
print(f"instance: M={problem.shape[0]} N={problem.shape[1]} K={problem.truth.k}")

# The adaptive solvers use the shipped presets.  LMS, NLMS and EFWLMS
# sweep the rows of A cyclically; ZAP alternates attraction with an exact
# projection onto {s : A s = y}.
print(f"{'solver':>10s} {'iters':>7s} {'stop':>9s} {'seconds':>8s} {'msd':>10s} {'rel.err':>8s}")
for kind in ("l0lms", "l0nlms", "l0efwlms", "l0zap"):
    report = run(problem, preset(kind))
    print(
        f"{kind:>10s} {report.iterations:7d} {report.stop_reason:>9s} {report.elapsed:8.3f} "
        f"{msd(report.final_estimate, truth):10.3g} {relative_error(report.final_estimate, truth):8.3f}"
    )

# Greedy and least-squares references.
for name, est in [("omp", omp(problem.matrix, problem.y, sparsity=30)),
                  ("lstsq", least_squares(problem.matrix, problem.y))]:
    print(f"{name:>10s} {'':7s} {'':9s} {'':8s} {msd(est, truth):10.3g} {relative_error(est, truth):8.3f}")

# The minimum-norm solution spreads energy over all 1000 coordinates; the
# zero attractor is what pulls the off-support entries back to (near) zero.
est = run(problem, preset("l0zap")).final_estimate
off = np.delete(est, problem.truth.support)
print(f"ZAP off-support magnitude: max {np.abs(off).max():.2e}, rms {np.sqrt(np.mean(off**2)):.2e}")
