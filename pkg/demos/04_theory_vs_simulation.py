"""
Steady-state theory against simulation
======================================

The steady-state analysis of l0-LMS assumes a fresh Gaussian input row at
every iteration.  Here we evaluate the predicted mean-square deviation,
check it against a simulation in exactly that setting, and look at the
step-size bound and the noise-projection ratio.
"""

import numpy as np

from l0cs import make_instance, pseudo_inverse
from l0cs.analysis import (
    TheoremParams,
    msd_upper_bound,
    mu_upper_bound,
    noise_projection_ratio,
    simulate_iid_lms,
    steady_state_msd,
    theorem_constant,
)
from l0cs.core import generate_sensing_matrix

M, N, sigma = 200, 1000, 3.2e-3
print(f"step-size bound 2M/(N+2) = {mu_upper_bound(M, N):.4f}")
for mu in (0.05, 0.1, 0.2, 0.3, 0.39):
    print(f"  mu={mu:<5} C = {theorem_constant(M, N, mu):10.1f}")

# kappa = 0: only the noise term survives.
truth = make_instance(M, N, 30, seed=1).truth.values
for mu in (0.05, 0.1, 0.2):
    pred = steady_state_msd(TheoremParams(M=M, N=N, mu=mu, noise_power=sigma**2))
    # burn-in must cover ~10 time constants M/(2 mu) of the transient
    sim = simulate_iid_lms(truth, M, mu, sigma**2, iterations=60_000, burn_in=30_000, seed=3)
    print(f"mu={mu}: predicted {pred:.3e}  simulated {sim:.3e}  ratio {sim / pred:.2f}")

# With attraction switched on, the worst-case bound is loose by orders of
# magnitude: it assumes every coordinate sits in the attraction band.
p = TheoremParams(M=M, N=N, mu=0.1, kappa=2e-6, alpha=10.0, noise_power=sigma**2,
                  s_l1=float(np.abs(truth).sum()))
print(f"upper bound with kappa=2e-6: {msd_upper_bound(p):.3g}")

# Projecting white noise through A^+ keeps roughly M/N of its power.  The
# finite-size mean is M/(N-M-1), about 25% larger at these sizes.
rng = np.random.default_rng(0)
ratios = []
for t in range(50):
    P = pseudo_inverse(generate_sensing_matrix(M, N, t)).matrix
    v = rng.standard_normal(M)
    ratios.append(np.sum((P @ v) ** 2) / np.sum(v**2))
print(f"noise ratio: simulated {np.mean(ratios):.4f}, M/N {noise_projection_ratio(M, N):.4f}, "
      f"M/(N-M-1) {noise_projection_ratio(M, N, exact=True):.4f}")
