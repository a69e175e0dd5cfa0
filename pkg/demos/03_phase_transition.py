"""
Where recovery breaks down
==========================

A small sweep over the sparsity K at fixed M=200, N=1000.  For each K a
handful of noiseless instances is drawn and each solver counts as
successful when ``||s_hat - s|| / ||s|| < tau_exact``.  The result is
written as CSV and as an SVG chart next to this script.

Ten trials per point keeps the run to a few minutes; the command-line
``l0cs bench exp2`` runs the full sweep.
"""

from pathlib import Path

from l0cs.bench import emit_plot, experiment_preset, run_experiment, write_results

here = Path(__file__).parent
spec = experiment_preset("exp2", grid=(20, 30, 40, 50, 60), trials=10)


def progress(done, total):
    if done % 10 == 0 or done == total:
        print(f"  {done}/{total} trials", flush=True)


result = run_experiment(spec, progress=progress)

for name in result.solvers():
    ks, probs = result.series(name)
    print(f"{name:>9s} " + "  ".join(f"K={int(k)}:{p:.1f}" for k, p in zip(ks, probs)))

write_results(result, here / "phase_transition.csv")
emit_plot(result, here / "phase_transition.svg", title="success probability vs K")
print("wrote phase_transition.csv and phase_transition.svg")
