"""Compiled inner loops for the per-sample LMS-family solvers.

These are straight transcriptions of the stepwise updates in
:mod:`l0cs.solvers`; the test-suite checks that both paths agree.
Status codes: 1 converged on the step-norm test, 0 hit the iteration cap,
-1 produced a non-finite value.
"""

import numba
import numpy as np

EXPONENTIAL = 0
RECIPROCAL = 1


@numba.njit(cache=True)
def attract(x, kind, p):
    if x == 0.0:
        return 0.0
    if kind == EXPONENTIAL:
        if -1.0 / p <= x < 0.0:
            return p * p * x + p
        if 0.0 < x <= 1.0 / p:
            return p * p * x - p
        return 0.0
    ax = abs(x)
    return -p * (x / ax) / ((ax + p) * (ax + p))


@numba.njit(cache=True)
def _msd(s, truth):
    acc = 0.0
    for j in range(s.shape[0]):
        d = s[j] - truth[j]
        acc += d * d
    return acc


@numba.njit(cache=True)
def lms_loop(A, y, s, mu, kappa, kind, p, beta, normalized, eps, max_iter, truth, trace):
    """Run l0-LMS (or l0-NLMS when ``normalized``) in place on ``s``.

    ``trace`` receives the MSD against ``truth`` at the end of every period
    (every M iterations) when it has nonzero length.
    Returns ``(iterations, status, last_step_norm)``.
    """
    M, N = A.shape
    g = np.empty(N)
    n = 1
    while True:
        k = n % M
        e = y[k]
        for j in range(N):
            e -= A[k, j] * s[j]
        step = mu * e
        if normalized:
            xx = 0.0
            for j in range(N):
                xx += A[k, j] * A[k, j]
            step = step / (beta + xx)
        for j in range(N):
            g[j] = attract(s[j], kind, p)
        d2 = 0.0
        for j in range(N):
            dj = step * A[k, j] + kappa * g[j]
            s[j] += dj
            d2 += dj * dj
        if not np.isfinite(d2):
            return n, -1, d2
        if trace.shape[0] > 0 and n % M == 0 and n // M < trace.shape[0]:
            trace[n // M] = _msd(s, truth)
        if np.sqrt(d2) < eps:
            return n, 1, np.sqrt(d2)
        if n >= max_iter:
            return n, 0, np.sqrt(d2)
        n += 1


@numba.njit(cache=True)
def efwlms_loop(A, y, s, mu, kappa, kind, p, Q, lam, eps, max_iter, truth, trace):
    """Run l0-EFWLMS in place on ``s``; same contract as :func:`lms_loop`."""
    M, N = A.shape
    g = np.empty(N)
    werr = np.empty(Q)
    rows = np.empty(Q, dtype=np.int64)
    weights = np.empty(Q)
    for q in range(Q):
        weights[q] = lam ** (Q - 1 - q)
    n = 1
    while True:
        for q in range(Q):
            i = n - Q + 1 + q
            k = ((i % M) + M) % M
            rows[q] = k
            e = y[k]
            for j in range(N):
                e -= A[k, j] * s[j]
            werr[q] = weights[q] * e
        for j in range(N):
            g[j] = attract(s[j], kind, p)
        d2 = 0.0
        for j in range(N):
            acc = 0.0
            for q in range(Q):
                acc += A[rows[q], j] * werr[q]
            dj = mu * acc + kappa * g[j]
            s[j] += dj
            d2 += dj * dj
        if not np.isfinite(d2):
            return n, -1, d2
        if trace.shape[0] > 0 and n % M == 0 and n // M < trace.shape[0]:
            trace[n // M] = _msd(s, truth)
        if np.sqrt(d2) < eps:
            return n, 1, np.sqrt(d2)
        if n >= max_iter:
            return n, 0, np.sqrt(d2)
        n += 1


def warm_up():
    """Compile the kernels on a tiny problem so later timings exclude JIT."""
    A = np.eye(2)
    y = np.ones(2)
    empty = np.zeros(0)
    lms_loop(A, y, np.zeros(2), 0.1, 0.0, EXPONENTIAL, 10.0, 0.0, False, 1e-3, 2, empty, empty)
    efwlms_loop(A, y, np.zeros(2), 0.1, 0.0, EXPONENTIAL, 10.0, 2, 0.8, 1e-3, 2, empty, empty)
