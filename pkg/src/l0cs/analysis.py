"""Steady-state predictions for l0-LMS with i.i.d. N(0, 1/M) regressors.

With ``R = I/M`` the mean-square deviation ``D(n) = E||w(n) - s||^2`` obeys

    D(n+1) = [1 - 2mu/M + (N+2)mu^2/M^2] D(n) + 2kappa(1 - mu/M) a + kappa^2 b + N mu^2 P0 / M

so it converges iff ``0 < mu < 2M/(N+2)`` and settles at

    D(inf) = C [2 kappa (1 - mu/M) a + kappa^2 b + N mu^2 P0 / M],
    C = M^2 / (2 mu M - (N+2) mu^2),

with ``a = E{(w - s)^T g(w)}`` and ``b = E{g(w)^T g(w)}``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .attractors import AttractorParams, attract_vector


class StabilityError(ValueError):
    """Step size outside ``(0, 2M/(N+2))``: the recursion does not converge."""


@dataclass(frozen=True)
class TheoremParams:
    M: int
    N: int
    mu: float
    kappa: float = 0.0
    alpha: float = 10.0
    noise_power: float = 0.0
    a: float = 0.0
    b: float = 0.0
    s_l1: float = 0.0

    def __post_init__(self):
        if self.M < 1 or self.N < 1:
            raise ValueError(f"need M, N >= 1, got M={self.M}, N={self.N}")
        if self.M > self.N:
            raise ValueError(f"need M <= N, got M={self.M}, N={self.N}")
        if self.b < 0 or self.noise_power < 0 or self.s_l1 < 0:
            raise ValueError("b, noise_power and s_l1 must be nonnegative")


def mu_upper_bound(M: int, N: int) -> float:
    """Largest stable step size, ``2M / (N + 2)`` (exclusive)."""
    if M < 1 or N < 1:
        raise ValueError(f"need M, N >= 1, got M={M}, N={N}")
    return 2.0 * M / (N + 2)


def contraction_factor(M: int, N: int, mu: float) -> float:
    """Per-iteration factor ``1 - 2mu/M + (N+2)mu^2/M^2`` multiplying D(n)."""
    return 1.0 - 2.0 * mu / M + (N + 2) * mu * mu / (M * M)


def theorem_constant(M: int, N: int, mu: float) -> float:
    """``M^2 / (2 mu M - (N+2) mu^2)``; raises :class:`StabilityError` off the stable range."""
    denom = 2.0 * mu * M - (N + 2) * mu * mu
    if not mu > 0 or not denom > 0:
        raise StabilityError(
            f"mu={mu} outside the stable range (0, {mu_upper_bound(M, N):.6g}) for M={M}, N={N}"
        )
    return M * M / denom


def steady_state_msd(p: TheoremParams) -> float:
    c = theorem_constant(p.M, p.N, p.mu)
    return c * (
        2.0 * p.kappa * (1.0 - p.mu / p.M) * p.a
        + p.kappa**2 * p.b
        + p.N * p.mu**2 * p.noise_power / p.M
    )


def msd_upper_bound(p: TheoremParams) -> float:
    """Steady-state MSD with ``a <= N + alpha ||s||_1`` and ``b <= N alpha^2`` plugged in."""
    c = theorem_constant(p.M, p.N, p.mu)
    return c * (
        2.0 * p.kappa * (1.0 - p.mu / p.M) * (p.N + p.alpha * p.s_l1)
        + p.N * p.kappa**2 * p.alpha**2
        + p.N * p.mu**2 * p.noise_power / p.M
    )


def estimate_ab(final_estimate, truth, attractor: AttractorParams) -> tuple[float, float]:
    """Single-realization plug-ins for ``a`` and ``b`` at the final iterate."""
    w = np.asarray(final_estimate, dtype=float)
    s = np.asarray(truth, dtype=float)
    if w.shape != s.shape:
        raise ValueError(f"length mismatch: {w.shape} vs {s.shape}")
    g = attract_vector(w, attractor)
    return float((w - s) @ g), float(g @ g)


def noise_projection_ratio(M: int, N: int, exact: bool = False) -> float:
    """``E||A^+ v||^2 / E||v||^2`` for white ``v`` and N(0, 1/M) Gaussian ``A``.

    The default is the large-N approximation ``M/N`` obtained from
    ``A A^T ~ (N/M) I``.  With ``exact=True`` the inverse-Wishart mean
    ``E[(A A^T)^{-1}] = M/(N-M-1) I`` is used instead, giving
    ``M/(N-M-1)``; this needs ``N > M + 1``.
    """
    if not 1 <= M <= N:
        raise ValueError(f"need 1 <= M <= N, got M={M}, N={N}")
    if exact:
        if N <= M + 1:
            raise ValueError(f"exact ratio needs N > M + 1, got M={M}, N={N}")
        return M / (N - M - 1)
    return M / N


def gram_deviation(A) -> float:
    """``max |(M/N) A A^T - I|``: how far ``A A^T`` is from ``(N/M) I``."""
    A = np.asarray(A, dtype=float)
    M, N = A.shape
    return float(np.max(np.abs((M / N) * (A @ A.T) - np.eye(M))))


def simulate_iid_lms(
    truth,
    M: int,
    mu: float,
    noise_power: float,
    attractor: AttractorParams | None = None,
    iterations: int = 30_000,
    burn_in: int = 15_000,
    seed: int = 0,
    chunk: int = 1000,
) -> float:
    """Time-averaged ``||w(n) - s||^2`` of l0-LMS fed fresh N(0, I/M) regressors.

    This is the setting the steady-state formula is derived for: every
    iteration draws a new input row and a new noise sample, rather than
    cycling through the M rows of a fixed matrix.  The average is taken over
    iterations ``burn_in .. iterations``.
    """
    s = np.asarray(truth, dtype=float)
    N = s.shape[0]
    rng = np.random.default_rng(seed)
    sigma = np.sqrt(noise_power)
    w = np.zeros(N)
    acc = 0.0
    count = 0
    done = 0
    while done < iterations:
        size = min(chunk, iterations - done)
        X = rng.standard_normal((size, N)) / np.sqrt(M)
        d = X @ s + sigma * rng.standard_normal(size)
        for i in range(size):
            x = X[i]
            e = d[i] - x @ w
            update = mu * e * x
            if attractor is not None and attractor.kappa > 0:
                update += attractor.kappa * attract_vector(w, attractor)
            w += update
            if done + i >= burn_in:
                diff = w - s
                acc += diff @ diff
                count += 1
        done += size
    return acc / max(count, 1)
