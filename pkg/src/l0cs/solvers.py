"""Adaptive-filter reconstruction of sparse signals.

The rows of ``A`` play the role of filter input vectors and the entries of
``y`` the desired outputs; rows are reused cyclically, row
``k = mod(n, M) + 1`` (1-based) feeding iteration ``n``.  Four solvers share
the framework:

``L0LMS``
    LMS step plus zero attraction.
``L0NLMS``
    As L0LMS with the gradient step divided by ``beta + x^T x``.
``L0EFWLMS``
    Gradient over a sliding window of the last ``Q`` rows, weighted by
    ``lambda^(Q-1), ..., lambda^0``, plus zero attraction.
``L0ZAP``
    Start from ``A^+ y``, then alternate a zero-attraction step with an
    exact projection back onto ``{s : A s = y}``.

All four evaluate the attractor at the *previous* iterate ``s(n-1)``.
Iteration stops when ``||s(n) - s(n-1)|| < epsilon`` or after ``max_iter``
iterations.  The test is applied after every single iteration, so for the
per-sample solvers ``epsilon`` bounds the change caused by one row, not by a
full pass over ``A``.
"""

from __future__ import annotations

import enum
import time
from dataclasses import dataclass, field, replace

import numpy as np

from . import _kernels
from .attractors import AttractorKind, AttractorParams, attract_vector
from .core import ProblemInstance, msd
from .projection import PseudoInverse, least_squares_solution, pseudo_inverse, project


class SolverKind(str, enum.Enum):
    L0LMS = "l0lms"
    L0NLMS = "l0nlms"
    L0EFWLMS = "l0efwlms"
    L0ZAP = "l0zap"


class DivergenceError(ArithmeticError):
    """The iterate became non-finite (typically a step size above the bound)."""

    def __init__(self, iteration: int, kind: SolverKind | str = ""):
        self.iteration = iteration
        self.kind = kind
        super().__init__(f"{kind or 'solver'} diverged at iteration {iteration}")


@dataclass(frozen=True)
class SolverConfig:
    """Tuning parameters for one solver run.

    ``mu`` is ignored by L0ZAP, ``window``/``forgetting`` are only read by
    L0EFWLMS and ``beta`` only by L0NLMS.
    """

    kind: SolverKind
    mu: float = 0.1
    attractor: AttractorParams = field(default_factory=AttractorParams)
    window: int = 4
    forgetting: float = 0.8
    beta: float = 1e-3
    epsilon: float = 1e-4
    max_iter: int = 100_000
    trace: bool = False

    def __post_init__(self):
        object.__setattr__(self, "kind", SolverKind(self.kind))
        if not self.epsilon > 0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")
        if int(self.max_iter) != self.max_iter or self.max_iter < 1:
            raise ValueError(f"max_iter must be a positive integer, got {self.max_iter}")
        if self.kind is not SolverKind.L0ZAP and not self.mu > 0:
            raise ValueError(f"mu must be positive, got {self.mu}")
        if self.kind is SolverKind.L0EFWLMS:
            if int(self.window) != self.window or self.window < 1:
                raise ValueError(f"window must be a positive integer, got {self.window}")
            if not 0 < self.forgetting <= 1:
                raise ValueError(f"forgetting factor must lie in (0, 1], got {self.forgetting}")
        if self.kind is SolverKind.L0NLMS and not self.beta > 0:
            raise ValueError(f"beta must be positive, got {self.beta}")

    def with_(self, **changes) -> "SolverConfig":
        """Copy with changes; ``kappa``, ``alpha`` and ``delta`` reach into the attractor."""
        att = {k: changes.pop(k) for k in ("kappa", "alpha", "delta") if k in changes}
        if att:
            changes["attractor"] = replace(changes.get("attractor", self.attractor), **att)
        return replace(self, **changes)


_PRESETS = {
    SolverKind.L0LMS: dict(mu=0.1, attractor=AttractorParams(alpha=10.0, kappa=2e-6)),
    SolverKind.L0EFWLMS: dict(
        mu=0.1, attractor=AttractorParams(alpha=10.0, kappa=2e-6), window=4, forgetting=0.8
    ),
    SolverKind.L0ZAP: dict(attractor=AttractorParams(alpha=10.0, kappa=5e-4), max_iter=1000),
    # mu / (beta + x^T x) ~ 0.1 for rows of squared norm N/M = 5, matching L0LMS
    SolverKind.L0NLMS: dict(mu=0.5, beta=1e-3, attractor=AttractorParams(alpha=10.0, kappa=2e-6)),
}


def preset(kind: SolverKind | str, **overrides) -> SolverConfig:
    """Settings used in the reference experiment (N=1000, M=200, K=30)."""
    kind = SolverKind(kind)
    return SolverConfig(kind, **_PRESETS[kind]).with_(**overrides)


@dataclass(frozen=True)
class SolverState:
    estimate: np.ndarray
    prev_estimate: np.ndarray
    n: int = 1

    @property
    def step_norm(self) -> float:
        return float(np.linalg.norm(self.estimate - self.prev_estimate))


@dataclass
class RunReport:
    final_estimate: np.ndarray
    iterations: int
    converged: bool
    elapsed: float
    step_norm: float
    msd_trace: list[tuple[int, float]] | None = None

    @property
    def stop_reason(self) -> str:
        return "epsilon" if self.converged else "max_iter"


def row_index(n: int, M: int) -> int:
    """1-based row used at iteration ``n``: ``mod(n, M) + 1``."""
    if n < 1 or M < 1:
        raise ValueError(f"need n >= 1 and M >= 1, got n={n}, M={M}")
    return n % M + 1


def initial_state(A, y, cfg: SolverConfig, pinv: PseudoInverse | None = None) -> SolverState:
    """``s(0) = 0`` for the LMS family, ``s(0) = A^+ y`` for L0ZAP.

    The returned state is positioned at ``n = 1`` with
    ``estimate == prev_estimate == s(0)``.
    """
    if cfg.kind is SolverKind.L0ZAP:
        s0 = least_squares_solution(A, y, pinv if pinv is not None else pseudo_inverse(A))
    else:
        s0 = np.zeros(np.shape(A)[1])
    return SolverState(s0, s0.copy(), 1)


def _check_kind(cfg, *kinds):
    if cfg.kind not in kinds:
        raise ValueError(f"config kind {cfg.kind.value} not valid here")


def _advance(state: SolverState, new: np.ndarray) -> SolverState:
    if not np.all(np.isfinite(new)):
        raise DivergenceError(state.n)
    return SolverState(new, state.estimate, state.n + 1)


def _gradient_step(state, A, y, cfg, normalize):
    s = state.estimate
    k = row_index(state.n, A.shape[0]) - 1
    x = A[k]
    e = y[k] - x @ s
    step = cfg.mu * e
    if normalize:
        step = step / (cfg.beta + x @ x)
    return s + step * x + cfg.attractor.kappa * attract_vector(s, cfg.attractor)


def l0_lms_iterate(state: SolverState, A, y, cfg: SolverConfig) -> SolverState:
    """One l0-LMS step: ``s + mu e x + kappa g(s)`` with ``x = a_k``, ``e = y_k - x^T s``.

    The returned state's ``n`` is one larger; its ``estimate`` is
    ``s(n)`` and ``prev_estimate`` is ``s(n-1)``.
    """
    _check_kind(cfg, SolverKind.L0LMS)
    return _advance(state, _gradient_step(state, A, y, cfg, normalize=False))


def l0_nlms_iterate(state: SolverState, A, y, cfg: SolverConfig) -> SolverState:
    _check_kind(cfg, SolverKind.L0NLMS)
    return _advance(state, _gradient_step(state, A, y, cfg, normalize=True))


def window_rows(n: int, Q: int, M: int) -> np.ndarray:
    """0-based rows feeding the window ending at iteration ``n``, oldest first.

    Indices ``i = n-Q+1 .. n`` that are not positive wrap backwards through
    the rows (nonnegative modulus), so the window is full from ``n = 1``.
    """
    return np.arange(n - Q + 1, n + 1) % M


def l0_efwlms_iterate(state: SolverState, A, y, cfg: SolverConfig) -> SolverState:
    """One l0-EFWLMS step: ``s + mu X Lambda e' + kappa g(s)``."""
    _check_kind(cfg, SolverKind.L0EFWLMS)
    s = state.estimate
    Q = int(cfg.window)
    rows = window_rows(state.n, Q, A.shape[0])
    X = A[rows]  # Q x N, i.e. X(n)^T
    weights = cfg.forgetting ** np.arange(Q - 1, -1, -1, dtype=float)
    err = y[rows] - X @ s
    new = s + cfg.mu * ((weights * err) @ X) + cfg.attractor.kappa * attract_vector(s, cfg.attractor)
    return _advance(state, new)


def l0_zap_iterate(state: SolverState, A, y, pinv: PseudoInverse, cfg: SolverConfig) -> SolverState:
    """One l0-ZAP step: attract, then project onto ``{s : A s = y}``."""
    _check_kind(cfg, SolverKind.L0ZAP)
    s = state.estimate
    attracted = s + cfg.attractor.kappa * attract_vector(s, cfg.attractor)
    return _advance(state, project(attracted, A, y, pinv))


def iterate(state: SolverState, A, y, cfg: SolverConfig, pinv: PseudoInverse | None = None):
    """Dispatch one step of whichever solver ``cfg`` selects."""
    if cfg.kind is SolverKind.L0LMS:
        return l0_lms_iterate(state, A, y, cfg)
    if cfg.kind is SolverKind.L0NLMS:
        return l0_nlms_iterate(state, A, y, cfg)
    if cfg.kind is SolverKind.L0EFWLMS:
        return l0_efwlms_iterate(state, A, y, cfg)
    if pinv is None:
        raise ValueError("L0ZAP needs the pseudo-inverse of A")
    return l0_zap_iterate(state, A, y, pinv, cfg)


def _period_length(cfg, M):
    return 1 if cfg.kind is SolverKind.L0ZAP else M


def _run_stepwise(A, y, cfg, truth, pinv):
    if cfg.kind is SolverKind.L0ZAP and pinv is None:
        pinv = pseudo_inverse(A)
    state = initial_state(A, y, cfg, pinv)
    period = _period_length(cfg, A.shape[0])
    trace = [] if cfg.trace else None
    if trace is not None:
        trace.append((0, msd(state.estimate, truth)))
    while True:
        n = state.n
        try:
            with np.errstate(over="ignore", invalid="ignore"):
                state = iterate(state, A, y, cfg, pinv)
        except DivergenceError as exc:
            raise DivergenceError(exc.iteration, cfg.kind) from None
        if trace is not None and n % period == 0:
            trace.append((n // period, msd(state.estimate, truth)))
        step = state.step_norm
        if step < cfg.epsilon:
            return state.estimate, n, True, step, trace
        if n >= cfg.max_iter:
            return state.estimate, n, False, step, trace


def _run_compiled(A, y, cfg, truth):
    M, N = A.shape
    s = np.zeros(N)
    att = cfg.attractor
    kind = _kernels.EXPONENTIAL if att.kind is AttractorKind.EXPONENTIAL else _kernels.RECIPROCAL
    A = np.ascontiguousarray(A, dtype=float)
    y = np.ascontiguousarray(y, dtype=float)
    if cfg.trace:
        trace_buf = np.full(int(cfg.max_iter) // M + 1, np.nan)
        trace_buf[0] = msd(s, truth)
        truth_arr = np.ascontiguousarray(truth, dtype=float)
    else:
        trace_buf = truth_arr = np.zeros(0)
    if cfg.kind is SolverKind.L0EFWLMS:
        n, status, step = _kernels.efwlms_loop(
            A, y, s, cfg.mu, att.kappa, kind, att.shape_param, int(cfg.window),
            cfg.forgetting, cfg.epsilon, int(cfg.max_iter), truth_arr, trace_buf,
        )
    else:
        n, status, step = _kernels.lms_loop(
            A, y, s, cfg.mu, att.kappa, kind, att.shape_param, cfg.beta,
            cfg.kind is SolverKind.L0NLMS, cfg.epsilon, int(cfg.max_iter), truth_arr, trace_buf,
        )
    if status < 0:
        raise DivergenceError(int(n), cfg.kind)
    trace = None
    if cfg.trace:
        last = int(n) // M
        trace = [(p, float(trace_buf[p])) for p in range(last + 1)]
    return s, int(n), status == 1, float(step), trace


def run(
    problem: ProblemInstance,
    cfg: SolverConfig,
    pinv: PseudoInverse | None = None,
    stepwise: bool = False,
) -> RunReport:
    """Reconstruct ``problem.truth`` from ``(A, y)`` with the configured solver.

    Parameters
    ----------
    problem : ProblemInstance
    cfg : SolverConfig
    pinv : PseudoInverse, optional
        Precomputed pseudo-inverse for L0ZAP; computed (and timed) here if
        omitted.
    stepwise : bool
        Drive the solver through the Python ``*_iterate`` functions instead of
        the compiled loops.  Much slower; same arithmetic.

    Raises
    ------
    DivergenceError
        If the iterate becomes non-finite.
    """
    A = problem.matrix
    y = problem.y
    truth = problem.truth.values
    start = time.perf_counter()
    if stepwise or cfg.kind is SolverKind.L0ZAP:
        est, n, conv, step, trace = _run_stepwise(A, y, cfg, truth, pinv)
    else:
        est, n, conv, step, trace = _run_compiled(A, y, cfg, truth)
    elapsed = time.perf_counter() - start
    return RunReport(est, n, conv, elapsed, step, trace)
