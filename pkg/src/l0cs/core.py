"""Problem instances: Gaussian sensing matrices, sparse signals, noisy
measurements, error metrics and the on-disk instance container.

All randomness flows through :func:`numpy.random.default_rng` (PCG64) seeded
with a 64-bit integer.  Gaussian variates come from numpy's ziggurat sampler
(``Generator.standard_normal``), so an instance is bit-reproducible for a
given seed on a given numpy build.  Independent streams for the matrix, the
signal and the noise are split off a single instance seed with
:func:`derive_seed`.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

__all__ = [
    "Measurements",
    "ProblemInstance",
    "SparseSignal",
    "derive_seed",
    "generate_sensing_matrix",
    "generate_sparse_signal",
    "make_instance",
    "measure",
    "msd",
    "relative_error",
    "snr_db",
    "load_instance",
    "save_instance",
]

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def _splitmix64(z: int) -> int:
    z = (z + _GOLDEN) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def derive_seed(master: int, *indices: int) -> int:
    """Mix a master seed with a path of indices into a new 64-bit seed.

    Each step computes ``splitmix64(seed ^ splitmix64(index))``.  SplitMix64
    is a bijection on 64-bit words, so for a fixed master seed distinct
    trial indices below 2**64 always give distinct child seeds.
    """
    seed = int(master) & _MASK64
    for index in indices:
        seed = _splitmix64(seed ^ _splitmix64(int(index) & _MASK64))
    return seed


def _rng(seed: int) -> np.random.Generator:
    return np.random.default_rng(int(seed) & _MASK64)


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=float)
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class SparseSignal:
    """A K-sparse length-N vector together with its sorted support."""

    values: np.ndarray
    support: np.ndarray

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def k(self) -> int:
        return self.support.shape[0]


@dataclass(frozen=True)
class Measurements:
    values: np.ndarray
    noise: np.ndarray
    noise_sigma: float
    noise_power: float

    @property
    def m(self) -> int:
        return self.values.shape[0]


@dataclass(frozen=True)
class ProblemInstance:
    """One reconstruction task ``y = A s + v``."""

    matrix: np.ndarray
    truth: SparseSignal
    measurements: Measurements
    seed: int

    def __post_init__(self):
        m, n = self.matrix.shape
        if self.truth.n != n or self.measurements.m != m:
            raise ValueError(
                f"inconsistent dimensions: matrix {m}x{n}, signal {self.truth.n}, "
                f"measurements {self.measurements.m}"
            )

    @property
    def shape(self) -> tuple[int, int]:
        return self.matrix.shape

    @property
    def y(self) -> np.ndarray:
        return self.measurements.values


def generate_sensing_matrix(m: int, n: int, seed: int) -> np.ndarray:
    """Draw an ``m x n`` matrix with i.i.d. N(0, 1/m) entries.

    The returned array is read-only.
    """
    if m < 1 or n < 1:
        raise ValueError(f"matrix dimensions must be positive, got {m}x{n}")
    a = _rng(seed).standard_normal((m, n)) / np.sqrt(m)
    return _frozen(a)


def _partial_shuffle(rng: np.random.Generator, n: int, k: int) -> np.ndarray:
    # first k steps of a Fisher-Yates shuffle
    perm = np.arange(n)
    for i in range(k):
        j = int(rng.integers(i, n))
        perm[i], perm[j] = perm[j], perm[i]
    return np.sort(perm[:k])


def generate_sparse_signal(n: int, k: int, seed: int, normalize: str = "peak") -> SparseSignal:
    """Draw a K-sparse signal with uniformly placed Gaussian nonzeros.

    Parameters
    ----------
    n, k : int
        Signal length and number of nonzeros, ``1 <= k <= n``.
    seed : int
        64-bit seed.
    normalize : {"peak", "l2"}
        ``"peak"`` scales the signal so that ``max |s_j| = 1``; ``"l2"``
        scales it to unit Euclidean norm.

    Returns
    -------
    SparseSignal
    """
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
    if normalize not in ("peak", "l2"):
        raise ValueError(f"unknown normalization {normalize!r}")
    rng = _rng(seed)
    support = _partial_shuffle(rng, n, k)
    coeffs = rng.standard_normal(k)
    scale = np.max(np.abs(coeffs)) if normalize == "peak" else np.linalg.norm(coeffs)
    values = np.zeros(n)
    values[support] = coeffs / scale
    return SparseSignal(_frozen(values), np.asarray(support, dtype=np.int64))


def measure(A: np.ndarray, s, sigma: float, seed: int) -> Measurements:
    """Form ``y = A s + v`` with ``v ~ N(0, sigma^2 I)``."""
    values = s.values if isinstance(s, SparseSignal) else np.asarray(s, dtype=float)
    A = np.asarray(A)
    if A.ndim != 2 or values.shape != (A.shape[1],):
        raise ValueError(f"dimension mismatch: A {A.shape}, s {values.shape}")
    if sigma < 0:
        raise ValueError("sigma must be nonnegative")
    m = A.shape[0]
    noise = sigma * _rng(seed).standard_normal(m) if sigma > 0 else np.zeros(m)
    y = A @ values + noise
    return Measurements(_frozen(y), _frozen(noise), float(sigma), float(sigma) ** 2)


def make_instance(
    m: int,
    n: int,
    k: int,
    sigma: float = 0.0,
    seed: int = 0,
    normalize: str = "peak",
    snr: float | None = None,
) -> ProblemInstance:
    """Build a full instance from one seed.

    When ``snr`` (dB) is given it overrides ``sigma``: the noise level is
    calibrated against the realized ``||A s||``.
    """
    A = generate_sensing_matrix(m, n, derive_seed(seed, 0))
    s = generate_sparse_signal(n, k, derive_seed(seed, 1), normalize=normalize)
    if snr is not None:
        sigma = sigma_for_snr(snr, A, s.values)
    meas = measure(A, s, sigma, derive_seed(seed, 2))
    return ProblemInstance(A, s, meas, int(seed) & _MASK64)


def sigma_for_snr(target_snr_db: float, A: np.ndarray, s) -> float:
    """Noise level whose expected SNR against ``||A s||^2`` equals the target."""
    values = s.values if isinstance(s, SparseSignal) else np.asarray(s, dtype=float)
    m = A.shape[0]
    return float(np.linalg.norm(A @ values) / (np.sqrt(m) * 10.0 ** (target_snr_db / 20.0)))


def msd(estimate, truth) -> float:
    """Squared Euclidean distance ``||estimate - truth||^2`` (not normalized)."""
    estimate = np.asarray(estimate, dtype=float)
    truth = np.asarray(truth, dtype=float)
    if estimate.shape != truth.shape:
        raise ValueError(f"length mismatch: {estimate.shape} vs {truth.shape}")
    d = estimate - truth
    return float(d @ d)


def relative_error(estimate, truth) -> float:
    """``||estimate - truth|| / ||truth||``."""
    return float(np.sqrt(msd(estimate, truth)) / np.linalg.norm(truth))


def snr_db(A: np.ndarray, s, v) -> float:
    """``10 log10(||A s||^2 / ||v||^2)``.

    Raises
    ------
    ZeroDivisionError
        If the noise vector is identically zero (infinite SNR).
    """
    values = s.values if isinstance(s, SparseSignal) else np.asarray(s, dtype=float)
    v = np.asarray(v, dtype=float)
    signal = A @ values
    if signal.shape != v.shape:
        raise ValueError(f"dimension mismatch: As {signal.shape}, v {v.shape}")
    noise_energy = float(v @ v)
    if noise_energy == 0.0:
        raise ZeroDivisionError("zero noise vector: SNR is infinite")
    return 10.0 * np.log10(float(signal @ signal) / noise_energy)


# Instance container: a numpy .npz archive (uncompressed) holding
#   header  uint64[5]  = (M, N, K, seed, format version)
#   sigma   float64[]  noise standard deviation
#   matrix  float64[M, N] row-major
#   truth   float64[N]
#   y       float64[M]
#   noise   float64[M]
_FORMAT_VERSION = 1


def save_instance(problem: ProblemInstance, path) -> Path:
    path = Path(path)
    m, n = problem.shape
    header = np.array([m, n, problem.truth.k, problem.seed, _FORMAT_VERSION], dtype=np.uint64)
    with open(path, "wb") as fh:
        np.savez(
            fh,
            header=header,
            sigma=np.float64(problem.measurements.noise_sigma),
            matrix=np.ascontiguousarray(problem.matrix),
            truth=problem.truth.values,
            y=problem.measurements.values,
            noise=problem.measurements.noise,
        )
    return path


def load_instance(path) -> ProblemInstance:
    with np.load(Path(path), allow_pickle=False) as data:
        m, n, k, seed, version = (int(v) for v in data["header"])
        if version != _FORMAT_VERSION:
            raise ValueError(f"unsupported instance format version {version}")
        sigma = float(data["sigma"])
        matrix = data["matrix"]
        truth = data["truth"]
        y = data["y"]
        noise = data["noise"]
    if matrix.shape != (m, n) or truth.shape != (n,) or y.shape != (m,):
        raise ValueError(f"corrupt instance file {path}: shapes disagree with header")
    support = np.flatnonzero(truth)
    if support.size != k:
        raise ValueError(f"corrupt instance file {path}: header says K={k}, found {support.size}")
    signal = SparseSignal(_frozen(truth), support.astype(np.int64))
    meas = Measurements(_frozen(y), _frozen(noise), sigma, sigma**2)
    return ProblemInstance(_frozen(matrix), signal, meas, seed)
