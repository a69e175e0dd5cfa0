"""Least-squares pseudo-inverse ``A^+ = A^T (A A^T)^{-1}`` and projection
onto the affine solution set ``{s : A s = y}``."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import linalg

#: Condition number of ``A A^T`` above which the pseudo-inverse is refused.
MAX_GRAM_CONDITION = 1e12


class SingularMatrixError(np.linalg.LinAlgError):
    """``A A^T`` is singular or too ill-conditioned to invert reliably."""


@dataclass(frozen=True)
class PseudoInverse:
    matrix: np.ndarray
    source_dims: tuple[int, int]
    gram_conditioning: float

    def __matmul__(self, other):
        return self.matrix @ other


def pseudo_inverse(A: np.ndarray) -> PseudoInverse:
    """Right pseudo-inverse of a full-row-rank matrix via Cholesky of ``A A^T``.

    Raises
    ------
    SingularMatrixError
        If ``A A^T`` is not numerically positive definite or its condition
        number exceeds :data:`MAX_GRAM_CONDITION`.
    """
    A = np.asarray(A, dtype=float)
    if A.ndim != 2:
        raise ValueError(f"expected a matrix, got shape {A.shape}")
    gram = A @ A.T
    cond = float(np.linalg.cond(gram))
    if not np.isfinite(cond) or cond > MAX_GRAM_CONDITION:
        raise SingularMatrixError(f"A A^T is numerically singular (condition {cond:.3g})")
    try:
        factor = linalg.cho_factor(gram, lower=True, check_finite=False)
    except np.linalg.LinAlgError as exc:
        raise SingularMatrixError(f"Cholesky of A A^T failed: {exc}") from exc
    pinv = linalg.cho_solve(factor, A, check_finite=False).T
    pinv = np.ascontiguousarray(pinv)
    pinv.flags.writeable = False
    return PseudoInverse(pinv, A.shape, cond)


def _check(s, A, y, pinv):
    m, n = A.shape
    if pinv.source_dims != (m, n):
        raise ValueError(f"pseudo-inverse built for {pinv.source_dims}, matrix is {A.shape}")
    if np.shape(y) != (m,) or (s is not None and np.shape(s) != (n,)):
        raise ValueError(f"dimension mismatch: A {A.shape}, y {np.shape(y)}, s {np.shape(s)}")


def project(s, A, y, pinv: PseudoInverse) -> np.ndarray:
    """Closest point to ``s`` (in l2) satisfying ``A x = y``."""
    _check(s, A, y, pinv)
    s = np.asarray(s, dtype=float)
    return s + pinv.matrix @ (y - A @ s)


def least_squares_solution(A, y, pinv: PseudoInverse) -> np.ndarray:
    """Minimum-norm solution ``A^+ y``."""
    _check(None, A, y, pinv)
    return pinv.matrix @ np.asarray(y, dtype=float)
