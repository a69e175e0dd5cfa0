"""Reference reconstructions: orthogonal matching pursuit, minimum-norm least
squares, and a brute-force sparsest-support search for tiny problems."""

from __future__ import annotations

import itertools
from math import comb

import numpy as np

from .projection import SingularMatrixError, least_squares_solution, pseudo_inverse

#: Largest number of candidate supports the exhaustive oracle will try.
ORACLE_MAX_SUPPORTS = 10**6


class InfeasibleError(ValueError):
    """No support of the allowed size reproduces the measurements."""


def _active_lstsq(A, y, support):
    sub = A[:, support]
    if np.linalg.matrix_rank(sub) < len(support):
        raise SingularMatrixError(f"columns {list(support)} are linearly dependent")
    coef, *_ = np.linalg.lstsq(sub, y, rcond=None)
    return coef


def omp(A, y, sparsity: int | None = None, tol: float | None = None, return_path: bool = False):
    """Orthogonal matching pursuit.

    Picks the column most correlated with the current residual, i.e. the
    largest ``|a_j^T r| / ||a_j||`` (ties go to the lowest index), refits least squares on the active set, and stops after
    ``sparsity`` atoms or once ``||r|| <= tol * ||y||``.

    Parameters
    ----------
    A : ndarray, shape (M, N)
    y : ndarray, shape (M,)
    sparsity : int, optional
        Number of atoms to select.  Defaults to ``M``.
    tol : float, optional
        Relative residual tolerance.
    return_path : bool
        Also return the selected atoms in order and the residual norm after
        each selection.

    Returns
    -------
    x : ndarray, shape (N,)
    """
    A = np.asarray(A, dtype=float)
    y = np.asarray(y, dtype=float)
    M, N = A.shape
    if sparsity is None and tol is None:
        sparsity = M
    if sparsity is not None and sparsity < 0:
        raise ValueError("sparsity must be nonnegative")
    limit = min(sparsity if sparsity is not None else M, M, N)
    x = np.zeros(N)
    residual = y.copy()
    ynorm = np.linalg.norm(y)
    support: list[int] = []
    norms = [float(ynorm)]
    col_norms = np.linalg.norm(A, axis=0)
    col_norms[col_norms == 0] = np.inf  # zero columns are never picked
    while len(support) < limit:
        if tol is not None and np.linalg.norm(residual) <= tol * ynorm:
            break
        corr = np.abs(A.T @ residual) / col_norms
        corr[support] = -np.inf
        j = int(np.argmax(corr))  # argmax returns the first maximum
        support.append(j)
        coef = _active_lstsq(A, y, support)
        residual = y - A[:, support] @ coef
        norms.append(float(np.linalg.norm(residual)))
    if support:
        x[support] = coef
    if return_path:
        return x, support, norms
    return x


def least_squares(A, y) -> np.ndarray:
    """Minimum-norm solution ``A^+ y``."""
    return least_squares_solution(A, y, pseudo_inverse(A))


def exhaustive_oracle(A, y, kmax: int, rtol: float = 1e-8) -> np.ndarray:
    """Sparsest ``s`` with ``||A s - y|| <= rtol ||y||`` and at most ``kmax`` nonzeros.

    Supports are tried by increasing size; within the smallest feasible size
    the one with the smallest residual wins, then the lexicographically
    smallest.

    Raises
    ------
    ValueError
        If the enumeration would exceed :data:`ORACLE_MAX_SUPPORTS`.
    InfeasibleError
        If no support of size ``<= kmax`` fits ``y``.
    """
    A = np.asarray(A, dtype=float)
    y = np.asarray(y, dtype=float)
    M, N = A.shape
    total = sum(comb(N, k) for k in range(1, kmax + 1))
    if total > ORACLE_MAX_SUPPORTS:
        raise ValueError(f"{total} supports exceed the oracle budget of {ORACLE_MAX_SUPPORTS}")
    ynorm = np.linalg.norm(y)
    if ynorm == 0:
        return np.zeros(N)
    for k in range(1, kmax + 1):
        best = None
        for support in itertools.combinations(range(N), k):
            sub = A[:, support]
            coef, *_ = np.linalg.lstsq(sub, y, rcond=None)
            res = np.linalg.norm(sub @ coef - y)
            if res <= rtol * ynorm and (best is None or res < best[0]):
                best = (res, support, coef)
        if best is not None:
            x = np.zeros(N)
            x[list(best[1])] = best[2]
            return x
    raise InfeasibleError(f"no support of size <= {kmax} reproduces y")
