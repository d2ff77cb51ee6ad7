"""
Small dense linear-algebra kernels: inverse, least squares and the
generalized symmetric-definite eigenproblem.

All routines wrap LAPACK through scipy and add the rank / pivot /
definiteness diagnostics the solvers report.
"""
import logging
import warnings

import numpy as np
from scipy import linalg as sla
from scipy.linalg import lapack

from core import config
from core.errors import (DefinitenessError, DomainError, RankDeficiencyError,
                         SingularMatrixError)

logger = logging.getLogger(__name__)


def as_dense(a, name: str = 'matrix') -> np.ndarray:
    """Validate a real 2-D array with finite entries and at least one row and column."""
    arr = np.array(a, dtype=float)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise DomainError(f"{name} must be a non-empty 2-D array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} has non-finite entries")
    if max(arr.shape) > config.MAX_DENSE_SIZE and min(arr.shape) > config.MAX_DENSE_SIZE:
        raise DomainError(f"{name} is larger than {config.MAX_DENSE_SIZE} in both dimensions")
    return arr


def _require_square(a: np.ndarray, name: str):
    if a.shape[0] != a.shape[1]:
        raise DomainError(f"{name} must be square, got shape {a.shape}")


def _require_symmetric(a: np.ndarray, name: str):
    scale = max(float(np.max(np.abs(a))), np.finfo(float).tiny)
    if np.max(np.abs(a - a.T)) > 1e-10 * scale:
        raise DomainError(f"{name} must be symmetric")


def invert(a) -> np.ndarray:
    """Inverse by LU with partial pivoting; pivots below PIVOT_TOLERANCE are singular."""
    a = as_dense(a)
    _require_square(a, 'matrix')
    with warnings.catch_warnings():
        warnings.simplefilter('ignore', sla.LinAlgWarning)
        lu, piv = sla.lu_factor(a, check_finite=False)

    pivots = np.abs(np.diag(lu))
    small = np.flatnonzero(pivots < config.PIVOT_TOLERANCE)
    if small.size:
        index = int(small[0])
        raise SingularMatrixError(
            f"matrix is singular: pivot {index} has magnitude {pivots[index]:.3e}", pivot=index
        )
    return sla.lu_solve((lu, piv), np.eye(a.shape[0]), check_finite=False)


def qr_factor(a, name: str = 'design matrix'):
    """Economic Householder QR of a tall matrix with full column rank."""
    a = as_dense(a, name)
    if a.shape[0] < a.shape[1]:
        raise DomainError(f"{name} needs rows >= columns, got {a.shape}")

    q, r = sla.qr(a, mode='economic', check_finite=False)
    diag = np.abs(np.diag(r))
    threshold = config.RANK_TOLERANCE * max(float(diag.max()), np.finfo(float).tiny)
    deficient = np.flatnonzero(diag <= threshold)
    if deficient.size:
        column = int(deficient[0])
        raise RankDeficiencyError(
            f"{name} is rank deficient at column {column}", column=column
        )
    return q, r


def least_squares(a, b) -> np.ndarray:
    """Minimise ||A w - b||_2 through an economic Householder QR of A."""
    q, r = qr_factor(a)
    b = np.asarray(b, dtype=float)
    if b.shape != (q.shape[0],):
        raise DomainError(f"right-hand side must have length {q.shape[0]}, got shape {b.shape}")
    return sla.solve_triangular(r, q.T @ b, lower=False, check_finite=False)


def generalized_sym_eig(k, m):
    """
    Solve K v = mu M v for symmetric K and symmetric positive definite M.

    M = L L^T is Cholesky-factored, the pencil is reduced to the standard
    symmetric problem L^-1 K L^-T y = mu y and solved by symmetric QR.
    Returns eigenvalues in ascending order and M-orthonormal eigenvectors as
    columns (same layout as scipy.linalg.eigh).
    """
    k = as_dense(k, 'stiffness')
    m = as_dense(m, 'mass')
    _require_square(k, 'stiffness')
    if m.shape != k.shape:
        raise DomainError(f"pencil shapes differ: {k.shape} vs {m.shape}")
    _require_symmetric(k, 'stiffness')
    _require_symmetric(m, 'mass')

    lower, info = lapack.dpotrf(m, lower=1, clean=1)
    if info > 0:
        raise DefinitenessError(
            f"mass matrix is not positive definite: leading minor {info} fails", minor=int(info)
        )
    if info < 0:
        raise DomainError(f"invalid argument {-info} passed to Cholesky factorisation")

    half = sla.solve_triangular(lower, k, lower=True, check_finite=False)
    reduced = sla.solve_triangular(lower, half.T, lower=True, check_finite=False)
    reduced = 0.5 * (reduced + reduced.T)

    eigenvalues, vectors = np.linalg.eigh(reduced)
    eigenvectors = sla.solve_triangular(lower, vectors, lower=True, trans='T', check_finite=False)
    logger.debug("generalized eigenproblem of size %d: smallest %.6e", k.shape[0], eigenvalues[0])
    return eigenvalues, eigenvectors
