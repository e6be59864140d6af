"""
Small dense real linear algebra for contraction analysis
Author: Jay Guwalani

Symmetric parts, extreme eigenvalues, largest singular values, Theta
inverses and the block-matrix lower bound on the smallest eigenvalue used
by the hierarchical and small-gain combination rules. Dimensions are small,
so everything is dense LAPACK through scipy.
"""

import logging
from dataclasses import dataclass
from typing import Tuple

import numpy as np
from scipy import linalg

from .errors import NotPositiveDefiniteError, NotSymmetricError, DimensionMismatchError

logger = logging.getLogger(__name__)

SYMMETRY_TOL = 1e-10
PD_TOL = 1e-12


@dataclass(frozen=True)
class SymEigResult:
    """Extreme eigenvalues of a symmetric matrix"""
    lambda_min: float
    lambda_max: float


@dataclass(frozen=True)
class BlockBound:
    """Lower bound on the smallest eigenvalue of a 2x2 block symmetric matrix"""
    applicable: bool
    bound: float


def _as_square(a) -> np.ndarray:
    arr = np.asarray(a, dtype=float)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise DimensionMismatchError(f"expected a square matrix, got shape {arr.shape}")
    return arr


def symmetric_part(a) -> np.ndarray:
    """Return (A + A^T) / 2"""
    arr = _as_square(a)
    return 0.5 * (arr + arr.T)


def check_symmetric(a, tol: float = SYMMETRY_TOL) -> np.ndarray:
    """Return ``a`` as an array, raising NotSymmetricError if it is not symmetric to ``tol``"""
    arr = _as_square(a)
    scale = max(1.0, float(np.max(np.abs(arr))) if arr.size else 0.0)
    asym = float(np.max(np.abs(arr - arr.T))) if arr.size else 0.0
    if asym > tol * scale:
        raise NotSymmetricError(f"matrix is not symmetric (max asymmetry {asym:.3e})")
    return arr


def extreme_eigs(a) -> SymEigResult:
    """Smallest and largest eigenvalue of a symmetric matrix"""
    arr = check_symmetric(a)
    # eigh only reads one triangle; symmetrize so both are used
    eigvals = linalg.eigh(0.5 * (arr + arr.T), eigvals_only=True)
    return SymEigResult(lambda_min=float(eigvals[0]), lambda_max=float(eigvals[-1]))


def largest_singular_value(a) -> float:
    """Largest singular value, 0 for empty or zero matrices"""
    arr = np.atleast_2d(np.asarray(a, dtype=float))
    if arr.size == 0:
        return 0.0
    return float(linalg.svdvals(arr)[0])


def lu_inverse(theta) -> Tuple[np.ndarray, float]:
    """Invert ``theta`` by LU with partial pivoting and return (inverse, 2-norm condition number)"""
    arr = _as_square(theta)
    cond = float(np.linalg.cond(arr))
    if not np.isfinite(cond):
        return np.full_like(arr, np.nan), cond
    lu, piv = linalg.lu_factor(arr, check_finite=True)
    inverse = linalg.lu_solve((lu, piv), np.eye(arr.shape[0]))
    return inverse, cond


def assemble_symmetric_block(a1, a2, a21) -> np.ndarray:
    """Assemble [[A1, A21^T], [A21, A2]]"""
    a1 = _as_square(a1)
    a2 = _as_square(a2)
    a21 = np.atleast_2d(np.asarray(a21, dtype=float))
    if a21.shape != (a2.shape[0], a1.shape[0]):
        raise DimensionMismatchError(
            f"off-diagonal block has shape {a21.shape}, expected {(a2.shape[0], a1.shape[0])}")
    return np.block([[a1, a21.T], [a21, a2]])


def block_min_eig_lower_bound(a1, a2, a21) -> BlockBound:
    """Lower bound on lambda_min([[A1, A21^T], [A21, A2]]) from the diagonal blocks.

    Applicable when sing^2(A21) < lambda_min(A1) * lambda_min(A2); the bound
    is returned either way so callers can report how far off they are.
    """
    lam1 = extreme_eigs(a1).lambda_min
    lam2 = extreme_eigs(a2).lambda_min
    if lam1 <= PD_TOL:
        raise NotPositiveDefiniteError(f"a1 is not positive definite (lambda_min={lam1:.3e})")
    if lam2 <= PD_TOL:
        raise NotPositiveDefiniteError(f"a2 is not positive definite (lambda_min={lam2:.3e})")

    sing2 = largest_singular_value(a21) ** 2
    bound = 0.5 * (lam1 + lam2) - np.sqrt((0.5 * (lam1 - lam2)) ** 2 + sing2)
    applicable = sing2 < lam1 * lam2
    return BlockBound(applicable=bool(applicable), bound=float(bound))
