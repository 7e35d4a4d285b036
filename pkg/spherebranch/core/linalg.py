"""
Dense linear-algebra helpers shared by the core modules.

Sign decisions go through LU with partial pivoting; rank decisions go
through singular values.
"""

import warnings

import numpy as np
import scipy.linalg


def lu_det_sign(A: np.ndarray, rel_tol: float = 1e-12) -> int:
    """
    Sign of det(A) from an LU factorization with partial pivoting.

    Returns 0 when the smallest pivot is below rel_tol * ||A||_max * n.
    """
    A = np.asarray(A, dtype=float)
    n = A.shape[0]
    scale = max(np.abs(A).max(initial=0.0), np.finfo(float).tiny)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(A, check_finite=False)
    pivots = np.diag(lu)
    if np.abs(pivots).min() <= rel_tol * scale * n:
        return 0
    swaps = int(np.count_nonzero(piv != np.arange(n)))
    negatives = int(np.count_nonzero(pivots < 0))
    return -1 if (swaps + negatives) % 2 else 1


def is_well_conditioned(A: np.ndarray, ceiling: float) -> bool:
    """True when the 2-norm condition number of A is below `ceiling`."""
    with np.errstate(divide="ignore", invalid="ignore"):
        cond = np.linalg.cond(A)
    return bool(np.isfinite(cond) and cond < ceiling)


def smallest_singular_value(A: np.ndarray) -> float:
    if A.size == 0:
        return 0.0
    return float(np.linalg.svd(A, compute_uv=False).min())


def kernel(A: np.ndarray, rel_tol: float) -> np.ndarray:
    """Orthonormal basis (columns) of the numerical kernel of A."""
    return scipy.linalg.null_space(A, rcond=rel_tol)


def image(A: np.ndarray, rel_tol: float) -> np.ndarray:
    """Orthonormal basis (columns) of the numerical range of A."""
    return scipy.linalg.orth(A, rcond=rel_tol)


def smallest_principal_angle(U: np.ndarray, V: np.ndarray) -> float:
    """Smallest principal angle (radians) between span(U) and span(V)."""
    if U.shape[1] == 0 or V.shape[1] == 0:
        return float(np.pi / 2)
    return float(scipy.linalg.subspace_angles(U, V).min())


def canonical_sign(v: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    """Flip v so that its first non-negligible component is positive."""
    for component in v:
        if abs(component) > tol:
            return v if component > 0 else -v
    return v


def tangent_frame(x: np.ndarray) -> np.ndarray:
    """
    Orthonormal basis V (n x n-1) of the tangent space x⊥ of the sphere,
    positively oriented: det[x | V] > 0.

    Built from a complete Householder QR of x; deterministic for a given x.
    """
    x = np.asarray(x, dtype=float)
    Q, _ = np.linalg.qr(x.reshape(-1, 1), mode="complete")
    V = Q[:, 1:].copy()
    if lu_det_sign(np.column_stack([x, V])) < 0:
        V[:, 0] = -V[:, 0]
    return V
