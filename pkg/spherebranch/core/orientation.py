"""
Companions, orientations and signs of square operators.

K is a companion of T when T + K is invertible. Two companions are
equivalent when (T + K2)⁻¹(T + K1) has positive determinant; the two
equivalence classes are the two orientations of T.
"""

from dataclasses import dataclass
from typing import List, Sequence

import numpy as np

from .errors import DimensionMismatchError, NonCompanionError
from .linalg import lu_det_sign

SINGULAR_REL_TOL = 1e-12


def _check_shapes(*matrices: np.ndarray) -> None:
    shape = matrices[0].shape
    if len(shape) != 2 or shape[0] != shape[1]:
        raise DimensionMismatchError(f"expected square matrices, got shape {shape}")
    for M in matrices[1:]:
        if M.shape != shape:
            raise DimensionMismatchError(f"shape {M.shape} does not match {shape}")


def is_companion(T: np.ndarray, K: np.ndarray, rel_tol: float = SINGULAR_REL_TOL) -> bool:
    T, K = np.asarray(T, dtype=float), np.asarray(K, dtype=float)
    _check_shapes(T, K)
    return lu_det_sign(T + K, rel_tol) != 0


def _companion_sign(T: np.ndarray, K: np.ndarray, rel_tol: float) -> int:
    sign = lu_det_sign(T + K, rel_tol)
    if sign == 0:
        raise NonCompanionError("T + K is singular")
    return sign


@dataclass(frozen=True, eq=False)
class Companion:
    T: np.ndarray
    K: np.ndarray

    def __post_init__(self):
        if not is_companion(self.T, self.K):
            raise NonCompanionError("T + K is singular")


@dataclass(frozen=True, eq=False)
class OrientedOperator:
    """T together with the companion that represents its positive class."""

    T: np.ndarray
    positive_rep: Companion

    def __post_init__(self):
        if self.positive_rep.T is not self.T and not np.array_equal(self.positive_rep.T, self.T):
            raise NonCompanionError("positive representative belongs to another operator")

    @classmethod
    def from_companion(cls, T: np.ndarray, K: np.ndarray) -> "OrientedOperator":
        T = np.asarray(T, dtype=float)
        return cls(T, Companion(T, np.asarray(K, dtype=float)))


def companions_equivalent(T, K1, K2, rel_tol: float = SINGULAR_REL_TOL) -> bool:
    """det((T+K2)⁻¹(T+K1)) > 0, decided from the two LU signs."""
    T, K1, K2 = (np.asarray(M, dtype=float) for M in (T, K1, K2))
    _check_shapes(T, K1, K2)
    return _companion_sign(T, K1, rel_tol) * _companion_sign(T, K2, rel_tol) > 0


def operator_sign(op: OrientedOperator, rel_tol: float = SINGULAR_REL_TOL) -> int:
    """0 if T is singular, +1 if the zero companion is positive, −1 otherwise."""
    det_sign = lu_det_sign(op.T, rel_tol)
    if det_sign == 0:
        return 0
    return det_sign * _companion_sign(op.T, op.positive_rep.K, rel_tol)


def natural_orientation(T: np.ndarray) -> OrientedOperator:
    """Orientation of an invertible T whose positive companion is 0."""
    T = np.asarray(T, dtype=float)
    return OrientedOperator.from_companion(T, np.zeros_like(T))


def oriented_composition_companion(T1, K1, T2, K2) -> np.ndarray:
    """(T2+K2)(T1+K1) − T2T1, a companion of T2T1."""
    T1, K1, T2, K2 = (np.asarray(M, dtype=float) for M in (T1, K1, T2, K2))
    _check_shapes(T1, K1, T2, K2)
    if not (is_companion(T1, K1) and is_companion(T2, K2)):
        raise NonCompanionError("composition needs companions of both factors")
    return (T2 + K2) @ (T1 + K1) - T2 @ T1


def compose(first: OrientedOperator, second: OrientedOperator) -> OrientedOperator:
    """Oriented composition second ∘ first."""
    K = oriented_composition_companion(
        first.T, first.positive_rep.K, second.T, second.positive_rep.K
    )
    return OrientedOperator.from_companion(second.T @ first.T, K)


def partition_companions(T: np.ndarray, companions: Sequence[np.ndarray]) -> List[List[int]]:
    """Group companion indices into equivalence classes, in first-seen order."""
    classes: List[List[int]] = []
    for index, K in enumerate(companions):
        for members in classes:
            if companions_equivalent(T, companions[members[0]], K):
                members.append(index)
                break
        else:
            classes.append([index])
    return classes
