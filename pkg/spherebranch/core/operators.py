"""
Finite-dimensional operators of the problem Lx + sN(x) = λCx, x on the unit sphere.

A Pencil holds (L, C); a Perturbation holds N with its derivative; a
PerturbedProblem pairs them. psi / psi_plus evaluate the zero-finding maps
on the sphere, homogeneous_extension extends N to the whole space.
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import (
    ConstraintViolationError,
    DimensionMismatchError,
    DomainError,
    InvalidTruncationError,
    PencilDegenerateError,
)
from .linalg import is_well_conditioned
from ..models import SpectralSettings, Tolerances

logger = logging.getLogger("Operators")

Vector = np.ndarray
Matrix = np.ndarray


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=float)
    arr.setflags(write=False)
    return arr


def invertibility_scan(settings: SpectralSettings) -> np.ndarray:
    """
    λ grid used to certify that L − λC is invertible somewhere.

    Shifted off the integers by a golden-ratio fraction of the spacing.
    """
    grid = np.linspace(settings.scan_low, settings.scan_high, settings.scan_count)
    spacing = grid[1] - grid[0]
    return grid + 0.5 * spacing * (np.sqrt(5.0) - 1.0) / 2.0


def find_regular_point(
    L: Matrix,
    C: Matrix,
    tol: Tolerances = Tolerances(),
    settings: SpectralSettings = SpectralSettings(),
) -> Optional[float]:
    """First λ of the scan grid (closest to 0 first) with L − λC well conditioned."""
    grid = invertibility_scan(settings)
    for lam in grid[np.argsort(np.abs(grid), kind="stable")]:
        if is_well_conditioned(L - lam * C, tol.condition_ceiling):
            return float(lam)
    return None


@dataclass(frozen=True, eq=False)
class Pencil:
    """The family L − λC on an n-dimensional truncation."""

    L: Matrix
    C: Matrix
    compactness_tag: bool = False
    regular_point: float = field(init=False, repr=False)

    def __post_init__(self):
        L = _frozen(self.L)
        C = _frozen(self.C)
        if L.ndim != 2 or L.shape[0] != L.shape[1]:
            raise DimensionMismatchError(f"L must be square, got shape {L.shape}")
        if C.shape != L.shape:
            raise DimensionMismatchError(f"C has shape {C.shape}, L has shape {L.shape}")
        if L.shape[0] < 2:
            raise InvalidTruncationError("pencil dimension must be at least 2")
        object.__setattr__(self, "L", L)
        object.__setattr__(self, "C", C)

        regular = find_regular_point(L, C)
        if regular is None:
            raise PencilDegenerateError("L − λC is singular on the whole scan grid")
        object.__setattr__(self, "regular_point", regular)

    @property
    def dim(self) -> int:
        return self.L.shape[0]

    def at(self, lam: float) -> Matrix:
        """The matrix L − λC."""
        return self.L - lam * self.C

    def norm_scale(self, lam: float = 0.0) -> float:
        return float(np.linalg.norm(self.L, 2) + abs(lam) * np.linalg.norm(self.C, 2))


@dataclass(frozen=True, eq=False)
class Perturbation:
    """
    A C¹ map N on the unit sphere, given by `evaluate` and its ambient
    Jacobian `derivative`. `linear_matrix` is set when N is linear.
    """

    dim: int
    evaluate: Callable[[Vector], Vector]
    derivative: Callable[[Vector], Matrix]
    linear_matrix: Optional[Matrix] = None

    @classmethod
    def linear(cls, M: Matrix) -> "Perturbation":
        M = _frozen(M)
        if M.ndim != 2 or M.shape[0] != M.shape[1]:
            raise DimensionMismatchError(f"linear N must be square, got shape {M.shape}")
        return cls(
            dim=M.shape[0],
            evaluate=lambda x: M @ x,
            derivative=lambda x: M,
            linear_matrix=M,
        )

    @property
    def is_linear(self) -> bool:
        return self.linear_matrix is not None


@dataclass(frozen=True, eq=False)
class PerturbedProblem:
    pencil: Pencil
    perturbation: Perturbation

    def __post_init__(self):
        if self.pencil.dim != self.perturbation.dim:
            raise DimensionMismatchError(
                f"pencil has dimension {self.pencil.dim}, "
                f"perturbation has dimension {self.perturbation.dim}"
            )

    @property
    def dim(self) -> int:
        return self.pencil.dim


# =============================================================================
# Builders for the diagonal example family
# =============================================================================

def build_Tk(k: int, n: int) -> Matrix:
    """diag(0,…,0, 1,…,1) with k leading zeros."""
    if k < 1 or k >= n:
        raise InvalidTruncationError(f"T_k needs 1 <= k < n, got k={k}, n={n}")
    return np.diag(np.r_[np.zeros(k), np.ones(n - k)])


def build_C(n: int) -> Matrix:
    """diag(1, 1/2, …, 1/n)."""
    if n < 2:
        raise InvalidTruncationError(f"C needs n >= 2, got n={n}")
    return np.diag(1.0 / np.arange(1, n + 1))


def build_paired_rotation(n: int) -> Perturbation:
    """(ξ1, ξ2, ξ3, ξ4, …) ↦ (−ξ2, ξ1, −ξ4, ξ3, 0, 0, …)."""
    if n < 4:
        raise InvalidTruncationError(f"the paired rotation needs n >= 4, got n={n}")
    M = np.zeros((n, n))
    M[0, 1], M[1, 0] = -1.0, 1.0
    M[2, 3], M[3, 2] = -1.0, 1.0
    return Perturbation.linear(M)


def harmonic_pencil(k: int, n: int) -> Pencil:
    return Pencil(build_Tk(k, n), build_C(n), compactness_tag=True)


def example_problem(k: int, n: int) -> PerturbedProblem:
    """The worked example T_k x + sN(x) = λCx truncated to n coordinates."""
    return PerturbedProblem(harmonic_pencil(k, n), build_paired_rotation(n))


# =============================================================================
# Maps on the sphere
# =============================================================================

def require_unit(x: Vector, tol: float = 1e-10) -> Vector:
    x = np.asarray(x, dtype=float)
    norm = np.linalg.norm(x)
    if abs(norm - 1.0) > tol:
        raise ConstraintViolationError(f"expected a unit vector, got norm {norm:.3e}")
    return x


def psi(pencil: Pencil, tol: float = 1e-10) -> Callable[[float, Vector], Vector]:
    """(λ, x) ↦ Lx − λCx on the unit sphere."""

    def _psi(lam: float, x: Vector) -> Vector:
        x = require_unit(x, tol)
        return pencil.L @ x - lam * (pencil.C @ x)

    return _psi


def psi_plus(problem: PerturbedProblem, tol: float = 1e-10) -> Callable[[float, float, Vector], Vector]:
    """(s, λ, x) ↦ Lx + sN(x) − λCx on the unit sphere."""
    base = psi(problem.pencil, tol)
    evaluate = problem.perturbation.evaluate

    def _psi_plus(s: float, lam: float, x: Vector) -> Vector:
        value = base(lam, x)
        if s == 0:
            return value
        return value + s * evaluate(np.asarray(x, dtype=float))

    return _psi_plus


def homogeneous_extension(p: Perturbation, strict: bool = False) -> Callable[[Vector], Vector]:
    """x ↦ ‖x‖·N(x/‖x‖); the value at 0 is 0, or a DomainError when `strict`."""

    def _extension(x: Vector) -> Vector:
        x = np.asarray(x, dtype=float)
        norm = np.linalg.norm(x)
        if norm == 0.0:
            if strict:
                raise DomainError("homogeneous extension is not defined at x = 0")
            logger.warning("Extension evaluated at 0 (outside its domain), returning 0; not differentiable there")
            return np.zeros_like(x)
        return norm * p.evaluate(x / norm)

    return _extension


def homogeneous_extension_derivative(p: Perturbation, x: Vector) -> Matrix:
    """Jacobian of the homogeneous extension at x ≠ 0."""
    x = np.asarray(x, dtype=float)
    norm = np.linalg.norm(x)
    u = x / norm
    projector = np.eye(x.size) - np.outer(u, u)
    return np.outer(p.evaluate(u), u) + p.derivative(u) @ projector


# =============================================================================
# Consistency checks
# =============================================================================

def random_unit_vectors(n: int, count: int, rng: np.random.Generator) -> np.ndarray:
    samples = rng.standard_normal((count, n))
    return samples / np.linalg.norm(samples, axis=1, keepdims=True)


def linear_consistency_error(p: Perturbation, rng: np.random.Generator, samples: int = 100) -> float:
    """Largest ‖evaluate(x) − Mx‖ over random unit x (0 when N is not linear)."""
    if p.linear_matrix is None:
        return 0.0
    worst = 0.0
    for x in random_unit_vectors(p.dim, samples, rng):
        worst = max(worst, float(np.linalg.norm(p.evaluate(x) - p.linear_matrix @ x)))
    return worst


def derivative_error(
    p: Perturbation,
    rng: np.random.Generator,
    samples: int = 20,
    step: float = 1e-6,
) -> float:
    """Largest relative error of `derivative` against central differences."""
    worst = 0.0
    for x, v in zip(random_unit_vectors(p.dim, samples, rng), random_unit_vectors(p.dim, samples, rng)):
        central = (p.evaluate(x + step * v) - p.evaluate(x - step * v)) / (2.0 * step)
        exact = p.derivative(x) @ v
        denominator = max(float(np.linalg.norm(exact)), 1.0)
        worst = max(worst, float(np.linalg.norm(central - exact)) / denominator)
    return worst


def kernel_injectivity(pencil: Pencil, basis: Matrix) -> float:
    """Smallest singular value of C restricted to the columns of `basis`."""
    if basis.shape[1] == 0:
        return float("inf")
    return float(np.linalg.svd(pencil.C @ basis, compute_uv=False).min())
