"""
Spectrum of the pencil L − λC, kernel bases, and hypothesis certificates.

A certificate at an eigenvalue λ* records
  (H1) compactness of C (declared metadata of the pencil),
  (H2) odd dimension of Ker T, T = L − λ*C,
  (H3) Im T ∩ C(Ker T) = {0}, measured by the smallest principal angle,
together with the splitting G = (Ker T)⊥ ⊕ Ker T, H = Im T ⊕ C(Ker T).
"""

import logging
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np
import scipy.linalg

from .errors import NotAnEigenvalueError, PencilDegenerateError
from .linalg import image, kernel, smallest_principal_angle, smallest_singular_value
from .operators import Pencil, kernel_injectivity
from ..models import SpectralSettings, Tolerances

logger = logging.getLogger("Spectrum")


@dataclass(frozen=True, eq=False)
class EigenvalueInfo:
    value: float
    geometric_mult: int
    kernel_basis: np.ndarray
    algebraic_mult: int


@dataclass(frozen=True, eq=False)
class Splitting:
    """G = G1 ⊕ G2 and H = H1 ⊕ H2, all as column bases."""

    G1: np.ndarray
    G2: np.ndarray
    H1: np.ndarray
    H2: np.ndarray


@dataclass(frozen=True, eq=False)
class HypothesisCertificate:
    lambda_star: float
    geometric_mult: int
    h1_compact: bool
    h2_odd: bool
    h3_residual: float
    h3_holds: bool
    splitting: Splitting

    @property
    def simple(self) -> bool:
        """Ker T = ℝx* and Cx* ∉ Im T."""
        return self.geometric_mult == 1 and self.h3_holds


def eigensphere_dim(info: EigenvalueInfo) -> int:
    return info.geometric_mult - 1


def kernel_basis(pencil: Pencil, lam: float, tol: Tolerances = Tolerances()) -> np.ndarray:
    """Orthonormal basis of Ker(L − λC); n×0 when λ is not an eigenvalue."""
    return kernel(pencil.at(lam), tol.rank_rel)


def choose_resolvent_point(
    pencil: Pencil,
    window: Tuple[float, float],
    settings: SpectralSettings = SpectralSettings(),
) -> float:
    """Window point maximizing the smallest singular value of L − λ̂C."""
    lo, hi = window
    samples = settings.resolvent_samples
    spacing = (hi - lo) / samples
    # Offset keeps the samples off grid-aligned eigenvalues
    candidates = lo + spacing * (np.arange(samples) + (np.sqrt(5.0) - 1.0) / 2.0)
    margins = [smallest_singular_value(pencil.at(lam)) for lam in candidates]
    best = int(np.argmax(margins))
    if margins[best] <= np.finfo(float).eps * max(pencil.norm_scale(candidates[best]), 1.0):
        raise PencilDegenerateError(f"no regular resolvent point in window {window}")
    return float(candidates[best])


def _cluster(values: np.ndarray, radius: float) -> List[np.ndarray]:
    clusters: List[List[float]] = []
    for value in np.sort(values):
        if clusters and value - clusters[-1][-1] <= radius:
            clusters[-1].append(value)
        else:
            clusters.append([value])
    return [np.array(c) for c in clusters]


def _real_finite_eigenvalues(pencil: Pencil, imag_tol: float) -> np.ndarray:
    alpha, beta = scipy.linalg.eig(
        pencil.L, pencil.C, right=False, homogeneous_eigvals=True
    )
    finite = np.abs(beta) > 1e3 * np.finfo(float).eps * np.maximum(np.abs(alpha), 1.0)
    values = alpha[finite] / beta[finite]
    real = np.abs(values.imag) <= imag_tol * np.maximum(np.abs(values.real), 1.0)
    return values[real].real


def spectrum_values(pencil: Pencil, tol: Tolerances = Tolerances()) -> List[float]:
    """Every real eigenvalue of the pencil, clustered, ascending."""
    radius = tol.cluster_radius
    return [float(c.mean()) for c in _cluster(_real_finite_eigenvalues(pencil, radius), radius)]


def pencil_eigenvalues(
    pencil: Pencil,
    window: Tuple[float, float],
    tol: Tolerances = Tolerances(),
    settings: SpectralSettings = SpectralSettings(),
) -> List[EigenvalueInfo]:
    """All real eigenvalues in the window, ascending, with multiplicities."""
    lo, hi = window
    radius = tol.cluster_radius
    clusters = _cluster(_real_finite_eigenvalues(pencil, radius), radius)

    selected = []
    for cluster in clusters:
        value = float(cluster.mean())
        if lo - radius <= value <= hi + radius:
            if abs(value - lo) <= radius or abs(value - hi) <= radius:
                logger.warning("Eigenvalue %.12g sits on the window edge; window widened to include it", value)
            selected.append(value)
    if not selected:
        return []

    lam_hat = choose_resolvent_point(pencil, (lo - 1.0, hi + 1.0), settings)
    Z = np.linalg.inv(pencil.at(lam_hat))
    mu = np.linalg.eigvals(Z @ pencil.C)
    nonzero = np.abs(mu) > np.finfo(float).eps
    resolvent_values = lam_hat + 1.0 / mu[nonzero]

    infos = []
    for value in selected:
        basis = kernel_basis(pencil, value, tol)
        if basis.shape[1] == 0:
            # Defective clusters can land just outside the rank tolerance
            _, _, Vh = np.linalg.svd(pencil.at(value))
            basis = Vh[-1:].T
        algebraic = int(np.count_nonzero(np.abs(resolvent_values - value) <= radius))
        info = EigenvalueInfo(
            value=value,
            geometric_mult=basis.shape[1],
            kernel_basis=basis,
            algebraic_mult=max(algebraic, basis.shape[1]),
        )
        _check_kernel(pencil, info, tol)
        infos.append(info)

    logger.info(
        "Window [%g, %g]: %s",
        lo,
        hi,
        ", ".join(f"{i.value:.10g}(x{i.geometric_mult})" for i in infos),
    )
    return infos


def _check_kernel(pencil: Pencil, info: EigenvalueInfo, tol: Tolerances) -> None:
    residual = np.linalg.norm(pencil.at(info.value) @ info.kernel_basis, axis=0).max()
    if residual > tol.kernel_residual * pencil.norm_scale(info.value):
        logger.warning("Kernel residual %.3e at λ=%.12g exceeds tolerance", residual, info.value)
    injectivity = kernel_injectivity(pencil, info.kernel_basis)
    if injectivity <= tol.injectivity:
        logger.warning("C is not injective on the kernel at λ=%.12g (σ_min=%.3e)", info.value, injectivity)


def certify(pencil: Pencil, lambda_star: float, tol: Tolerances = Tolerances()) -> HypothesisCertificate:
    """Hypothesis certificate at the eigenvalue λ*."""
    T = pencil.at(lambda_star)
    U, sigma, Vh = np.linalg.svd(T)
    rank = int(np.count_nonzero(sigma > tol.rank_rel * sigma.max())) if sigma.max() > 0 else 0
    n = pencil.dim
    if rank == n:
        raise NotAnEigenvalueError(f"λ={lambda_star} is not an eigenvalue (σ_min={sigma.min():.3e})")

    G1 = Vh[:rank].T
    G2 = Vh[rank:].T
    H1 = U[:, :rank]
    H2 = pencil.C @ G2
    m = G2.shape[1]

    if kernel_injectivity(pencil, G2) <= tol.injectivity:
        residual = 0.0
    else:
        residual = smallest_principal_angle(H1, H2)
    holds = residual > tol.h3_angle
    if holds and np.linalg.matrix_rank(np.column_stack([H1, image(H2, tol.rank_rel)])) != n:
        logger.warning("Splitting at λ=%.12g is rank deficient despite the angle test", lambda_star)
        holds = False

    certificate = HypothesisCertificate(
        lambda_star=float(lambda_star),
        geometric_mult=m,
        h1_compact=pencil.compactness_tag,
        h2_odd=(m % 2 == 1),
        h3_residual=float(residual),
        h3_holds=bool(holds),
        splitting=Splitting(G1=G1, G2=G2, H1=H1, H2=H2),
    )
    logger.info(
        "λ*=%.10g: dim Ker=%d, H2=%s, H3=%s (angle %.3e)",
        lambda_star,
        m,
        certificate.h2_odd,
        certificate.h3_holds,
        residual,
    )
    return certificate


def is_simple_eigenpoint(
    pencil: Pencil, lam: float, x: np.ndarray, tol: Tolerances = Tolerances()
) -> bool:
    """Ker(L − λC) = ℝx and Cx ∉ Im(L − λC)."""
    basis = kernel_basis(pencil, lam, tol)
    if basis.shape[1] != 1 or abs(abs(float(basis[:, 0] @ x)) - 1.0) > 1e-8:
        return False
    H1 = image(pencil.at(lam), tol.rank_rel)
    Cx = pencil.C @ x
    outside = Cx - H1 @ (H1.T @ Cx)
    return bool(np.linalg.norm(outside) > tol.h3_angle * np.linalg.norm(Cx))
