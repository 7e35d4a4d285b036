"""
Degree of ψ(λ, x) = Lx − λCx on cylinders (α, β) × Sⁿ⁻¹.

The cylinder ℝ × Sⁿ⁻¹ carries one fixed orientation: a tangent basis
(∂/∂λ, v1, …, vₙ₋₁) at (λ, x) is positive iff det[x | v1 | … | vₙ₋₁] > 0,
multiplied by `OrientationConvention.global_sign`. With that orientation the
degree on an isolating cylinder is a Brouwer degree:

* at a simple eigenpoint it is the sign of det dψ on the oriented basis;
* at a multiple eigenvalue with Im T ∩ C(Ker T) = {0} the eigenset is
  replaced by m simple ones: in the splitting coordinates the Ker T block
  λ*I is replaced by diag(λ* + δⱼ), and the count is carried back through
  the sign of det Z.

The LS-sign at λ is the sign of det(I − (λ − λ̂)(L − λ̂C)⁻¹C).
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from .errors import (
    DegenerateDifferentialError,
    EndpointCollisionError,
    EpsilonExhaustedError,
    NonIsolatingIntervalError,
    NotAnEigenvalueError,
    SingularArgumentError,
    TransversalityError,
)
from .linalg import lu_det_sign, tangent_frame
from .operators import Pencil, require_unit
from .spectral import (
    HypothesisCertificate,
    certify,
    choose_resolvent_point,
    pencil_eigenvalues,
    spectrum_values,
)
from ..models import DegreeSettings, SpectralSettings, Tolerances

logger = logging.getLogger("Degree")

COMPUTATION_FORMULA = "computation-formula"
EPSILON_PERTURBATION = "epsilon-perturbation"


@dataclass(frozen=True)
class OrientationConvention:
    global_sign: int = 1

    def __post_init__(self):
        if self.global_sign not in (-1, 1):
            raise ValueError("global_sign must be +1 or -1")

    def tangent_basis(self, x: np.ndarray) -> np.ndarray:
        """Positively oriented orthonormal basis of x⊥."""
        return tangent_frame(x)

    def reversed(self) -> "OrientationConvention":
        return OrientationConvention(-self.global_sign)


@dataclass
class DegreeReport:
    interval: Tuple[float, float]
    value: int
    method: str
    ls_sign_alpha: int
    ls_sign_beta: int
    lambda_hat: float
    eigensets_found: List[Tuple[float, int]] = field(default_factory=list)


@dataclass(frozen=True)
class ConjectureOutcome:
    interval: Tuple[float, float]
    deg_nonzero: bool
    endpoint_signs_differ: bool
    agree: bool
    degree: int
    ls_sign_alpha: int
    ls_sign_beta: int


# =============================================================================
# LS-sign
# =============================================================================

def ls_sign(pencil: Pencil, lambda_hat: float, lam: float, tol: Tolerances = Tolerances()) -> int:
    """sign det(I − (λ − λ̂)(L − λ̂C)⁻¹C)."""
    if lu_det_sign(pencil.at(lambda_hat), tol.singular_rel) == 0:
        raise SingularArgumentError(f"λ̂={lambda_hat} is an eigenvalue")
    if lam == lambda_hat:
        return 1
    if lu_det_sign(pencil.at(lam), tol.singular_rel) == 0:
        raise SingularArgumentError(f"λ={lam} is an eigenvalue")
    ZC = np.linalg.solve(pencil.at(lambda_hat), pencil.C)
    sign = lu_det_sign(np.eye(pencil.dim) - (lam - lambda_hat) * ZC, tol.singular_rel)
    if sign == 0:
        raise SingularArgumentError(f"compact vector field is singular at λ={lam}")
    return sign


# =============================================================================
# Simple eigenpoints
# =============================================================================

def differential_matrix(pencil: Pencil, lam: float, x: np.ndarray, conv: OrientationConvention) -> np.ndarray:
    """Columns dψ(∂/∂λ), dψ(v1), …, dψ(vₙ₋₁) on the oriented basis at (λ, x)."""
    V = conv.tangent_basis(x)
    return np.column_stack([-(pencil.C @ x), pencil.at(lam) @ V])


def simple_eigenpoint_sign(
    pencil: Pencil,
    lam: float,
    x: np.ndarray,
    conv: OrientationConvention = OrientationConvention(),
    tol: Tolerances = Tolerances(),
) -> int:
    x = require_unit(x, tol.unit_norm)
    residual = np.linalg.norm(pencil.at(lam) @ x)
    if residual > tol.kernel_residual * max(pencil.norm_scale(lam), 1.0):
        raise NotAnEigenvalueError(f"(λ={lam}, x) is not an eigenpoint (residual {residual:.3e})")
    sign = lu_det_sign(differential_matrix(pencil, lam, x, conv), tol.singular_rel)
    if sign == 0:
        raise DegenerateDifferentialError(f"dψ is singular at λ={lam}; the eigenpoint is not simple")
    return sign * conv.global_sign


def rank_one_companion_sign(pencil: Pencil, lam: float, x: np.ndarray, tol: Tolerances = Tolerances()) -> int:
    """sign det(T − Cx xᵀ): T oriented by the rank-one companion −Cxxᵀ."""
    return lu_det_sign(pencil.at(lam) - np.outer(pencil.C @ x, x), tol.singular_rel)


def twin_contribution(pencil: Pencil, lam: float, x: np.ndarray, conv: OrientationConvention, tol: Tolerances) -> int:
    return simple_eigenpoint_sign(pencil, lam, x, conv, tol) + simple_eigenpoint_sign(pencil, lam, -x, conv, tol)


# =============================================================================
# Eigensets
# =============================================================================

@dataclass(frozen=True, eq=False)
class PerturbedFamily:
    """The ε-approximation as a pencil, plus the sign of det Z."""

    pencil: Pencil
    eigenvalues: np.ndarray
    z_sign: int
    unperturbed: Pencil


def perturbed_family(pencil: Pencil, cert: HypothesisCertificate, epsilon: float) -> PerturbedFamily:
    """
    Replace the Ker T block λ*I of Z(L − λC) by diag(λ* + δⱼ), δⱼ = εj/(m+1).

    Works in the coordinates B_G = [G1 | G2] (orthogonal) and
    B_H = [H1 | C G2]; Z = blockdiag(T11⁻¹, C22⁻¹) in those coordinates.
    """
    if not cert.h3_holds:
        raise TransversalityError(f"no splitting at λ*={cert.lambda_star}: Im T meets C(Ker T)")
    lam_star = cert.lambda_star
    split = cert.splitting
    r = split.G1.shape[1]
    m = split.G2.shape[1]

    B_G = np.column_stack([split.G1, split.G2])
    B_H = np.column_stack([split.H1, pencil.C @ split.G2])
    T_coords = np.linalg.solve(B_H, pencil.at(lam_star) @ B_G)
    C_coords = np.linalg.solve(B_H, pencil.C @ B_G)

    Z = np.zeros_like(T_coords)
    Z[:r, :r] = np.linalg.inv(T_coords[:r, :r])
    Z[r:, r:] = np.linalg.inv(C_coords[r:, r:])

    deltas = epsilon * np.arange(1, m + 1) / (m + 1)
    C_hat = Z @ C_coords
    M0 = Z @ T_coords + lam_star * C_hat
    M0[r:, r:] += np.diag(deltas)

    family = Pencil(B_G @ M0 @ B_G.T, B_G @ C_hat @ B_G.T, compactness_tag=pencil.compactness_tag)
    z_sign = lu_det_sign(B_G) * lu_det_sign(Z) * lu_det_sign(B_H)
    return PerturbedFamily(family, lam_star + deltas, z_sign, pencil)


def _unperturbed_eta(pencil: Pencil, cert: HypothesisCertificate) -> Pencil:
    return perturbed_family(pencil, cert, 0.0).pencil


def _perturbed_degree(
    pencil: Pencil,
    cert: HypothesisCertificate,
    interval: Tuple[float, float],
    epsilon: float,
    conv: OrientationConvention,
    tol: Tolerances,
) -> Optional[int]:
    """Degree through the ε-family, or None when ε is too large."""
    alpha, beta = interval
    family = perturbed_family(pencil, cert, epsilon)
    if np.any(family.eigenvalues <= alpha) or np.any(family.eigenvalues >= beta):
        return None

    eta = _unperturbed_eta(pencil, cert)
    for endpoint in (alpha, beta):
        reference = lu_det_sign(eta.at(endpoint), tol.singular_rel)
        if reference == 0 or lu_det_sign(family.pencil.at(endpoint), tol.singular_rel) != reference:
            return None

    total = 0
    for lam in family.eigenvalues:
        local = certify(family.pencil, float(lam), tol)
        if not local.simple:
            return None
        x = local.splitting.G2[:, 0]
        total += twin_contribution(family.pencil, float(lam), x, conv, tol)
    return family.z_sign * total


def initial_epsilon(
    pencil: Pencil,
    lambda_star: float,
    interval: Tuple[float, float],
    divisor: float,
    tol: Tolerances = Tolerances(),
) -> float:
    alpha, beta = interval
    others = [v for v in spectrum_values(pencil, tol) if abs(v - lambda_star) > tol.cluster_radius]
    gap = min((abs(v - lambda_star) for v in others), default=np.inf)
    return float(min(gap, beta - lambda_star, lambda_star - alpha) / divisor)


def _check_endpoints(pencil: Pencil, alpha: float, beta: float, tol: Tolerances) -> None:
    if not alpha < beta:
        raise NonIsolatingIntervalError(f"empty interval ({alpha}, {beta})")
    for endpoint in (alpha, beta):
        close = any(abs(v - endpoint) <= tol.cluster_radius for v in spectrum_values(pencil, tol))
        if close or lu_det_sign(pencil.at(endpoint), tol.singular_rel) == 0:
            raise EndpointCollisionError(f"interval endpoint {endpoint} is an eigenvalue")


def eigenset_contribution(
    pencil: Pencil,
    lambda_star: float,
    interval: Tuple[float, float],
    conv: OrientationConvention = OrientationConvention(),
    tol: Tolerances = Tolerances(),
    settings: DegreeSettings = DegreeSettings(),
    epsilon: Optional[float] = None,
) -> int:
    """Degree of ψ on (α, β) × S when λ* is the only eigenvalue in [α, β]."""
    contribution, _ = _eigenset_contribution(pencil, lambda_star, interval, conv, tol, settings, epsilon)
    return contribution


def _eigenset_contribution(
    pencil: Pencil,
    lambda_star: float,
    interval: Tuple[float, float],
    conv: OrientationConvention,
    tol: Tolerances,
    settings: DegreeSettings,
    epsilon: Optional[float],
) -> Tuple[int, str]:
    alpha, beta = interval
    _check_endpoints(pencil, alpha, beta, tol)
    inside = pencil_eigenvalues(pencil, (alpha, beta), tol)
    if len(inside) != 1 or abs(inside[0].value - lambda_star) > tol.cluster_radius:
        found = ", ".join(f"{i.value:.10g}" for i in inside) or "none"
        raise NonIsolatingIntervalError(
            f"({alpha}, {beta}) does not isolate λ*={lambda_star}; eigenvalues inside: {found}"
        )
    lambda_star = inside[0].value

    cert = certify(pencil, lambda_star, tol)
    if cert.simple:
        x = cert.splitting.G2[:, 0]
        return twin_contribution(pencil, lambda_star, x, conv, tol), COMPUTATION_FORMULA

    eps = epsilon if epsilon is not None else initial_epsilon(
        pencil, lambda_star, interval, settings.epsilon_divisor, tol
    )
    previous: Optional[int] = None
    for halving in range(settings.max_halvings):
        current = _perturbed_degree(pencil, cert, interval, eps, conv, tol)
        logger.debug("λ*=%.10g, ε=%.3e: degree %s", lambda_star, eps, current)
        if current is not None and current == previous:
            logger.info("λ*=%.10g: contribution %d (ε=%.3e, %d halvings)", lambda_star, current, eps, halving)
            return current, EPSILON_PERTURBATION
        previous = current
        eps /= 2.0
    raise EpsilonExhaustedError(
        f"no stable ε-approximation at λ*={lambda_star} after {settings.max_halvings} halvings"
    )


def degree_on_interval(
    pencil: Pencil,
    alpha: float,
    beta: float,
    conv: OrientationConvention = OrientationConvention(),
    tol: Tolerances = Tolerances(),
    settings: DegreeSettings = DegreeSettings(),
    lambda_hat: Optional[float] = None,
    epsilon: Optional[float] = None,
    threads: int = 1,
    spectral: SpectralSettings = SpectralSettings(),
) -> DegreeReport:
    """Sum of eigenset contributions over an isolating partition of (α, β)."""
    _check_endpoints(pencil, alpha, beta, tol)
    infos = pencil_eigenvalues(pencil, (alpha, beta), tol, spectral)
    values = [info.value for info in infos]
    cuts = [alpha] + [(a + b) / 2.0 for a, b in zip(values, values[1:])] + [beta]

    def contribution(index: int) -> Tuple[int, str]:
        return _eigenset_contribution(
            pencil, values[index], (cuts[index], cuts[index + 1]), conv, tol, settings, epsilon
        )

    with ThreadPoolExecutor(max_workers=max(threads, 1)) as pool:
        results = list(pool.map(contribution, range(len(values))))

    if lambda_hat is None:
        lambda_hat = choose_resolvent_point(pencil, (alpha, beta), spectral)
    methods = {method for _, method in results}
    report = DegreeReport(
        interval=(alpha, beta),
        value=int(sum(c for c, _ in results)),
        method=EPSILON_PERTURBATION if EPSILON_PERTURBATION in methods else COMPUTATION_FORMULA,
        ls_sign_alpha=ls_sign(pencil, lambda_hat, alpha, tol),
        ls_sign_beta=ls_sign(pencil, lambda_hat, beta, tol),
        lambda_hat=float(lambda_hat),
        eigensets_found=[(v, int(c)) for v, (c, _) in zip(values, results)],
    )
    logger.info("deg on (%g, %g) = %d via %s", alpha, beta, report.value, report.method)
    return report


def conjecture_check(
    pencil: Pencil,
    alpha: float,
    beta: float,
    conv: OrientationConvention = OrientationConvention(),
    tol: Tolerances = Tolerances(),
    settings: DegreeSettings = DegreeSettings(),
    lambda_hat: Optional[float] = None,
) -> ConjectureOutcome:
    """Compare deg ≠ 0 with a jump of the LS-sign between α and β."""
    report = degree_on_interval(pencil, alpha, beta, conv, tol, settings, lambda_hat=lambda_hat)
    deg_nonzero = report.value != 0
    signs_differ = report.ls_sign_alpha != report.ls_sign_beta
    outcome = ConjectureOutcome(
        interval=(alpha, beta),
        deg_nonzero=deg_nonzero,
        endpoint_signs_differ=signs_differ,
        agree=deg_nonzero == signs_differ,
        degree=report.value,
        ls_sign_alpha=report.ls_sign_alpha,
        ls_sign_beta=report.ls_sign_beta,
    )
    if not outcome.agree:
        logger.warning(
            "Disagreement on (%g, %g): degree %d, LS signs %d/%d, eigensets %s",
            alpha,
            beta,
            report.value,
            report.ls_sign_alpha,
            report.ls_sign_beta,
            report.eigensets_found,
        )
    return outcome


def conjecture_sweep(
    pencil: Pencil,
    window: Tuple[float, float],
    conv: OrientationConvention = OrientationConvention(),
    tol: Tolerances = Tolerances(),
    settings: DegreeSettings = DegreeSettings(),
) -> List[ConjectureOutcome]:
    """conjecture_check on every interval whose endpoints are eigenvalue midpoints."""
    lo, hi = window
    values = [info.value for info in pencil_eigenvalues(pencil, window, tol)]
    points = [lo] + [(a + b) / 2.0 for a, b in zip(values, values[1:])] + [hi]
    lambda_hat = choose_resolvent_point(pencil, window)
    return [
        conjecture_check(pencil, points[i], points[j], conv, tol, settings, lambda_hat=lambda_hat)
        for i in range(len(points))
        for j in range(i + 1, len(points))
    ]


def left_compose(pencil: Pencil, Z: np.ndarray) -> Pencil:
    """The pencil of Zψ: (ZL, ZC)."""
    return Pencil(Z @ pencil.L, Z @ pencil.C, compactness_tag=pencil.compactness_tag)


def composed_degree(
    pencil: Pencil,
    Z: np.ndarray,
    alpha: float,
    beta: float,
    conv: OrientationConvention = OrientationConvention(),
    tol: Tolerances = Tolerances(),
    settings: DegreeSettings = DegreeSettings(),
) -> int:
    """Degree of Zψ on (α, β) × S for an invertible Z; equals sign(det Z)·deg ψ."""
    if lu_det_sign(Z, tol.singular_rel) == 0:
        raise SingularArgumentError("Z must be invertible")
    return degree_on_interval(left_compose(pencil, Z), alpha, beta, conv, tol, settings).value
