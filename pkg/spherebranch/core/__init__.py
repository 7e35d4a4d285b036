"""
Core numerical modules.
"""

from .operators import (
    Pencil,
    Perturbation,
    PerturbedProblem,
    build_Tk,
    build_C,
    build_paired_rotation,
    example_problem,
    psi,
    psi_plus,
    homogeneous_extension,
)
from .spectral import certify, kernel_basis, pencil_eigenvalues, eigensphere_dim
from .degree import (
    OrientationConvention,
    composed_degree,
    degree_on_interval,
    eigenset_contribution,
    conjecture_check,
    ls_sign,
    simple_eigenpoint_sign,
)
from .continuation import (
    SolutionPoint,
    find_trivial_solutions,
    trace_branch,
    classify_component,
    detect_bifurcation_points,
)
from .eigenpairs import eigenpair_det, trace_components, fit_conic

__all__ = [
    "Pencil",
    "Perturbation",
    "PerturbedProblem",
    "build_Tk",
    "build_C",
    "build_paired_rotation",
    "example_problem",
    "psi",
    "psi_plus",
    "homogeneous_extension",
    "certify",
    "kernel_basis",
    "pencil_eigenvalues",
    "eigensphere_dim",
    "OrientationConvention",
    "composed_degree",
    "degree_on_interval",
    "eigenset_contribution",
    "conjecture_check",
    "ls_sign",
    "simple_eigenpoint_sign",
    "SolutionPoint",
    "find_trivial_solutions",
    "trace_branch",
    "classify_component",
    "detect_bifurcation_points",
    "eigenpair_det",
    "trace_components",
    "fit_conic",
]
