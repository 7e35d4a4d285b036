"""
Problem specs: JSON documents to PerturbedProblem instances.
"""

import json
import logging
from pathlib import Path
from typing import Dict, Union

import numpy as np
from pydantic import ValidationError

from ..core.errors import DimensionMismatchError, SchemaError
from ..core.operators import (
    Pencil,
    Perturbation,
    PerturbedProblem,
    build_C,
    build_paired_rotation,
    build_Tk,
    derivative_error,
    linear_consistency_error,
)
from ..models import LinearOperatorSpec, PerturbationSpec, ProblemSpec

logger = logging.getLogger("Problems")


def schema_error(error: ValidationError) -> SchemaError:
    """First pydantic failure as a SchemaError carrying its dotted field path."""
    first = error.errors()[0]
    path = ".".join(str(part) for part in first.get("loc", ()))
    return SchemaError(first.get("msg", str(error)), path)


def _dense(values, dim: int, name: str) -> np.ndarray:
    M = np.asarray(values, dtype=float)
    if M.ndim == 1 and M.size == dim * dim:
        M = M.reshape(dim, dim)
    if M.shape != (dim, dim):
        raise DimensionMismatchError(f"{name} must be {dim}x{dim}, got shape {M.shape}")
    return M


def _operator(spec: LinearOperatorSpec, dim: int, name: str) -> np.ndarray:
    if spec.dense is not None:
        return _dense(spec.dense, dim, name)
    if spec.builder == "Tk":
        return build_Tk(spec.k, dim)
    return build_C(dim)


def _perturbation(spec: PerturbationSpec, dim: int) -> Perturbation:
    if spec.linear is not None:
        return Perturbation.linear(_dense(spec.linear, dim, "N"))
    return build_paired_rotation(dim)


def build_problem(spec: ProblemSpec) -> PerturbedProblem:
    """Instantiate the operators a ProblemSpec describes."""
    L = _operator(spec.L, spec.dim, "L")
    C = _operator(spec.C, spec.dim, "C")
    compact = spec.C.compact if spec.C.compact is not None else spec.C.builder == "harmonic"
    problem = PerturbedProblem(Pencil(L, C, compactness_tag=compact), _perturbation(spec.N, spec.dim))
    logger.info("Loaded problem of dimension %d (C compact: %s)", spec.dim, compact)
    return problem


def load_problem_json(path: Union[str, Path]) -> Dict:
    """Read a problem spec file; malformed JSON is a schema error."""
    try:
        with open(path, "r", encoding="utf-8") as f:
            return json.load(f)
    except json.JSONDecodeError as e:
        raise SchemaError(f"invalid JSON at line {e.lineno}: {e.msg}") from e


def perturbation_checks(problem: PerturbedProblem, seed: int) -> Dict[str, float]:
    """Seeded consistency checks of N against its matrix and its derivative."""
    rng = np.random.default_rng(seed)
    checks = {
        "linear_consistency": linear_consistency_error(problem.perturbation, rng),
        "derivative_error": derivative_error(problem.perturbation, rng),
    }
    if checks["derivative_error"] >= 1e-5:
        logger.warning("Derivative of N disagrees with finite differences (%.3e)", checks["derivative_error"])
    return checks
