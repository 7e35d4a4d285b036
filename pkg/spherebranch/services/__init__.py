"""
Problem loading, artifact writing and scenario pipelines.
"""

from .problems import build_problem, load_problem_json, perturbation_checks, schema_error
from .artifacts import read_csv, write_branch, write_component, write_csv, write_json
from .scenarios import input_hash, run_example, run_spec

__all__ = [
    "build_problem",
    "load_problem_json",
    "perturbation_checks",
    "schema_error",
    "read_csv",
    "write_branch",
    "write_component",
    "write_csv",
    "write_json",
    "input_hash",
    "run_example",
    "run_spec",
]
