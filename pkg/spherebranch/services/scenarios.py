"""
Scenario pipelines: one function per subcommand, plus the worked examples.

Every pipeline returns plain records; run_spec / run_example collect them
into a RunReport and write the artifacts.
"""

import hashlib
import json
import logging
import time
from contextlib import contextmanager
from pathlib import Path
from typing import Any, Dict, Iterator, List, Optional, Tuple

import numpy as np

from .. import __version__
from ..core.continuation import (
    Branch,
    ComponentVerdict,
    SolutionPoint,
    classify_component,
    detect_bifurcation_points,
    find_trivial_solutions,
    reduced_bifurcation_candidates,
    trace_branch,
)
from ..core.degree import (
    ConjectureOutcome,
    DegreeReport,
    OrientationConvention,
    conjecture_sweep,
    degree_on_interval,
)
from ..core.eigenpairs import CLOSED_CURVE, MIN_FIT_SAMPLES, EigenpairComponent, fit_conic, trace_components
from ..core.errors import NotAnEigenvalueError, SphereBranchError
from ..core.operators import PerturbedProblem, example_problem
from ..core.spectral import HypothesisCertificate, certify, eigensphere_dim, pencil_eigenvalues
from ..models import (
    BifurcationParams,
    BranchRecord,
    CertificateRecord,
    CertifyParams,
    ComponentRecord,
    ConicFitRecord,
    ConjectureParams,
    ConjectureRecord,
    ContributionRecord,
    DegreeParams,
    DegreeRecord,
    EigenvalueRecord,
    MapParams,
    RunReport,
    ScenarioConfig,
    SpectrumParams,
    TerminationRecord,
    ToolSettings,
    TraceParams,
    VerdictRecord,
)
from .artifacts import write_branch, write_component, write_json
from .problems import build_problem, perturbation_checks

logger = logging.getLogger("Scenario")

EXAMPLE_SPECTRUM_WINDOW = (-1.0, 10.5)
EXAMPLE_DEGREE_INTERVAL = (-0.5, 0.5)
EXAMPLE_CONJECTURE_WINDOW = (-1.0, 6.5)
EXAMPLE_MAP_WINDOWS = {
    1: (-1.0, 1.0, -0.5, 4.5),
    2: (-0.3, 0.3, -0.5, 4.5),
    3: (-1.0, 1.0, -1.0, 8.0),
}


def input_hash(payload: Any) -> str:
    """sha256 of the canonical JSON form."""
    canonical = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def _vector(x: np.ndarray) -> List[float]:
    return [float(v) for v in x]


@contextmanager
def _stage(name: str, timings: Dict[str, float]) -> Iterator[None]:
    """Time a pipeline stage and prefix its errors with the stage name."""
    start = time.perf_counter()
    try:
        yield
    except SphereBranchError as e:
        e.args = (f"{name}: {e}",)
        raise
    finally:
        timings[name] = time.perf_counter() - start


# =============================================================================
# Record builders
# =============================================================================

def certificate_record(cert: HypothesisCertificate) -> CertificateRecord:
    return CertificateRecord(
        lambda_star=cert.lambda_star,
        geometric_mult=cert.geometric_mult,
        h1_compact=cert.h1_compact,
        h2_odd=cert.h2_odd,
        h3_residual=cert.h3_residual,
        h3_holds=cert.h3_holds,
        simple=cert.simple,
    )


def degree_record(report: DegreeReport) -> DegreeRecord:
    return DegreeRecord(
        alpha=report.interval[0],
        beta=report.interval[1],
        value=report.value,
        method=report.method,
        ls_sign_alpha=report.ls_sign_alpha,
        ls_sign_beta=report.ls_sign_beta,
        lambda_hat=report.lambda_hat,
        eigensets_found=[ContributionRecord(eigenvalue=v, contribution=c) for v, c in report.eigensets_found],
    )


def conjecture_record(outcome: ConjectureOutcome) -> ConjectureRecord:
    return ConjectureRecord(
        alpha=outcome.interval[0],
        beta=outcome.interval[1],
        deg_nonzero=outcome.deg_nonzero,
        endpoint_signs_differ=outcome.endpoint_signs_differ,
        agree=outcome.agree,
        degree=outcome.degree,
        ls_sign_alpha=outcome.ls_sign_alpha,
        ls_sign_beta=outcome.ls_sign_beta,
    )


def branch_record(branch: Branch) -> BranchRecord:
    return BranchRecord(
        anchor_lambda=branch.anchor.lam,
        anchor_x=_vector(branch.anchor.x),
        direction=branch.direction,
        points=len(branch.points),
        arclength=branch.arclength,
        termination=TerminationRecord(kind=branch.termination.kind, detail=branch.termination.detail()),
    )


def verdict_record(verdict: ComponentVerdict) -> VerdictRecord:
    return VerdictRecord(
        verdict=verdict.verdict,
        lambda_second=verdict.lambda_second,
        x_second=_vector(verdict.x_second) if verdict.x_second is not None else None,
        branches=[branch_record(b) for b in verdict.branches],
        diagnostics=verdict.diagnostics,
    )


def component_record(index: int, component: EigenpairComponent) -> ComponentRecord:
    fit = None
    if component.kind == CLOSED_CURVE and len(component.samples) >= MIN_FIT_SAMPLES:
        conic = fit_conic(component)
        fit = ConicFitRecord(center=conic.center, half_axes=conic.half_axes, residual=conic.residual)
    return ComponentRecord(
        index=index,
        kind=component.kind,
        samples=len(component.samples),
        conic_fit=fit,
        level=component.level,
        point=component.point,
    )


# =============================================================================
# Pipelines
# =============================================================================

def spectrum_pipeline(problem: PerturbedProblem, window: Tuple[float, float], settings: ToolSettings) -> List[dict]:
    infos = pencil_eigenvalues(problem.pencil, window, settings.tolerances, settings.spectral)
    return [
        EigenvalueRecord(
            value=i.value,
            geometric_mult=i.geometric_mult,
            algebraic_mult=i.algebraic_mult,
            eigensphere_dim=eigensphere_dim(i),
        ).model_dump()
        for i in infos
    ]


def certify_pipeline(problem: PerturbedProblem, params: CertifyParams, settings: ToolSettings) -> List[dict]:
    if params.lambda_star is not None:
        targets = [params.lambda_star]
    else:
        targets = [i.value for i in pencil_eigenvalues(problem.pencil, params.window, settings.tolerances)]
    return [certificate_record(certify(problem.pencil, lam, settings.tolerances)).model_dump() for lam in targets]


def degree_pipeline(problem: PerturbedProblem, params: DegreeParams, settings: ToolSettings, threads: int) -> dict:
    report = degree_on_interval(
        problem.pencil,
        params.alpha,
        params.beta,
        OrientationConvention(settings.degree.global_sign),
        settings.tolerances,
        settings.degree,
        lambda_hat=params.lambda_hat,
        epsilon=params.epsilon,
        threads=threads,
        spectral=settings.spectral,
    )
    return degree_record(report).model_dump()


def conjecture_pipeline(problem: PerturbedProblem, window: Tuple[float, float], settings: ToolSettings) -> dict:
    outcomes = conjecture_sweep(
        problem.pencil, window, OrientationConvention(settings.degree.global_sign), settings.tolerances, settings.degree
    )
    records = [conjecture_record(o).model_dump() for o in outcomes]
    return {
        "intervals": records,
        "disagreements": sum(1 for o in outcomes if not o.agree),
    }


def select_anchor(problem: PerturbedProblem, anchor_lambda: float, anchor_index: int, settings: ToolSettings) -> SolutionPoint:
    radius = settings.tolerances.cluster_radius * max(1.0, abs(anchor_lambda))
    anchors = find_trivial_solutions(
        problem, (anchor_lambda - radius, anchor_lambda + radius), settings.tolerances, settings.continuation
    )
    if not anchors:
        raise NotAnEigenvalueError(f"λ={anchor_lambda} is not an eigenvalue; no trivial solutions to start from")
    if anchor_index >= len(anchors):
        raise NotAnEigenvalueError(f"anchor index {anchor_index} out of range, {len(anchors)} anchors at λ={anchor_lambda}")
    return anchors[anchor_index]


def trace_pipeline(
    problem: PerturbedProblem,
    params: TraceParams,
    settings: ToolSettings,
    threads: int,
    outdir: Optional[Path],
    prefix: str = "branch",
) -> dict:
    anchor = select_anchor(problem, params.anchor_lambda, params.anchor_index, settings)
    branch = trace_branch(
        problem, anchor, params.direction, settings.continuation, settings.tolerances, bound=params.bound, step=params.step
    )
    verdict = classify_component(
        problem, anchor, params.bound, settings.continuation, settings.tolerances, threads=threads
    )
    if outdir is not None:
        write_branch(outdir / f"{prefix}.csv", branch)
        for index, b in enumerate(verdict.branches):
            write_branch(outdir / f"{prefix}_component_{index}.csv", b)
    return {"branch": branch_record(branch).model_dump(), "verdict": verdict_record(verdict).model_dump()}


def bifurcation_pipeline(problem: PerturbedProblem, params: BifurcationParams, settings: ToolSettings) -> dict:
    candidates = reduced_bifurcation_candidates(
        problem, params.lambda_star, settings.tolerances, settings.continuation.grid_density
    )
    points = detect_bifurcation_points(problem, params.lambda_star, settings.continuation, settings.tolerances)
    return {
        "lambda_star": params.lambda_star,
        "candidates": [{"x": _vector(c.x), "slope": c.slope} for c in candidates],
        "points": [_vector(p) for p in points],
    }


def map_pipeline(
    problem: PerturbedProblem,
    params: MapParams,
    settings: ToolSettings,
    threads: int,
    outdir: Optional[Path],
    prefix: str = "component",
) -> List[dict]:
    components = trace_components(problem, params.window, params.grid, settings.eigenpairs, threads)
    records = []
    for index, component in enumerate(components):
        records.append(component_record(index, component).model_dump())
        if outdir is not None:
            write_component(outdir / f"{prefix}_{index}.csv", component)
    return records


# =============================================================================
# Runners
# =============================================================================

def _resolve_outdir(config_output: Optional[str], outdir: Optional[Path], settings: ToolSettings) -> Path:
    if outdir is not None:
        return Path(outdir)
    return Path(config_output) if config_output else Path(settings.paths.output)


def _finish(report: RunReport, outdir: Path) -> RunReport:
    write_json(outdir / "report.json", report.deterministic_dump())
    write_json(outdir / "timings.json", report.timings)
    logger.info("Report written to %s", outdir)
    return report


def run_spec(
    config: ScenarioConfig,
    settings: Optional[ToolSettings] = None,
    outdir: Optional[Path] = None,
    threads: Optional[int] = None,
) -> RunReport:
    """Run the subcommand a validated ScenarioConfig requests."""
    settings = settings or ToolSettings()
    threads = threads or settings.runtime.threads
    run = config.run
    out = _resolve_outdir(config.output, outdir, settings)

    if run.command == "example":
        return run_example(run.name, run.n, out, settings, threads, seed=config.seed)

    report = RunReport(
        tool_version=__version__,
        input_hash=input_hash(config.model_dump(mode="json", exclude={"output"})),
        seed=config.seed,
    )
    timings: Dict[str, float] = {}
    results: Dict[str, Any] = {}
    with _stage("load", timings):
        problem = build_problem(config.problem)
        results["checks"] = perturbation_checks(problem, config.seed)

    with _stage(run.command, timings):
        if run.command == "certify":
            results["certificates"] = certify_pipeline(problem, run, settings)
        elif run.command == "spectrum":
            results["spectrum"] = spectrum_pipeline(problem, run.window, settings)
        elif run.command == "degree":
            results["degree"] = degree_pipeline(problem, run, settings, threads)
        elif run.command == "conjecture":
            results["conjecture"] = conjecture_pipeline(problem, run.window, settings)
        elif run.command == "trace":
            results["trace"] = trace_pipeline(problem, run, settings, threads, out)
        elif run.command == "bifurcations":
            results["bifurcations"] = bifurcation_pipeline(problem, run, settings)
        elif run.command == "map":
            results["map"] = map_pipeline(problem, run, settings, threads, out)

    report.results = results
    report.timings = timings
    return _finish(report, out)


def _unit(n: int, index: int) -> np.ndarray:
    e = np.zeros(n)
    e[index] = 1.0
    return e


def _example_anchors(k: int, n: int) -> List[SolutionPoint]:
    """Anchors whose components each example is known for."""
    if k == 3:
        return [SolutionPoint(0.0, 0.0, _unit(n, 2)), SolutionPoint(0.0, 5.0, _unit(n, 4))]
    if k == 2:
        return [SolutionPoint(0.0, 0.0, _unit(n, 0)), SolutionPoint(0.0, 3.0, _unit(n, 2))]
    return [SolutionPoint(0.0, 0.0, _unit(n, 0)), SolutionPoint(0.0, 3.0, _unit(n, 2))]


def run_example(
    name: str,
    n: int,
    outdir: Path,
    settings: Optional[ToolSettings] = None,
    threads: int = 1,
    seed: int = 0,
) -> RunReport:
    """Certificates, spectrum, degree, eigenpair map and branches for example k1, k2 or k3."""
    settings = settings or ToolSettings()
    k = int(name[1:])
    outdir = Path(outdir)
    report = RunReport(
        tool_version=__version__,
        input_hash=input_hash({"example": name, "n": n, "seed": seed}),
        seed=seed,
    )
    timings: Dict[str, float] = {}
    results: Dict[str, Any] = {"example": name, "n": n}
    logger.info("Running example %s at n=%d", name, n)

    with _stage("load", timings):
        problem = example_problem(k, n)
        results["checks"] = perturbation_checks(problem, seed)
    with _stage("spectrum", timings):
        results["spectrum"] = spectrum_pipeline(problem, EXAMPLE_SPECTRUM_WINDOW, settings)
    with _stage("certify", timings):
        results["certificates"] = [certificate_record(certify(problem.pencil, 0.0, settings.tolerances)).model_dump()]
    with _stage("degree", timings):
        alpha, beta = EXAMPLE_DEGREE_INTERVAL
        results["degree"] = degree_pipeline(problem, DegreeParams(alpha=alpha, beta=beta), settings, threads)
    with _stage("conjecture", timings):
        results["conjecture"] = conjecture_pipeline(problem, EXAMPLE_CONJECTURE_WINDOW, settings)
    with _stage("map", timings):
        params = MapParams(window=EXAMPLE_MAP_WINDOWS[k])
        results["map"] = map_pipeline(problem, params, settings, threads, outdir)
    with _stage("trace", timings):
        verdicts = []
        for index, anchor in enumerate(_example_anchors(k, n)):
            verdict = classify_component(
                problem, anchor, None, settings.continuation, settings.tolerances, threads=threads
            )
            for b_index, branch in enumerate(verdict.branches):
                write_branch(outdir / f"branch_{index}_{b_index}.csv", branch)
            verdicts.append(verdict_record(verdict).model_dump())
        results["verdicts"] = verdicts
    if k == 3:
        with _stage("bifurcations", timings):
            results["bifurcations"] = bifurcation_pipeline(problem, BifurcationParams(lambda_star=0.0), settings)

    report.results = results
    report.timings = timings
    return _finish(report, outdir)
