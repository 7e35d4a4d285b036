"""
Pydantic schemas for configuration, problem specs and reports.
"""

from typing import Annotated, Any, Dict, List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class StrictModel(BaseModel):
    """Unknown keys are rejected everywhere."""

    model_config = ConfigDict(extra="forbid")


# =============================================================================
# Tool settings (validated view of config.yaml)
# =============================================================================

class Tolerances(StrictModel):
    unit_norm: float = 1e-10
    singular_rel: float = 1e-12
    rank_rel: float = 1e-8
    condition_ceiling: float = 1e12
    kernel_residual: float = 1e-8
    injectivity: float = 1e-10
    h3_angle: float = 1e-6
    cluster_radius: float = 1e-6


class SpectralSettings(StrictModel):
    scan_low: float = -64.0
    scan_high: float = 64.0
    scan_count: int = Field(257, ge=3)
    resolvent_samples: int = Field(64, ge=4)


class DegreeSettings(StrictModel):
    global_sign: Literal[-1, 1] = 1
    epsilon_divisor: float = Field(10.0, gt=1.0)
    max_halvings: int = Field(40, ge=1)


class ContinuationSettings(StrictModel):
    initial_step: float = Field(1e-2, gt=0)
    min_step: float = Field(1e-8, gt=0)
    max_step: float = Field(0.1, gt=0)
    shrink: float = Field(0.5, gt=0, lt=1)
    grow: float = Field(1.3, ge=1)
    grow_after: int = Field(4, ge=1)
    newton_max_iter: int = Field(12, ge=1)
    newton_tol: float = 1e-12
    accept_tol: float = 1e-9
    bound: float = Field(10.0, gt=0)
    max_steps: int = Field(5000, ge=1)
    trivial_s_tol: float = 1e-7
    eigensphere_tol: float = 1e-6
    loop_tol: float = 1e-6
    grid_density: int = Field(8, ge=2)
    ladder_start: float = Field(1e-2, gt=0)
    ladder_levels: int = Field(6, ge=2)


class EigenpairSettings(StrictModel):
    grid_s: int = Field(121, ge=5)
    grid_lambda: int = Field(181, ge=5)
    zero_tol: float = 1e-12
    line_fraction: float = Field(0.95, gt=0, le=1)
    refine_factor: int = Field(4, ge=2)
    refinements: int = Field(2, ge=1)


class RuntimeSettings(StrictModel):
    threads: int = Field(1, ge=1)
    seed: int = Field(0, ge=0)


class LoggingSettings(StrictModel):
    level: Literal["error", "info", "debug"] = "error"

    @field_validator("level", mode="before")
    @classmethod
    def _lower(cls, value: Any) -> Any:
        return value.lower() if isinstance(value, str) else value


class PathSettings(StrictModel):
    output: str = "runs"


class ToolSettings(StrictModel):
    """Every tunable number of the library."""

    tolerances: Tolerances = Tolerances()
    spectral: SpectralSettings = SpectralSettings()
    degree: DegreeSettings = DegreeSettings()
    continuation: ContinuationSettings = ContinuationSettings()
    eigenpairs: EigenpairSettings = EigenpairSettings()
    runtime: RuntimeSettings = RuntimeSettings()
    logging: LoggingSettings = LoggingSettings()
    paths: PathSettings = PathSettings()


# =============================================================================
# Problem spec (JSON input)
# =============================================================================

DenseMatrix = Union[List[float], List[List[float]]]


class LinearOperatorSpec(StrictModel):
    """One of {"builder": "Tk", "k": 3}, {"builder": "harmonic"}, {"dense": [...]}."""

    builder: Optional[Literal["Tk", "harmonic"]] = None
    k: Optional[int] = Field(None, ge=1)
    dense: Optional[DenseMatrix] = None
    compact: Optional[bool] = None

    @model_validator(mode="after")
    def _one_source(self) -> "LinearOperatorSpec":
        if (self.builder is None) == (self.dense is None):
            raise ValueError("exactly one of 'builder' or 'dense' is required")
        if self.builder == "Tk" and self.k is None:
            raise ValueError("builder 'Tk' needs 'k'")
        if self.builder != "Tk" and self.k is not None:
            raise ValueError("'k' only applies to builder 'Tk'")
        return self


class PerturbationSpec(StrictModel):
    """One of {"builder": "paired_rotation"} or {"linear": [...]}; the builder also answers to its legacy name."""

    builder: Optional[Literal["paired_rotation", "paper_N"]] = None
    linear: Optional[DenseMatrix] = None

    @model_validator(mode="after")
    def _one_source(self) -> "PerturbationSpec":
        if (self.builder is None) == (self.linear is None):
            raise ValueError("exactly one of 'builder' or 'linear' is required")
        return self


class ProblemSpec(StrictModel):
    dim: int = Field(..., ge=2)
    L: LinearOperatorSpec
    C: LinearOperatorSpec
    N: PerturbationSpec


# =============================================================================
# Scenario config (one subcommand run)
# =============================================================================

class CertifyParams(StrictModel):
    command: Literal["certify"] = "certify"
    lambda_star: Optional[float] = None
    window: Tuple[float, float] = (-1.0, 10.5)


class SpectrumParams(StrictModel):
    command: Literal["spectrum"] = "spectrum"
    window: Tuple[float, float] = (-1.0, 10.5)


class DegreeParams(StrictModel):
    command: Literal["degree"] = "degree"
    alpha: float
    beta: float
    lambda_hat: Optional[float] = None
    epsilon: Optional[float] = Field(None, gt=0)

    @model_validator(mode="after")
    def _ordered(self) -> "DegreeParams":
        if not self.alpha < self.beta:
            raise ValueError("alpha must be smaller than beta")
        return self


class ConjectureParams(StrictModel):
    command: Literal["conjecture"] = "conjecture"
    window: Tuple[float, float] = (-1.0, 10.5)


class TraceParams(StrictModel):
    command: Literal["trace"] = "trace"
    anchor_lambda: float
    anchor_index: int = Field(0, ge=0)
    direction: Literal[-1, 1] = 1
    bound: Optional[float] = Field(None, gt=0)
    step: Optional[float] = Field(None, gt=0)


class BifurcationParams(StrictModel):
    command: Literal["bifurcations"] = "bifurcations"
    lambda_star: float


class MapParams(StrictModel):
    command: Literal["map"] = "map"
    window: Tuple[float, float, float, float]
    grid: Optional[Tuple[int, int]] = None

    @model_validator(mode="after")
    def _ordered(self) -> "MapParams":
        s_lo, s_hi, l_lo, l_hi = self.window
        if not (s_lo < s_hi and l_lo < l_hi):
            raise ValueError("window must be (s_min, s_max, lambda_min, lambda_max)")
        return self


class ExampleParams(StrictModel):
    command: Literal["example"] = "example"
    name: Literal["k1", "k2", "k3"]
    n: int = Field(16, ge=8)


RunParams = Annotated[
    Union[
        CertifyParams,
        SpectrumParams,
        DegreeParams,
        ConjectureParams,
        TraceParams,
        BifurcationParams,
        MapParams,
        ExampleParams,
    ],
    Field(discriminator="command"),
]


class ScenarioConfig(StrictModel):
    """A problem plus the subcommand to run on it."""

    problem: Optional[ProblemSpec] = None
    run: RunParams
    output: Optional[str] = None
    seed: int = Field(0, ge=0)

    @model_validator(mode="after")
    def _problem_required(self) -> "ScenarioConfig":
        if self.problem is None and self.run.command != "example":
            raise ValueError(f"command '{self.run.command}' needs a 'problem'")
        return self


# =============================================================================
# Report records (JSON output)
# =============================================================================

class EigenvalueRecord(BaseModel):
    value: float
    geometric_mult: int
    algebraic_mult: int
    eigensphere_dim: int


class CertificateRecord(BaseModel):
    lambda_star: float
    geometric_mult: int
    h1_compact: bool
    h2_odd: bool
    h3_residual: float
    h3_holds: bool
    simple: bool


class ContributionRecord(BaseModel):
    eigenvalue: float
    contribution: int


class DegreeRecord(BaseModel):
    alpha: float
    beta: float
    value: int
    method: Literal["computation-formula", "epsilon-perturbation"]
    ls_sign_alpha: int
    ls_sign_beta: int
    lambda_hat: float
    eigensets_found: List[ContributionRecord]


class ConjectureRecord(BaseModel):
    alpha: float
    beta: float
    deg_nonzero: bool
    endpoint_signs_differ: bool
    agree: bool
    degree: int
    ls_sign_alpha: int
    ls_sign_beta: int


class TerminationRecord(BaseModel):
    kind: Literal["Unbounded", "TrivialReturn", "ClosedLoop", "StepFailure"]
    detail: Dict[str, Any] = {}


class BranchRecord(BaseModel):
    anchor_lambda: float
    anchor_x: List[float]
    direction: int
    points: int
    arclength: float
    termination: TerminationRecord


class VerdictRecord(BaseModel):
    verdict: Literal["Unbounded", "TrivialReturn", "IsolatedCompact", "Inconclusive"]
    lambda_second: Optional[float] = None
    x_second: Optional[List[float]] = None
    branches: List[BranchRecord] = []
    diagnostics: List[str] = []


class ConicFitRecord(BaseModel):
    center: Tuple[float, float]
    half_axes: Tuple[float, float]
    residual: float


class ComponentRecord(BaseModel):
    index: int
    kind: Literal["line", "closed_curve", "open_curve", "isolated_point"]
    samples: int
    conic_fit: Optional[ConicFitRecord] = None
    level: Optional[float] = None
    point: Optional[Tuple[float, float]] = None


class RunReport(BaseModel):
    """Aggregated results of one run; deterministic apart from `timings`."""

    tool_version: str
    input_hash: str
    seed: int
    results: Dict[str, Any] = {}
    timings: Dict[str, float] = {}

    def deterministic_dump(self) -> Dict[str, Any]:
        return self.model_dump(mode="json", exclude={"timings"})
