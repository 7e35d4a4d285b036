"""
Pydantic models for spherebranch.
"""

from .schemas import (
    ToolSettings,
    Tolerances,
    SpectralSettings,
    DegreeSettings,
    ContinuationSettings,
    EigenpairSettings,
    ProblemSpec,
    LinearOperatorSpec,
    PerturbationSpec,
    ScenarioConfig,
    CertifyParams,
    SpectrumParams,
    DegreeParams,
    ConjectureParams,
    TraceParams,
    BifurcationParams,
    MapParams,
    ExampleParams,
    EigenvalueRecord,
    CertificateRecord,
    ContributionRecord,
    DegreeRecord,
    ConjectureRecord,
    TerminationRecord,
    BranchRecord,
    VerdictRecord,
    ConicFitRecord,
    ComponentRecord,
    RunReport,
)

__all__ = [
    "ToolSettings",
    "Tolerances",
    "SpectralSettings",
    "DegreeSettings",
    "ContinuationSettings",
    "EigenpairSettings",
    "ProblemSpec",
    "LinearOperatorSpec",
    "PerturbationSpec",
    "ScenarioConfig",
    "CertifyParams",
    "SpectrumParams",
    "DegreeParams",
    "ConjectureParams",
    "TraceParams",
    "BifurcationParams",
    "MapParams",
    "ExampleParams",
    "EigenvalueRecord",
    "CertificateRecord",
    "ContributionRecord",
    "DegreeRecord",
    "ConjectureRecord",
    "TerminationRecord",
    "BranchRecord",
    "VerdictRecord",
    "ConicFitRecord",
    "ComponentRecord",
    "RunReport",
]
