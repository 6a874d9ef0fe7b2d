# schemas/__init__.py
"""
Pydantic schemas for p-values, schedules, bounds, simulations and the API
"""
from .common import HealthResponse, ProcedureDefaults
from .pvalue_schemas import GroundTruth, PValueSet, RejectionResult
from .schedule_schemas import (
    CorrectionFactors,
    CriticalSchedule,
    EstimatorConfig,
    GeneratorFamily,
    GeneratorSpec,
    M0Estimate,
    ScheduleMeta,
    TruncationConfig,
)
from .bound_schemas import BoundReport, CrossoverReport, FirstCriticalValues
from .simulation_schemas import Scenario, SimulationSummary
from .analysis_schemas import (
    AnalysisRequest,
    AnalysisResponse,
    BoundsRequest,
    BoundsResponse,
    ProcedureParams,
    SimulationRequest,
    SimulationResponse,
    SimulationRow,
    SweepRequest,
    SweepResult,
    SweepRow,
)

__all__ = [
    # Common
    "ProcedureDefaults",
    "HealthResponse",
    # P-values
    "GroundTruth",
    "PValueSet",
    "RejectionResult",
    # Schedules
    "CorrectionFactors",
    "CriticalSchedule",
    "EstimatorConfig",
    "GeneratorFamily",
    "GeneratorSpec",
    "M0Estimate",
    "ScheduleMeta",
    "TruncationConfig",
    # Bounds
    "BoundReport",
    "CrossoverReport",
    "FirstCriticalValues",
    # Simulation
    "Scenario",
    "SimulationSummary",
    # API
    "AnalysisRequest",
    "AnalysisResponse",
    "BoundsRequest",
    "BoundsResponse",
    "ProcedureParams",
    "SimulationRequest",
    "SimulationResponse",
    "SimulationRow",
    "SweepRequest",
    "SweepResult",
    "SweepRow",
]
