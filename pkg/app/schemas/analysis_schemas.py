"""
Request / response schemas for the analysis surfaces (CLI verbs and HTTP API)
"""
from typing import Dict, List, Literal, Optional

from pydantic import BaseModel, Field, field_validator

from ..config import settings
from .bound_schemas import BoundReport
from .simulation_schemas import Scenario

PROCEDURE_IDS = (
    "bh",
    "by",
    "bonferroni",
    "bh-k",
    "es-k",
    "sp-k",
    "w2",
    "w3",
    "w4",
    "adaptive-bh",
    "adaptive-w2",
    "adaptive-w3",
    "adaptive-w4",
)


class ProcedureParams(BaseModel):
    """A procedure id and every tuning parameter; None means 'derive from the data size'"""
    procedure: str = "bh"
    alpha: float = Field(default_factory=lambda: settings.DEFAULT_ALPHA, gt=0.0, lt=1.0)
    lam: Optional[float] = Field(default=None, gt=0.0, le=1.0, description="Cap / Storey tuning; default from settings")
    k: Optional[int] = Field(default=None, ge=1, description="Truncation level; defaults to m")
    kappa: Optional[int] = Field(default=None, ge=1, description="Early-stop level; defaults to k")
    C: Optional[float] = Field(default=None, gt=0.0, le=1.0)
    delta: Optional[float] = Field(default=None, gt=0.0, le=1.0)
    clamp: Literal["sparsity", "natural"] = Field(
        default="sparsity",
        description="sparsity: m0_hat clamped to [C m, m/delta]; natural: plain Storey range",
    )
    correction: Literal["none", "bi", "dependence"] = "none"
    mode: Literal["su", "sd"] = "su"

    @field_validator("procedure")
    @classmethod
    def _check_procedure(cls, v: str) -> str:
        if v not in PROCEDURE_IDS:
            raise ValueError(f"Unknown procedure {v!r}; choose from {', '.join(PROCEDURE_IDS)}")
        return v

    @property
    def is_adaptive(self) -> bool:
        return self.procedure.startswith("adaptive-")


class AnalysisRequest(ProcedureParams):
    pvalues: List[float] = Field(..., min_length=1)
    m0: Optional[int] = Field(default=None, ge=0, description="Null count for bound evaluation; defaults to m")


class AnalysisResponse(BaseModel):
    procedure: str
    m: int
    R: int
    threshold: float
    rejected: List[int]
    mode: str
    schedule_meta: Dict
    bounds: List[BoundReport] = Field(default_factory=list)


class SweepRow(BaseModel):
    k: int
    R_BHk: int
    R_ESk: Optional[int] = Field(default=None, description="Undefined at k = m")


class SweepRequest(BaseModel):
    pvalues: List[float] = Field(..., min_length=1)
    alpha: float = Field(default_factory=lambda: settings.DEFAULT_ALPHA, gt=0.0, lt=1.0)
    k_min: int = Field(default=1, ge=1)
    k_max: Optional[int] = Field(default=None, ge=1)


class SweepResult(BaseModel):
    m: int
    alpha: float
    rows: List[SweepRow]
    R_BY: int
    R_Bonferroni: int


class BoundsRequest(ProcedureParams):
    m: int = Field(..., ge=1)
    m0: Optional[int] = Field(default=None, ge=0)
    bound: Optional[List[str]] = Field(
        default=None,
        min_length=1,
        description="Bound identifiers to evaluate, e.g. det-dependence; every bound of the procedure when omitted",
    )


class BoundsResponse(BaseModel):
    procedure: str
    m: int
    m0: int
    bounds: List[BoundReport]


class SimulationRequest(BaseModel):
    scenario: Scenario
    procedures: List[ProcedureParams] = Field(..., min_length=1)


class SimulationRow(BaseModel):
    scenario: str
    procedure: str
    fdr_hat: float
    fdr_se: Optional[float]
    fwer_hat: float
    fwer_se: Optional[float]
    power_hat: float
    mean_R: float
    replications: int
    nominal_level: float
    level_verdict: str
    bound_source: Optional[str] = None
    bound_value: Optional[float] = None
    bound_verdict: str = "N/A"


class SimulationResponse(BaseModel):
    rows: List[SimulationRow]
