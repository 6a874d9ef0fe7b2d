"""
Schemas for generating functions, truncation and critical-value schedules
"""
from enum import Enum
from typing import List, Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator


class GeneratorFamily(str, Enum):
    W1_BH = "W1_BH"
    W2_AORC = "W2_AORC"
    W3_BLANCHARD_ROQUAIN = "W3_BlanchardRoquain"
    W4_COMBINED = "W4_Combined"


class GeneratorSpec(BaseModel):
    """A generating function g with its level, cap and (for W3) the test count."""
    model_config = ConfigDict(frozen=True)

    family: GeneratorFamily
    alpha: float = Field(..., gt=0.0, lt=1.0)
    lam: float = Field(default=1.0, gt=0.0, le=1.0, description="Cap of W3/W4; unused by W1/W2")
    m: Optional[int] = Field(default=None, ge=1, description="Test count, required by W3")
    scale: float = Field(default=1.0, gt=0.0, description="g is multiplied by this factor")

    @model_validator(mode="after")
    def _check_m(self) -> "GeneratorSpec":
        if self.family == GeneratorFamily.W3_BLANCHARD_ROQUAIN and self.m is None:
            raise ValueError("W3 needs the test count m")
        return self

    @property
    def is_capped(self) -> bool:
        return self.family in (GeneratorFamily.W3_BLANCHARD_ROQUAIN, GeneratorFamily.W4_COMBINED)


class TruncationConfig(BaseModel):
    """Truncation level k and the m0-estimation mode; deterministic mode pins C = delta = 1."""
    model_config = ConfigDict(frozen=True)

    k: int = Field(..., ge=1)
    m0_mode: Literal["deterministic", "adaptive"] = "deterministic"
    C: float = Field(default=1.0, gt=0.0, le=1.0)
    delta: float = Field(default=1.0, gt=0.0, le=1.0)

    @model_validator(mode="before")
    @classmethod
    def _pin_deterministic(cls, data):
        if isinstance(data, dict) and data.get("m0_mode", "deterministic") == "deterministic":
            data = {**data, "C": 1.0, "delta": 1.0}
        return data


class ScheduleMeta(BaseModel):
    """Provenance of a schedule"""
    generator: str
    alpha: Optional[float] = None
    lam: Optional[float] = None
    k: Optional[int] = None
    kappa: Optional[int] = None
    j_star: Optional[int] = None
    m0_mode: Literal["deterministic", "adaptive", "data-dependent"] = "deterministic"
    m0_hat: Optional[float] = None
    corrections: List[str] = Field(default_factory=list)
    notes: List[str] = Field(default_factory=list)


class CriticalSchedule(BaseModel):
    """Non-decreasing critical values alpha_{1:m} <= ... <= alpha_{m:m}"""
    model_config = ConfigDict(frozen=True)

    values: List[float] = Field(..., min_length=1)
    meta: ScheduleMeta

    @property
    def m(self) -> int:
        return len(self.values)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=float)


class EstimatorConfig(BaseModel):
    """Null-count estimator and its sparsity clamp [C m, m / delta]"""
    model_config = ConfigDict(frozen=True)

    kind: Literal["storey", "fixed"] = "storey"
    lam: float = Field(default=0.5, gt=0.0, lt=1.0)
    C: float = Field(default=0.5, gt=0.0, le=1.0)
    delta: float = Field(default=1.0, gt=0.0, le=1.0)
    fixed_m0: Optional[float] = Field(default=None, gt=0.0)

    @model_validator(mode="after")
    def _check_fixed(self) -> "EstimatorConfig":
        if self.kind == "fixed" and self.fixed_m0 is None:
            raise ValueError("kind='fixed' needs fixed_m0")
        return self


class M0Estimate(BaseModel):
    value: float = Field(..., description="Clamped estimate used by the schedule")
    raw_value: float = Field(..., description="Estimate before clamping")
    kind: str
    lam: Optional[float] = None
    C: float
    delta: float
    upper_tail_only: bool = Field(
        default=False,
        description="Estimate is a function of the p-values above lambda only",
    )


class CorrectionFactors(BaseModel):
    """Procedure correction C_k, dependence correction D_k and the upper argument B"""
    model_config = ConfigDict(frozen=True)

    Ck: float = Field(..., gt=0.0)
    Dk: float = Field(..., gt=0.0)
    B: float = Field(..., gt=0.0, le=1.0)
    regime: Literal["BI", "dependence"]
    mode: Literal["deterministic", "adaptive"]

    @property
    def product(self) -> float:
        return self.Ck * self.Dk
