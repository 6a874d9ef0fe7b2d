"""
Schemas for p-value vectors, ground truth and rejection results
"""
import math
from typing import Dict, FrozenSet, List, Literal, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


def invalid_pvalue_entries(values: Sequence[float]) -> List[str]:
    """Describe every entry that is not a real number in [0, 1] (1-based positions)."""
    offenders: List[str] = []
    for pos, v in enumerate(values, start=1):
        try:
            x = float(v)
        except (TypeError, ValueError):
            offenders.append(f"#{pos}={v!r}")
            continue
        if math.isnan(x) or x < 0.0 or x > 1.0:
            offenders.append(f"#{pos}={v!r}")
    return offenders


class PValueSet(BaseModel):
    """The vector p = (p_1, ..., p_m); order statistics are derived on demand."""
    model_config = ConfigDict(frozen=True)

    values: List[float] = Field(..., min_length=1, description="p-values in [0, 1]")

    @field_validator("values")
    @classmethod
    def _check_unit_interval(cls, v: List[float]) -> List[float]:
        offenders = invalid_pvalue_entries(v)
        if offenders:
            raise ValueError(f"p-values outside [0, 1]: {', '.join(offenders[:10])}")
        return v

    @property
    def m(self) -> int:
        return len(self.values)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=float)

    @classmethod
    def trusted(cls, values: np.ndarray) -> "PValueSet":
        """Wrap sampler output without re-validating it."""
        return cls.model_construct(values=np.asarray(values, dtype=float).tolist())


class GroundTruth(BaseModel):
    """Which hypotheses are true nulls (simulation only); indices are 1-based."""
    model_config = ConfigDict(frozen=True)

    m: int = Field(..., ge=1)
    null_indices: FrozenSet[int]

    @model_validator(mode="after")
    def _check_subset(self) -> "GroundTruth":
        if any(i < 1 or i > self.m for i in self.null_indices):
            raise ValueError("null indices must lie in {1, ..., m}")
        return self

    @property
    def m0(self) -> int:
        return len(self.null_indices)

    @property
    def m1(self) -> int:
        return self.m - self.m0

    def null_mask(self) -> np.ndarray:
        mask = np.zeros(self.m, dtype=bool)
        if self.null_indices:
            mask[np.fromiter(self.null_indices, dtype=int) - 1] = True
        return mask


class RejectionResult(BaseModel):
    """Outcome of one step-up or step-down run."""
    model_config = ConfigDict(frozen=True)

    R: int = Field(..., ge=0)
    threshold: float = Field(..., description="alpha_{R:m}, 0 when R = 0")
    rejected: FrozenSet[int] = Field(default_factory=frozenset, description="1-based original indices")
    mode: Literal["step-up", "step-down"]
    diagnostics: Dict[str, float] = Field(default_factory=dict)

    @model_validator(mode="after")
    def _check_count(self) -> "RejectionResult":
        if len(self.rejected) != self.R:
            raise ValueError(f"|rejected| = {len(self.rejected)} but R = {self.R}")
        return self
