"""
Schemas for FDR bounds, crossover reports and first critical values
"""
from typing import Dict, Optional

from pydantic import BaseModel, Field


class BoundReport(BaseModel):
    """An FDR upper bound (or exact FDR) with its applicability verdict"""
    value: float = Field(..., ge=0.0)
    applicable: bool
    condition_detail: str = Field(default="", description="Human-readable applicability condition")
    margin: Optional[float] = Field(
        default=None,
        description="Signed slack of the applicability condition (positive means satisfied)",
    )
    source: str = Field(..., description="Identifier of the bound, e.g. 'by-dependence'")
    exact: bool = Field(default=False, description="value is the FDR itself, not an upper bound")
    sharper_value: Optional[float] = Field(default=None, ge=0.0)
    extras: Dict[str, float] = Field(default_factory=dict)


class CrossoverReport(BaseModel):
    """Largest j with SP(k) critical value >= BH(k) critical value"""
    m: int
    k: int
    alpha: float
    j0: int = Field(..., ge=1)
    approximation: Optional[float] = Field(
        default=None,
        description="k ** (1 / log log k); defined for k >= 3",
    )


class FirstCriticalValues(BaseModel):
    """alpha_{1:m} of Bonferroni, BY, BH(k) and SP(k) with their leading-order approximations"""
    m: int
    k: int
    alpha: float
    bonferroni: float
    by: float
    bh_k: float
    sp_k: float
    bonferroni_approx: float
    by_approx: Optional[float] = None
    bh_k_approx: Optional[float] = None
    sp_k_approx: Optional[float] = None
