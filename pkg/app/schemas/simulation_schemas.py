"""
Schemas for Monte-Carlo scenarios and their summaries
"""
import math
from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..config import settings

DEFAULT_EFFECTS = {
    "BI": 0.1,  # Beta(a, 1) shape of the false p-values
    "extreme_dependence": 0.0,  # unused: false p-values are 0
    "equicorrelated": 3.0,  # mean shift of the false z-statistics
}


class Scenario(BaseModel):
    """A dependence model with its sizes, signal strength and replication plan"""
    model_config = ConfigDict(frozen=True)

    model: Literal["BI", "extreme_dependence", "equicorrelated"] = "BI"
    m: int = Field(..., ge=1)
    m0: int = Field(..., ge=0)
    effect: Optional[float] = Field(
        default=None,
        description="Beta shape a < 1 (BI) or mean shift mu (equicorrelated); model default when omitted",
    )
    rho: float = Field(default=0.0, ge=0.0, lt=1.0, description="Common correlation (equicorrelated only)")
    lam: Optional[float] = Field(
        default=None, gt=0.0, lt=1.0,
        description="Storey tuning parameter for adaptive procedures that leave lam unset",
    )
    replications: int = Field(default_factory=lambda: settings.MC_REPLICATIONS, ge=1)
    seed: int = Field(default_factory=lambda: settings.MC_SEED, ge=0, lt=2 ** 64)

    @model_validator(mode="after")
    def _check_sizes(self) -> "Scenario":
        if self.m0 > self.m:
            raise ValueError(f"m0={self.m0} exceeds m={self.m}")
        if self.model == "BI" and self.effect is not None and not 0 < self.effect:
            raise ValueError("BI alternatives need a Beta shape a > 0")
        return self

    @property
    def m1(self) -> int:
        return self.m - self.m0

    @property
    def alternative_effect(self) -> float:
        return DEFAULT_EFFECTS[self.model] if self.effect is None else self.effect


class SimulationSummary(BaseModel):
    """Monte-Carlo estimates; standard errors are NaN with se_status 'insufficient' for one replication"""
    scenario: str
    procedure: str
    fdr_hat: float = Field(..., ge=0.0, le=1.0)
    fdr_se: float
    fwer_hat: float = Field(..., ge=0.0, le=1.0)
    fwer_se: float
    power_hat: float = Field(..., ge=0.0, le=1.0)
    mean_R: float = Field(..., ge=0.0)
    replications: int = Field(..., ge=1)
    se_status: Literal["ok", "insufficient"] = "ok"

    def within(self, level: float, n_se: float = 3.0) -> Optional[bool]:
        """fdr_hat <= level + n_se * se; None when the standard error is undefined"""
        if math.isnan(self.fdr_se):
            return None
        return self.fdr_hat <= level + n_se * self.fdr_se
