# schemas/common.py
"""
Service-level schemas: health and the defaults a client falls back to
"""
from datetime import datetime
from typing import List

from pydantic import BaseModel, Field


class ProcedureDefaults(BaseModel):
    alpha: float
    lam: float
    C: float
    delta: float
    mc_replications: int
    mc_seed: int


class HealthResponse(BaseModel):
    status: str
    procedures: List[str]
    defaults: ProcedureDefaults
    timestamp: str = Field(default_factory=lambda: datetime.now().isoformat())
