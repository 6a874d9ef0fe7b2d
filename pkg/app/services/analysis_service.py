# services/analysis_service.py
"""
Verb implementations shared by the CLI and the HTTP routers: analyze a
p-value vector, list the bounds of a procedure, and run Monte-Carlo checks.
"""
from typing import List, Optional
import logging

from ..schemas.analysis_schemas import (
    AnalysisResponse,
    BoundsRequest,
    BoundsResponse,
    ProcedureParams,
    SimulationRequest,
    SimulationResponse,
    SimulationRow,
)
from ..schemas.bound_schemas import BoundReport
from ..schemas.pvalue_schemas import PValueSet
from ..schemas.simulation_schemas import Scenario, SimulationSummary
from .errors import MultipleTestingError
from .procedure_service import get_procedure
from .simulation_service import run_mc
from .step_engine import run_step

logger = logging.getLogger(__name__)

N_SE = 3.0


def run_analysis(p: PValueSet, params: ProcedureParams, m0: Optional[int] = None) -> AnalysisResponse:
    """Apply one procedure and attach every bound known for it at (m, m0)"""
    procedure = get_procedure(params)
    schedule = procedure.schedule(p)
    result = run_step(p, schedule, params.mode)
    m0 = p.m if m0 is None else m0

    reports: List[BoundReport] = []
    try:
        reports = procedure.bounds_for(p.m, m0)
    except MultipleTestingError as e:
        logger.warning(f"No bounds for {params.procedure} at m={p.m}, m0={m0}: {e}")

    logger.info(f"{params.procedure} ({result.mode}) on m={p.m}: R={result.R}, threshold={result.threshold!r}")
    return AnalysisResponse(
        procedure=params.procedure,
        m=p.m,
        R=result.R,
        threshold=float(result.threshold),
        rejected=sorted(result.rejected),
        mode=result.mode,
        schedule_meta=schedule.meta.model_dump(mode="json"),
        bounds=reports,
    )


def run_bounds(request: BoundsRequest) -> BoundsResponse:
    m0 = request.m if request.m0 is None else request.m0
    procedure = get_procedure(request)
    if request.bound:
        reports = [procedure.bound(bound_id, request.m, m0) for bound_id in request.bound]
    else:
        reports = procedure.bounds_for(request.m, m0)
    return BoundsResponse(procedure=request.procedure, m=request.m, m0=m0, bounds=reports)


def _verdict(summary: SimulationSummary, level: float) -> str:
    within = summary.within(level, N_SE)
    if within is None:
        return "insufficient"
    return "PASS" if within else "FAIL"


def simulation_row(summary: SimulationSummary, nominal_level: float, bound: Optional[BoundReport]) -> SimulationRow:
    """Summary plus its verdicts: fdr_hat <= level + 3 se against the nominal level and the reference bound"""
    ok = summary.se_status == "ok"
    row = SimulationRow(
        scenario=summary.scenario,
        procedure=summary.procedure,
        fdr_hat=summary.fdr_hat,
        fdr_se=summary.fdr_se if ok else None,
        fwer_hat=summary.fwer_hat,
        fwer_se=summary.fwer_se if ok else None,
        power_hat=summary.power_hat,
        mean_R=summary.mean_R,
        replications=summary.replications,
        nominal_level=nominal_level,
        level_verdict=_verdict(summary, nominal_level),
    )
    if bound is not None:
        row.bound_source = bound.source
        row.bound_value = bound.value
        row.bound_verdict = _verdict(summary, bound.value) if bound.applicable else "N/A"
    return row


def run_simulation(request: SimulationRequest, workers: Optional[int] = None) -> SimulationResponse:
    scenario: Scenario = request.scenario
    rows: List[SimulationRow] = []
    for params in request.procedures:
        if scenario.lam is not None and params.is_adaptive and params.lam is None:
            params = params.model_copy(update={"lam": scenario.lam})
        procedure = get_procedure(params)
        summary = run_mc(scenario, procedure, name=params.procedure, workers=workers)
        try:
            bound = procedure.reference_bound(scenario)
        except MultipleTestingError as e:
            logger.warning(f"No reference bound for {params.procedure} under {scenario.model}: {e}")
            bound = None
        rows.append(simulation_row(summary, procedure.nominal_level(scenario.m), bound))
    return SimulationResponse(rows=rows)
