# routers/simulation.py
"""
Monte-Carlo FDR / FWER / power estimates with their verdicts
"""
from fastapi import APIRouter, HTTPException, status
import logging

from ..schemas.analysis_schemas import SimulationRequest, SimulationResponse
from ..services.analysis_service import run_simulation

logger = logging.getLogger(__name__)

router = APIRouter()


@router.post(
    "/simulation",
    response_model=SimulationResponse,
    summary="Run a Monte-Carlo scenario",
    description="""
    Simulate the scenario for each procedure and compare fdr_hat + 3 se with the
    nominal level and with the procedure's reference bound.
    Standard errors are null when only one replication was run.
    """,
)
def simulate(request: SimulationRequest):
    try:
        scenario = request.scenario
        logger.info(
            f"Simulation request: {scenario.model} m={scenario.m} m0={scenario.m0} "
            f"reps={scenario.replications}, {len(request.procedures)} procedures"
        )
        return run_simulation(request)

    except ValueError as e:
        logger.error(f"Invalid simulation request: {str(e)}")
        raise HTTPException(status.HTTP_400_BAD_REQUEST, detail=str(e))
    except Exception as e:
        logger.error(f"Simulation failed: {str(e)}")
        raise HTTPException(status.HTTP_500_INTERNAL_SERVER_ERROR, detail=str(e))
