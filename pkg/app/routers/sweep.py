# routers/sweep.py
"""
Number of rejections of BH(k) and ES(k) as k varies
"""
from fastapi import APIRouter, HTTPException, status
import logging

from ..schemas.analysis_schemas import SweepRequest, SweepResult
from ..schemas.pvalue_schemas import PValueSet
from ..services.procedure_service import sweep_k

logger = logging.getLogger(__name__)

router = APIRouter()


@router.post(
    "/sweep",
    response_model=SweepResult,
    summary="Sweep the truncation level k",
    description="R of BH(k) and corrected ES(k) for each k, with the BY and Bonferroni reference counts",
)
def sweep(request: SweepRequest):
    try:
        return sweep_k(PValueSet(values=request.pvalues), request.alpha, request.k_min, request.k_max)

    except ValueError as e:
        logger.error(f"Invalid sweep request: {str(e)}")
        raise HTTPException(status.HTTP_400_BAD_REQUEST, detail=str(e))
    except Exception as e:
        logger.error(f"Sweep failed: {str(e)}")
        raise HTTPException(status.HTTP_500_INTERNAL_SERVER_ERROR, detail=str(e))
