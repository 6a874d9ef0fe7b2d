# routers/bounds.py
"""
FDR bounds of a procedure for given m and m0
"""
from fastapi import APIRouter, HTTPException, status
import logging

from ..schemas.analysis_schemas import BoundsRequest, BoundsResponse
from ..services.analysis_service import run_bounds

logger = logging.getLogger(__name__)

router = APIRouter()


@router.post(
    "/bounds",
    response_model=BoundsResponse,
    summary="FDR upper bounds",
    description="One report per bound under independence and under arbitrary dependence, with applicability margins",
)
def bounds(request: BoundsRequest):
    try:
        return run_bounds(request)

    except ValueError as e:
        logger.error(f"Invalid bounds request: {str(e)}")
        raise HTTPException(status.HTTP_400_BAD_REQUEST, detail=str(e))
    except Exception as e:
        logger.error(f"Bound evaluation failed: {str(e)}")
        raise HTTPException(status.HTTP_500_INTERNAL_SERVER_ERROR, detail=str(e))
