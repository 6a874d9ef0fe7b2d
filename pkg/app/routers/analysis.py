# routers/analysis.py
"""
Apply a multiple-testing procedure to a posted p-value vector
"""
from fastapi import APIRouter, HTTPException, status
import logging

from ..schemas.analysis_schemas import AnalysisRequest, AnalysisResponse
from ..schemas.pvalue_schemas import PValueSet
from ..services.analysis_service import run_analysis

logger = logging.getLogger(__name__)

router = APIRouter()


@router.post(
    "/analysis",
    response_model=AnalysisResponse,
    summary="Run a step-up / step-down procedure",
    description="Rejected hypotheses (1-based indices), threshold, schedule metadata and every known FDR bound",
)
def analyze(request: AnalysisRequest):
    try:
        logger.info(f"Analysis request: {request.procedure} on m={len(request.pvalues)}")
        return run_analysis(PValueSet(values=request.pvalues), request, request.m0)

    except ValueError as e:
        logger.error(f"Invalid analysis request: {str(e)}")
        raise HTTPException(status.HTTP_400_BAD_REQUEST, detail=str(e))
    except Exception as e:
        logger.error(f"Analysis failed: {str(e)}")
        raise HTTPException(status.HTTP_500_INTERNAL_SERVER_ERROR, detail=str(e))
