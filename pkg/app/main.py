from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware
from contextlib import asynccontextmanager
from .config import settings
from .routers.analysis import router as analysis_router
from .routers.sweep import router as sweep_router
from .routers.bounds import router as bounds_router
from .routers.simulation import router as simulation_router
from .schemas.analysis_schemas import PROCEDURE_IDS
from .schemas.common import HealthResponse, ProcedureDefaults
from .services.correction_service import harmonic_prefix
from datetime import datetime
import logging
import uvicorn

logger = logging.getLogger(__name__)

# H_1..H_n cached at startup; longer prefixes are extended on demand
HARMONIC_WARM_START = 100_000


@asynccontextmanager
async def lifespan(app: FastAPI):
    """Warm the harmonic-number cache before the first request"""
    harmonic_prefix(HARMONIC_WARM_START)
    logger.info(
        f"Starting with alpha={settings.DEFAULT_ALPHA}, lambda={settings.DEFAULT_LAMBDA}, "
        f"C={settings.DEFAULT_C}, delta={settings.DEFAULT_DELTA}, MC workers={settings.MC_WORKERS}"
    )
    yield


app = FastAPI(
    title="Dependence-Corrected Multiple Testing API",
    description="Step-up / step-down procedures with dependence correction factors, FDR bounds and Monte-Carlo checks",
    version="1.0.0",
    lifespan=lifespan
)

app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)

# Register routers
app.include_router(analysis_router, prefix="/api/v1", tags=["Analysis"])
app.include_router(sweep_router, prefix="/api/v1", tags=["Sweep"])
app.include_router(bounds_router, prefix="/api/v1", tags=["Bounds"])
app.include_router(simulation_router, prefix="/api/v1", tags=["Simulation"])


@app.get("/")
def root():
    return {
        "message": "Dependence-Corrected Multiple Testing API",
        "docs": "/docs",
        "timestamp": datetime.now().isoformat()
    }


@app.get("/health", response_model=HealthResponse)
def health():
    return HealthResponse(
        status="healthy",
        procedures=list(PROCEDURE_IDS),
        defaults=ProcedureDefaults(
            alpha=settings.DEFAULT_ALPHA,
            lam=settings.DEFAULT_LAMBDA,
            C=settings.DEFAULT_C,
            delta=settings.DEFAULT_DELTA,
            mc_replications=settings.MC_REPLICATIONS,
            mc_seed=settings.MC_SEED,
        ),
    )

if __name__ == "__main__":
    uvicorn.run("app.main:app", host="0.0.0.0", port=8000, reload=True)
