# config.py
import os
from dotenv import load_dotenv

# Load environment variables from .env
load_dotenv()


def _env_bool(name: str, default: str = "false") -> bool:
    return os.getenv(name, default).strip().lower() in ("1", "true", "yes", "on")


class Settings:
    # Procedure defaults (exploratory use; CLI flags and request fields override)
    DEFAULT_ALPHA = float(os.getenv("DEPCORR_ALPHA", "0.05"))
    DEFAULT_LAMBDA = float(os.getenv("DEPCORR_LAMBDA", "0.5"))
    DEFAULT_C = float(os.getenv("DEPCORR_C", "0.5"))
    DEFAULT_DELTA = float(os.getenv("DEPCORR_DELTA", "1.0"))

    # Monte-Carlo harness
    MC_REPLICATIONS = int(os.getenv("MC_REPLICATIONS", "10000"))
    MC_SEED = int(os.getenv("MC_SEED", "20190417"))
    MC_WORKERS = int(os.getenv("MC_WORKERS", "1"))  # Threads; results do not depend on it
    MC_CHUNK_SIZE = int(os.getenv("MC_CHUNK_SIZE", "2000"))

    # Numerics
    HARMONIC_DIRECT_LIMIT = int(os.getenv("HARMONIC_DIRECT_LIMIT", "10000000"))
    DEBUG_CHECKS = _env_bool("DEBUG_CHECKS")
    QUAD_TOLERANCE = 1e-10
    INVERSE_TOLERANCE = 1e-12

    # Output
    OUTPUT_DIR = os.getenv("OUTPUT_DIR", "results")
    LOG_LEVEL = os.getenv("LOG_LEVEL", "INFO")

# Create global settings instance
settings = Settings()
