import sys
from pathlib import Path
import pytest
from fastapi.testclient import TestClient

# Ensure project root is on sys.path for imports like `from app.main import app`
PROJECT_ROOT = Path(__file__).resolve().parents[1]
if str(PROJECT_ROOT) not in sys.path:
    sys.path.insert(0, str(PROJECT_ROOT))

from app.main import app
from app.schemas.pvalue_schemas import PValueSet

FIXTURES_DIR = Path(__file__).resolve().parent / "fixtures"


@pytest.fixture()
def client() -> TestClient:
    return TestClient(app)


@pytest.fixture()
def sweep_pvalues() -> PValueSet:
    """Three strong signals among 97 evenly spread p-values"""
    return PValueSet(values=[1e-6] * 3 + [(i - 0.5) / 97 for i in range(1, 98)])


@pytest.fixture()
def fixtures_dir() -> Path:
    return FIXTURES_DIR


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: full-size Monte-Carlo checks (deselect with -m 'not slow')")
