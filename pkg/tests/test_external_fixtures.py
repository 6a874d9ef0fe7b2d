"""
Reference counts on two public p-value data sets. The files are not bundled
(see tests/fixtures/README.md); each test skips when its file is absent.
"""
import pytest

from app.schemas.schedule_schemas import GeneratorFamily, GeneratorSpec
from app.services.procedure_service import sweep_k
from app.services.pvalue_loader import load_pvalues
from app.services.schedule_service import deterministic_schedule
from app.services.step_engine import step_up

ALPHA = 0.05
BH = GeneratorSpec(family=GeneratorFamily.W1_BH, alpha=ALPHA)


def _load(fixtures_dir, name):
    path = fixtures_dir / name
    if not path.exists():
        pytest.skip(f"{path} not present")
    return load_pvalues(path)


def _bh_count(p):
    return step_up(p, deterministic_schedule(BH, p.m, p.m)).R


def test_gene_expression_bh_count(fixtures_dir):
    p = _load(fixtures_dir, "notterman_pvalues.csv")
    assert p.m == 7457
    assert _bh_count(p) == 1157


def test_lead_exposure_reference_rows(fixtures_dir):
    p = _load(fixtures_dir, "needleman_pvalues.csv")
    assert p.m == 35
    sweep = sweep_k(p, ALPHA, 1, 1)
    assert sweep.R_BY == 0
    assert sweep.R_Bonferroni == 2
    assert _bh_count(p) == 9
