import pytest

from app.config import settings
from app.schemas.analysis_schemas import ProcedureParams
from app.schemas.pvalue_schemas import PValueSet
from app.schemas.simulation_schemas import Scenario
from app.services.correction_service import harmonic
from app.services.errors import DomainError, UnknownBoundError
from app.services.procedure_service import get_procedure, sweep_k
from app.services.schedule_service import truncated_bh_schedule

ALPHA = 0.05
FOUR = PValueSet(values=[0.001, 0.01, 0.04, 0.9])


def _procedure(name, **kwargs):
    return get_procedure(ProcedureParams(procedure=name, alpha=ALPHA, **kwargs))


def _sources(reports):
    return [r.source for r in reports]


def test_unknown_procedure_is_rejected():
    with pytest.raises(ValueError):
        ProcedureParams(procedure="holm")
    with pytest.raises(ValueError):
        ProcedureParams(procedure="adaptive-by")


def test_parameter_defaults():
    bh = _procedure("bh")
    assert bh.lam() == 1.0
    assert bh.k(10) == 10
    assert bh.kappa(10) == 9
    assert bh.clamp(10) == (1.0, 1.0)
    assert _procedure("w4").lam() == settings.DEFAULT_LAMBDA
    assert _procedure("adaptive-bh").clamp(10) == (settings.DEFAULT_C, settings.DEFAULT_DELTA)
    with pytest.raises(DomainError):
        _procedure("bh-k", k=11).k(10)


def test_bh_on_four_pvalues():
    result = _procedure("bh")(FOUR)
    assert result.R == 2
    assert result.rejected == frozenset({1, 2})


def test_step_down_never_rejects_more():
    p = PValueSet(values=[0.001, 0.03, 0.02, 0.04, 0.2, 0.5])
    assert _procedure("bh", mode="sd")(p).R <= _procedure("bh")(p).R


def test_fixed_schedules_are_cached_per_m():
    procedure = _procedure("bh-k", k=3)
    assert procedure.schedule(FOUR) is procedure.schedule(PValueSet(values=[0.5] * 4))
    assert procedure.schedule(FOUR).values == truncated_bh_schedule(4, 3, ALPHA).values


def test_adaptive_schedule_follows_the_data():
    procedure = _procedure("adaptive-bh", lam=0.5, C=0.5, delta=1.0)
    assert procedure.data_dependent
    low = procedure.schedule(PValueSet(values=[0.01] * 10))
    high = procedure.schedule(PValueSet(values=[0.9] * 10))
    assert low.meta.m0_hat == 5.0
    assert low.values[0] > high.values[0]


def test_dependence_correction_shrinks_the_schedule():
    plain = _procedure("bh", k=20).schedule(PValueSet(values=[0.5] * 100))
    corrected = _procedure("bh", k=20, correction="dependence").schedule(PValueSet(values=[0.5] * 100))
    assert corrected.values == pytest.approx([v / harmonic(20) for v in plain.values])
    assert corrected.meta.corrections


def test_nominal_level():
    assert _procedure("bh").nominal_level(100) == ALPHA
    assert _procedure("adaptive-bh", C=0.5, delta=1.0).nominal_level(100) == pytest.approx(ALPHA / 0.5)
    assert _procedure("adaptive-bh", clamp="natural").nominal_level(100) == ALPHA
    assert _procedure("adaptive-bh", C=0.5, delta=1.0, correction="dependence").nominal_level(100) == ALPHA


def test_bounds_for_bh():
    reports = _procedure("bh").bounds_for(100, 80)
    assert _sources(reports) == ["bh-bi", "by-dependence", "ck-bi", "det-dependence"]
    assert reports[0].value == pytest.approx(0.04)


def test_bounds_for_truncated_and_sparsity_tests():
    assert _sources(_procedure("bh-k", k=5).bounds_for(100, 80)) == ["bhk-bi", "bhk-dependence", "marginal"]
    assert _sources(_procedure("sp-k", k=5).bounds_for(100, 80)) == ["sp-bi", "sp-dependence"]
    assert _sources(_procedure("es-k", k=5).bounds_for(100, 80)) == ["es-bi", "es-dependence"]


def test_bounds_for_w4_starts_with_its_own_bound():
    assert _sources(_procedure("w4").bounds_for(100, 80))[0] == "w4-bi"


def test_bounds_for_adaptive_bh():
    sources = _sources(_procedure("adaptive-bh", C=0.5, delta=1.0).bounds_for(100, 80))
    assert sources == ["ck-bi", "adaptive-dependence", "extreme-sparsity"]
    natural = _sources(_procedure("adaptive-bh", clamp="natural").bounds_for(100, 80))
    assert natural[-1] == "extreme-storey"


def test_reference_bounds():
    bi = Scenario(model="BI", m=100, m0=80, replications=1)
    extreme = Scenario(model="extreme_dependence", m=100, m0=90, replications=1)
    assert _procedure("bonferroni").reference_bound(bi).value == pytest.approx(0.04)
    assert _procedure("bh").reference_bound(bi).source == "ck-bi"
    assert _procedure("bh").reference_bound(extreme).source == "det-dependence"
    assert _procedure("adaptive-bh", clamp="natural", lam=0.5).reference_bound(extreme).value == pytest.approx(0.45)
    assert _procedure("bh", correction="dependence").reference_bound(extreme).source == "corrected-dependence"
    assert _procedure("es-k", k=5).reference_bound(extreme).source == "marginal"


def test_independence_corrected_reference_bound():
    bi = Scenario(model="BI", m=100, m0=80, replications=1)
    extreme = Scenario(model="extreme_dependence", m=100, m0=90, replications=1)
    procedure = _procedure("bh", correction="bi")
    report = procedure.reference_bound(bi)
    assert report.source == "corrected-bi"
    assert report.value == pytest.approx(0.04)
    # the independence correction carries no guarantee under dependence
    assert procedure.reference_bound(extreme).source.endswith("/scaled")


def test_truncation_follows_the_procedure():
    det = _procedure("bh", k=20).truncation(100)
    assert (det.k, det.m0_mode, det.C, det.delta) == (20, "deterministic", 1.0, 1.0)
    adaptive = _procedure("adaptive-bh", k=20, C=0.5, delta=0.8).truncation(100)
    assert (adaptive.k, adaptive.m0_mode, adaptive.C, adaptive.delta) == (20, "adaptive", 0.5, 0.8)


def test_bound_by_identifier():
    bh = _procedure("bh", k=20)
    report = bh.bound("det-dependence", 100, 90)
    assert report.source == "det-dependence"
    assert report.value == pytest.approx(0.9 * ALPHA * harmonic(20))
    assert bh.bound("bhk-dependence", 100, 90).value == pytest.approx(0.9 * ALPHA)
    assert _procedure("sp-k", k=5).bound("sp-dependence", 100, 80).value == pytest.approx(0.04)
    storey = _procedure("adaptive-bh", lam=0.5, clamp="natural")
    assert storey.bound("extreme-storey", 100, 90).value == pytest.approx(0.45)
    marginal = _procedure("bh-k", k=5).bound("marginal", 100, 90)
    expected = next(r for r in _procedure("bh-k", k=5).bounds_for(100, 90) if r.source == "marginal")
    assert marginal.value == pytest.approx(expected.value)


def test_unknown_bound_identifier():
    with pytest.raises(UnknownBoundError):
        _procedure("bh").bound("holm-bi", 100, 90)


def test_sweep_on_clear_signal(sweep_pvalues):
    sweep = sweep_k(sweep_pvalues, ALPHA)
    assert len(sweep.rows) == 100
    assert all(row.R_BHk == 3 for row in sweep.rows)
    assert all(row.R_ESk == 3 for row in sweep.rows[:-1])
    assert sweep.rows[-1].R_ESk is None
    assert sweep.R_BY == 3
    assert sweep.R_Bonferroni == 3


def test_sweep_endpoints_match_bonferroni_and_by():
    p = PValueSet(values=[0.0001, 0.0004, 0.002, 0.004, 0.011, 0.02, 0.3, 0.6])
    sweep = sweep_k(p, ALPHA)
    assert sweep.rows[0].R_BHk == sweep.R_Bonferroni
    assert sweep.rows[-1].R_BHk == sweep.R_BY


def test_sweep_range_is_checked(sweep_pvalues):
    assert [row.k for row in sweep_k(sweep_pvalues, ALPHA, 5, 7).rows] == [5, 6, 7]
    with pytest.raises(DomainError):
        sweep_k(sweep_pvalues, ALPHA, 8, 7)
    with pytest.raises(DomainError):
        sweep_k(sweep_pvalues, ALPHA, 1, 101)
