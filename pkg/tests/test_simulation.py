import math

import numpy as np
import pytest
from scipy import stats
from scipy.special import ndtr

from app.schemas.analysis_schemas import ProcedureParams
from app.schemas.simulation_schemas import Scenario
from app.services.procedure_service import get_procedure
from app.services.simulation_service import (
    ground_truth,
    rng_stream,
    run_mc,
    sample_bi,
    sample_equicorrelated,
    sample_extreme,
)

ALPHA = 0.05
# two-sided comparisons against exact values
N_SE = 3.0
REPLICATIONS = 100_000


def _procedure(name, **kwargs):
    return get_procedure(ProcedureParams(procedure=name, alpha=ALPHA, **kwargs))


def test_streams_are_reproducible_and_distinct():
    a = rng_stream(11, 3).random(5)
    b = rng_stream(11, 3).random(5)
    c = rng_stream(11, 4).random(5)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_ground_truth_marks_first_m0_as_nulls():
    truth = ground_truth(Scenario(m=10, m0=7, replications=1))
    assert truth.null_indices == frozenset(range(1, 8))
    assert truth.m1 == 3
    assert truth.null_mask().sum() == 7


def test_scenario_rejects_too_many_nulls():
    with pytest.raises(ValueError):
        Scenario(m=10, m0=11)


def test_bi_sampler_shapes():
    scenario = Scenario(model="BI", m=50, m0=40, replications=1)
    p, truth = sample_bi(scenario, rng_stream(1, 0))
    assert p.m == 50
    assert truth.m0 == 40


def test_extreme_sampler_structure():
    scenario = Scenario(model="extreme_dependence", m=20, m0=15, replications=1)
    p, _ = sample_extreme(scenario, rng_stream(5, 0))
    values = p.as_array()
    assert len(set(values[:15])) == 1
    assert np.all(values[15:] == 0.0)


def test_sampler_checks_the_model():
    with pytest.raises(ValueError):
        sample_extreme(Scenario(model="BI", m=5, m0=5, replications=1), rng_stream(1, 0))


def test_equicorrelated_independent_nulls_are_uniform():
    scenario = Scenario(model="equicorrelated", m=100_000, m0=100_000, rho=0.0, effect=0.0, replications=1)
    p, _ = sample_equicorrelated(scenario, rng_stream(99, 0))
    assert stats.kstest(p.as_array(), "uniform").pvalue > 1e-6


def test_equicorrelated_strong_correlation_collapses_the_nulls():
    scenario = Scenario(model="equicorrelated", m=200, m0=200, rho=0.999999, replications=1)
    p, _ = sample_equicorrelated(scenario, rng_stream(3, 0))
    values = p.as_array()
    assert values.max() - values.min() < 0.05


def test_equicorrelated_alternatives_are_smaller():
    scenario = Scenario(model="equicorrelated", m=2000, m0=1000, rho=0.3, effect=3.0, replications=1)
    p, _ = sample_equicorrelated(scenario, rng_stream(4, 0))
    values = p.as_array()
    assert values[1000:].mean() < values[:1000].mean()


def test_normal_upper_tail_accuracy():
    # reference values of 1 - Phi(z)
    table = {
        0.0: 0.5,
        1.0: 0.15865525393145705,
        1.96: 0.024997895148220435,
        3.0: 0.0013498980316300946,
        5.0: 2.866515718791939e-07,
        8.0: 6.220960574271785e-16,
        -2.0: 0.9772498680518208,
    }
    for z, expected in table.items():
        assert float(ndtr(-z)) == pytest.approx(expected, rel=1e-12, abs=1e-12)


@pytest.mark.slow
def test_bh_under_independence_matches_closed_form():
    scenario = Scenario(model="BI", m=100, m0=80, effect=0.1, replications=REPLICATIONS, seed=2019)
    summary = run_mc(scenario, _procedure("bh"), "bh")
    assert summary.se_status == "ok"
    assert summary.fdr_se < 0.001
    assert abs(summary.fdr_hat - 0.04) <= N_SE * summary.fdr_se
    assert summary.power_hat > 0


@pytest.mark.slow
def test_storey_adaptive_violates_the_level_under_extreme_dependence():
    scenario = Scenario(model="extreme_dependence", m=100, m0=90, replications=REPLICATIONS, seed=7)
    procedure = _procedure("adaptive-bh", lam=0.5, clamp="natural")
    summary = run_mc(scenario, procedure, "adaptive-bh")
    assert abs(summary.fdr_hat - 0.45) <= N_SE * summary.fdr_se
    assert not summary.within(ALPHA)


@pytest.mark.slow
def test_sparsity_clamp_repairs_the_violation():
    scenario = Scenario(model="extreme_dependence", m=100, m0=90, replications=REPLICATIONS, seed=7)
    procedure = _procedure("adaptive-bh", lam=0.5, C=0.9, delta=1.0)
    summary = run_mc(scenario, procedure, "adaptive-bh")
    assert abs(summary.fdr_hat - 0.05) <= N_SE * summary.fdr_se
    assert summary.within(ALPHA / 0.9)


@pytest.mark.parametrize("k", [1, 5, 20, 100])
def test_truncated_bh_controls_fdr_under_extreme_dependence(k):
    scenario = Scenario(model="extreme_dependence", m=100, m0=90, replications=2000, seed=k)
    summary = run_mc(scenario, _procedure("bh-k", k=k), f"bh-{k}")
    assert summary.within(ALPHA)


@pytest.mark.parametrize("k", [5, 20, 100])
def test_sparsity_test_controls_fdr_under_extreme_dependence(k):
    scenario = Scenario(model="extreme_dependence", m=100, m0=90, replications=2000, seed=100 + k)
    summary = run_mc(scenario, _procedure("sp-k", k=k), f"sp-{k}")
    assert summary.within(0.9 * ALPHA)


@pytest.mark.parametrize("model", ["BI", "extreme_dependence", "equicorrelated"])
def test_bonferroni_controls_the_familywise_error(model):
    scenario = Scenario(model=model, m=50, m0=40, rho=0.5, replications=2000, seed=31)
    summary = run_mc(scenario, _procedure("bonferroni"), "bonferroni")
    assert summary.fwer_hat <= ALPHA + 3 * summary.fwer_se


def test_results_do_not_depend_on_worker_count():
    scenario = Scenario(model="BI", m=40, m0=30, replications=300, seed=5)
    procedure = _procedure("bh")
    single = run_mc(scenario, procedure, "bh", workers=1, chunk_size=50)
    threaded = run_mc(scenario, procedure, "bh", workers=4, chunk_size=50)
    assert single == threaded


def test_single_replication_has_no_standard_error():
    scenario = Scenario(model="BI", m=10, m0=10, replications=1)
    summary = run_mc(scenario, _procedure("bh"), "bh")
    assert summary.se_status == "insufficient"
    assert math.isnan(summary.fdr_se)
    assert summary.within(ALPHA) is None


def test_no_false_hypotheses_gives_zero_power():
    scenario = Scenario(model="BI", m=10, m0=10, replications=50)
    assert run_mc(scenario, _procedure("bh"), "bh").power_hat == 0.0
