import pytest

from app.schemas.pvalue_schemas import PValueSet
from app.schemas.schedule_schemas import EstimatorConfig
from app.services.errors import ConfigurationError, DomainError
from app.services.estimator_service import (
    clamp_estimate,
    estimate_m0,
    is_clamped,
    sarkar_heller_lambda,
    storey_estimate,
    storey_range,
    storey_restricted,
)


def test_storey_counts_pvalues_above_lambda():
    p = PValueSet(values=[0.01, 0.2, 0.6, 0.7, 0.9])
    assert storey_estimate(p, 0.5) == pytest.approx((3 + 1) / 0.5)


def test_storey_can_exceed_m():
    p = PValueSet(values=[0.9, 0.95, 0.99])
    assert storey_estimate(p, 0.5) == pytest.approx(8.0)


def test_storey_depends_only_on_the_upper_tail():
    low = PValueSet(values=[0.0, 0.0, 0.7, 0.8])
    other = PValueSet(values=[0.3, 0.49, 0.7, 0.8])
    value, upper_tail_only = storey_restricted(low, 0.5)
    assert upper_tail_only
    assert value == storey_restricted(other, 0.5)[0]


def test_storey_lambda_domain():
    p = PValueSet(values=[0.5])
    with pytest.raises(DomainError):
        storey_estimate(p, 1.0)
    with pytest.raises(DomainError):
        storey_estimate(p, 0.0)


def test_clamp_estimate():
    assert clamp_estimate(3.0, 10, 0.5, 1.0) == 5.0
    assert clamp_estimate(30.0, 10, 0.5, 1.0) == 10.0
    assert clamp_estimate(12.0, 10, 0.5, 0.5) == 12.0
    with pytest.raises(ConfigurationError):
        clamp_estimate(3.0, 10, 1.5, 1.0)
    with pytest.raises(ConfigurationError):
        clamp_estimate(3.0, 10, 0.5, 0.0)


def test_is_clamped_tolerates_rounding():
    assert is_clamped(5.0 * (1 - 1e-15), 10, 0.5, 1.0)
    assert not is_clamped(4.9, 10, 0.5, 1.0)
    assert not is_clamped(10.1, 10, 0.5, 1.0)


def test_storey_range_covers_every_storey_value():
    m, lam = 100, 0.5
    C, delta = storey_range(m, lam)
    assert C * m == pytest.approx(1 / (1 - lam))
    assert m / delta == pytest.approx((m + 1) / (1 - lam))
    for above in (0, 50, 100):
        assert is_clamped((above + 1) / (1 - lam), m, C, delta)


def test_storey_range_small_m_caps_C_at_one():
    C, delta = storey_range(1, 0.5)
    assert C == 1.0
    assert delta == pytest.approx(0.25)


def test_sarkar_heller_lambda():
    assert sarkar_heller_lambda(0.05) == pytest.approx(0.05 / 1.05)
    with pytest.raises(DomainError):
        sarkar_heller_lambda(1.0)


def test_estimate_m0_clamps_and_reports_raw_value():
    p = PValueSet(values=[0.0] * 9 + [0.9])
    estimate = estimate_m0(p, EstimatorConfig(kind="storey", lam=0.5, C=0.5, delta=1.0))
    assert estimate.raw_value == pytest.approx(4.0)
    assert estimate.value == 5.0
    assert estimate.upper_tail_only


def test_estimate_m0_fixed_value():
    p = PValueSet(values=[0.1] * 10)
    estimate = estimate_m0(p, EstimatorConfig(kind="fixed", fixed_m0=7.0, C=0.5))
    assert estimate.value == 7.0
    assert estimate.lam is None


def test_fixed_estimator_needs_a_value():
    with pytest.raises(ValueError):
        EstimatorConfig(kind="fixed")
