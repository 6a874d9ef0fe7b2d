import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from app.schemas.schedule_schemas import GeneratorFamily, GeneratorSpec
from app.services.errors import DomainError
from app.services.generator_service import (
    generator_eval,
    generator_inverse,
    get_generator,
    w4_precondition_margins,
    w4_preconditions_hold,
)

ALPHA = 0.05


def _spec(family, lam=1.0, m=None, scale=1.0):
    return GeneratorSpec(family=family, alpha=ALPHA, lam=lam, m=m, scale=scale)


ALL_SPECS = [
    _spec(GeneratorFamily.W1_BH),
    _spec(GeneratorFamily.W2_AORC),
    _spec(GeneratorFamily.W3_BLANCHARD_ROQUAIN, lam=0.5, m=100),
    _spec(GeneratorFamily.W4_COMBINED, lam=0.5),
]


def test_linear_generator():
    spec = _spec(GeneratorFamily.W1_BH)
    assert generator_eval(spec, 0.0) == 0.0
    assert generator_eval(spec, 0.5) == pytest.approx(0.025)
    assert generator_eval(spec, 1.0) == pytest.approx(ALPHA)


def test_aorc_reaches_one_at_one():
    spec = _spec(GeneratorFamily.W2_AORC)
    assert generator_eval(spec, 1.0) == pytest.approx(1.0)
    assert generator_eval(spec, 0.5) == pytest.approx(0.025 / 0.525)


def test_capped_families_stay_below_lambda():
    for spec in ALL_SPECS[2:]:
        values = [generator_eval(spec, x) for x in np.linspace(0, 1, 101)]
        assert max(values) <= spec.lam


def test_blanchard_roquain_needs_m():
    with pytest.raises(ValueError):
        GeneratorSpec(family=GeneratorFamily.W3_BLANCHARD_ROQUAIN, alpha=ALPHA, lam=0.5)


def test_argument_outside_unit_interval():
    with pytest.raises(DomainError):
        generator_eval(ALL_SPECS[0], 1.5)
    with pytest.raises(DomainError):
        generator_eval(ALL_SPECS[0], -0.1)
    with pytest.raises(DomainError):
        generator_inverse(ALL_SPECS[0], -0.01)


def test_extension_past_the_pole():
    aorc = get_generator(_spec(GeneratorFamily.W2_AORC))
    assert np.isinf(aorc.extended(1.0 / (1.0 - ALPHA) + 0.01))
    capped = get_generator(_spec(GeneratorFamily.W4_COMBINED, lam=0.5))
    assert float(capped.extended(2.0)) == 0.5
    linear = get_generator(_spec(GeneratorFamily.W1_BH))
    assert float(linear.extended(2.0)) == pytest.approx(2 * ALPHA)


def test_inverse_of_capped_generator_at_the_cap():
    spec = _spec(GeneratorFamily.W4_COMBINED, lam=0.5)
    assert generator_inverse(spec, 0.5) == 1.0
    assert generator_inverse(spec, 0.9) == 1.0


def test_bisection_agrees_with_closed_inverse():
    for spec in ALL_SPECS:
        generator = get_generator(spec)
        for y in (1e-4, 0.01, 0.03):
            assert generator.bisect_inverse(y) == pytest.approx(generator.inverse(y), abs=1e-10)


def test_scale_multiplies_the_generator():
    base = _spec(GeneratorFamily.W2_AORC)
    scaled = _spec(GeneratorFamily.W2_AORC, scale=0.5)
    assert generator_eval(scaled, 0.3) == pytest.approx(0.5 * generator_eval(base, 0.3))


@pytest.mark.parametrize("spec", ALL_SPECS, ids=lambda s: s.family.value)
@given(x=st.floats(min_value=0.0, max_value=1.0), dx=st.floats(min_value=0.0, max_value=1.0))
@settings(max_examples=200, deadline=None)
def test_generators_are_non_decreasing(spec, x, dx):
    y = min(1.0, x + dx)
    assert generator_eval(spec, x) <= generator_eval(spec, y) + 1e-15


@pytest.mark.parametrize("spec", ALL_SPECS, ids=lambda s: s.family.value)
@given(x=st.floats(min_value=1e-6, max_value=1.0))
@settings(max_examples=200, deadline=None)
def test_inverse_is_right_inverse(spec, x):
    y = generator_eval(spec, x)
    assert generator_eval(spec, generator_inverse(spec, y)) == pytest.approx(y, rel=1e-9, abs=1e-12)


def test_w4_preconditions():
    spec = _spec(GeneratorFamily.W4_COMBINED, lam=0.5)
    assert not w4_preconditions_hold(spec, 10)
    assert w4_preconditions_hold(spec, 100)
    margins = w4_precondition_margins(spec, 10)
    assert margins["m_vs_alpha"] == pytest.approx(10 - 0.95 / (0.05 - 0.05 ** 2 / 4))
    assert margins["m_vs_lam"] == pytest.approx(10 - 0.25 / 0.05)
