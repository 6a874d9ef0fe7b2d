# services/generator_service.py
"""
Registry of generating functions and the public evaluate / inverse operations
"""
from typing import Dict, Type
import logging

from ..generators.aorc_generator import AORCGenerator
from ..generators.base_generator import BaseGenerator
from ..generators.bh_generator import BHGenerator
from ..generators.blanchard_roquain_generator import BlanchardRoquainGenerator
from ..generators.combined_generator import CombinedGenerator, independence_preconditions
from ..schemas.schedule_schemas import GeneratorFamily, GeneratorSpec

logger = logging.getLogger(__name__)

GENERATOR_CLASSES: Dict[GeneratorFamily, Type[BaseGenerator]] = {
    GeneratorFamily.W1_BH: BHGenerator,
    GeneratorFamily.W2_AORC: AORCGenerator,
    GeneratorFamily.W3_BLANCHARD_ROQUAIN: BlanchardRoquainGenerator,
    GeneratorFamily.W4_COMBINED: CombinedGenerator,
}


def get_generator(spec: GeneratorSpec) -> BaseGenerator:
    """Instantiate the generator for a spec"""
    try:
        generator_cls = GENERATOR_CLASSES[spec.family]
    except KeyError:
        raise ValueError(f"Unknown generator family: {spec.family}")
    return generator_cls(spec)


def generator_eval(spec: GeneratorSpec, x: float) -> float:
    """g(x) for x in [0, 1]; DomainError outside"""
    return get_generator(spec).evaluate(x)


def generator_inverse(spec: GeneratorSpec, y: float) -> float:
    """sup{x in [0, 1] : g(x) <= y}; DomainError for y < 0"""
    return get_generator(spec).inverse(y)


def w4_precondition_margins(spec: GeneratorSpec, m: int) -> Dict[str, float]:
    return independence_preconditions(m, spec.alpha, spec.lam)


def w4_preconditions_hold(spec: GeneratorSpec, m: int) -> bool:
    margins = w4_precondition_margins(spec, m)
    return margins["lam_range"] > 0 and margins["m_vs_alpha"] >= 0 and margins["m_vs_lam"] >= 0
