# services/estimator_service.py
"""
Null-count estimators and the sparsity clamp m0_hat in [C m, m / delta]
"""
from typing import Tuple
import logging

import numpy as np

from ..schemas.pvalue_schemas import PValueSet
from ..schemas.schedule_schemas import EstimatorConfig, M0Estimate
from .errors import ConfigurationError, DomainError

logger = logging.getLogger(__name__)


def _check_lambda(lam: float) -> None:
    if not 0.0 < lam < 1.0:
        raise DomainError(f"lambda={lam!r} must lie in (0, 1)")


def storey_estimate(p: PValueSet, lam: float) -> float:
    """m (1 - F_m(lam) + 1/m) / (1 - lam); may exceed m"""
    _check_lambda(lam)
    above = int(np.count_nonzero(p.as_array() > lam))
    return (above + 1) / (1.0 - lam)


def storey_restricted(p: PValueSet, lam: float) -> Tuple[float, bool]:
    """
    Storey estimate together with the flag that it only reads the p-values
    above lam (the count above lam determines it), which is what the
    independence bound for adaptive procedures requires.
    """
    return storey_estimate(p, lam), True


def clamp_estimate(m0_tilde: float, m: int, C: float, delta: float) -> float:
    """max(C m, min(m / delta, m0_tilde))"""
    check_clamp(m, C, delta)
    return max(C * m, min(m / delta, m0_tilde))


def check_clamp(m: int, C: float, delta: float) -> None:
    if not 0.0 < C <= 1.0:
        raise ConfigurationError(f"C={C!r} must lie in (0, 1]")
    if not 0.0 < delta <= 1.0:
        raise ConfigurationError(f"delta={delta!r} must lie in (0, 1]")
    if C * m > m / delta:
        raise ConfigurationError(f"empty clamp interval [{C * m!r}, {m / delta!r}]")


def is_clamped(m0_hat: float, m: int, C: float, delta: float, rtol: float = 1e-12) -> bool:
    """Membership in [C m, m / delta] up to a relative rounding slack"""
    return C * m * (1.0 - rtol) <= m0_hat <= m / delta * (1.0 + rtol)


def storey_range(m: int, lam: float) -> Tuple[float, float]:
    """
    (C, delta) whose clamp interval is exactly the range [1/(1-lam), (m+1)/(1-lam)]
    of the Storey estimator, so the plain estimate passes the clamp untouched.
    C is capped at 1 when m < 1/(1-lam); the clamp then still contains every
    attainable estimate.
    """
    _check_lambda(lam)
    C = min(1.0, 1.0 / ((1.0 - lam) * m))
    delta = min(1.0, (1.0 - lam) * m / (m + 1))
    return C, delta


def sarkar_heller_lambda(alpha: float) -> float:
    """Small tuning parameter alpha/(1+alpha) for Storey's estimator under dependence"""
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha={alpha!r} must lie in (0, 1)")
    return alpha / (1.0 + alpha)


def estimate_m0(p: PValueSet, config: EstimatorConfig) -> M0Estimate:
    """Run the configured estimator and clamp it to [C m, m / delta]"""
    m = p.m
    if config.kind == "storey":
        raw, upper_tail_only = storey_restricted(p, config.lam)
        lam = config.lam
    elif config.kind == "fixed":
        raw, upper_tail_only, lam = float(config.fixed_m0), True, None
    else:
        raise ValueError(f"Unknown estimator kind: {config.kind}")

    value = clamp_estimate(raw, m, config.C, config.delta)
    if value != raw:
        logger.info(f"m0 estimate {raw!r} clamped to {value!r} (C={config.C}, delta={config.delta})")
    return M0Estimate(
        value=value,
        raw_value=raw,
        kind=config.kind,
        lam=lam,
        C=config.C,
        delta=config.delta,
        upper_tail_only=upper_tail_only,
    )
