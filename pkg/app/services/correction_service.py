# services/correction_service.py
"""
Harmonic sums, the procedure correction C_k, the dependence correction D_k
and the corrected schedules alpha_hat / (C_k D_k).
"""
import math
import threading
from typing import Literal, Optional
import logging

import numpy as np

from ..config import settings
from ..schemas.schedule_schemas import (
    CorrectionFactors,
    CriticalSchedule,
    GeneratorFamily,
    GeneratorSpec,
    TruncationConfig,
)
from .errors import ConfigurationError, DomainError, InternalConsistencyError, ScheduleConstructionError
from .generator_service import get_generator

logger = logging.getLogger(__name__)

Regime = Literal["BI", "dependence"]
M0Mode = Literal["deterministic", "adaptive"]

EULER_GAMMA = 0.57721566490153286060651209008240243

# H_1, ..., H_n as a running ascending sum; grown on demand, never rewritten
_harmonic_lock = threading.Lock()
_harmonic_prefix = np.array([1.0])
_harmonic_prefix.setflags(write=False)


def harmonic_prefix(n: int) -> np.ndarray:
    """
    Read-only array (H_1, ..., H_n).

    Each H_k is the left-to-right double-precision sum 1 + 1/2 + ... + 1/k;
    np.cumsum accumulates sequentially, so extending the cache never changes
    earlier entries.
    """
    global _harmonic_prefix
    if n < 1:
        raise DomainError(f"harmonic prefix length must be >= 1, got {n}")
    prefix = _harmonic_prefix
    if len(prefix) >= n:
        return prefix[:n]

    with _harmonic_lock:
        prefix = _harmonic_prefix
        if len(prefix) < n:
            target = max(n, min(2 * len(prefix), settings.HARMONIC_DIRECT_LIMIT))
            terms = 1.0 / np.arange(len(prefix) + 1, target + 1, dtype=float)
            tail = np.cumsum(np.concatenate(([prefix[-1]], terms)))[1:]
            grown = np.concatenate((prefix, tail))
            grown.setflags(write=False)
            _harmonic_prefix = grown
            prefix = grown
            logger.debug(f"Harmonic prefix cache grown to {len(grown)} terms")
    return prefix[:n]


def harmonic(k: int) -> float:
    """H_k = sum_{i<=k} 1/i; direct summation up to HARMONIC_DIRECT_LIMIT, Euler-Maclaurin above"""
    if k < 1:
        raise DomainError(f"harmonic number needs k >= 1, got {k}")
    if k <= settings.HARMONIC_DIRECT_LIMIT:
        return float(harmonic_prefix(k)[k - 1])
    kf = float(k)
    return math.log(kf) + EULER_GAMMA + 1.0 / (2.0 * kf) - 1.0 / (12.0 * kf ** 2) + 1.0 / (120.0 * kf ** 4)


def _check_truncation(k: int, m: int) -> None:
    if m < 1 or not 1 <= k <= m:
        raise DomainError(f"truncation level k={k} must lie in 1..m (m={m})")


def procedure_correction_table(
    family: GeneratorFamily,
    k: int,
    m: int,
    C: float,
    alpha: float,
    lam: float = 1.0,
) -> float:
    """Closed-form C_k for the four generator families with B = k/(C m)"""
    _check_truncation(k, m)
    if not 0 < C <= 1:
        raise ConfigurationError(f"C={C!r} must lie in (0, 1]")
    B = k / (C * m)
    if B > 1:
        raise DomainError(f"B = k/(C m) = {B!r} exceeds 1")

    if family == GeneratorFamily.W1_BH:
        return 1.0
    if family == GeneratorFamily.W2_AORC:
        return 1.0 / (1.0 - B * (1.0 - alpha))
    if family == GeneratorFamily.W3_BLANCHARD_ROQUAIN:
        return min((1.0 - lam) / (1.0 + 1.0 / m - B), 1.0 / alpha)
    if family == GeneratorFamily.W4_COMBINED:
        return min((1.0 - lam) / (1.0 - B * (1.0 - alpha)), 1.0 / alpha)
    raise ValueError(f"Unknown generator family: {family}")


def effective_upper_argument(spec: GeneratorSpec, k: int, m: int, C: float = 1.0, lam: Optional[float] = None) -> float:
    """B = min(g^{-1}(lam), k/(C m))"""
    _check_truncation(k, m)
    lam = spec.lam if lam is None else lam
    return min(get_generator(spec).inverse(lam), k / (C * m))


def _check_endpoint_supremum(generator, lo: float, hi: float, endpoint_ratio: float) -> None:
    grid = np.linspace(lo, hi, 1024)
    ratios = generator.extended(grid) / grid
    worst = float(np.max(ratios))
    if worst > endpoint_ratio * (1.0 + 1e-12):
        raise InternalConsistencyError(
            f"g(t)/t is not maximal at the right endpoint on [{lo!r}, {hi!r}]: "
            f"grid max {worst!r} > endpoint {endpoint_ratio!r}"
        )


def procedure_correction_sup(
    spec: GeneratorSpec,
    k: int,
    m: int,
    C: float = 1.0,
    delta: float = 1.0,
    mode: M0Mode = "deterministic",
    lam: Optional[float] = None,
) -> float:
    """
    C_k as (1/alpha) sup g(t)/t: over t in [delta/m, B] (adaptive) or over
    t = j/m, j <= floor(m B) (deterministic). The families here are convex
    on the uncapped range, so the supremum sits at the right endpoint.
    """
    if mode == "deterministic":
        C, delta = 1.0, 1.0
    B = effective_upper_argument(spec, k, m, C, lam)
    generator = get_generator(spec)

    if mode == "adaptive":
        lo = delta / m
        if B < lo:
            raise ConfigurationError(f"empty supremum domain: B={B!r} < delta/m={lo!r}")
        t = B
    elif mode == "deterministic":
        n = math.floor(m * B + 1e-9)
        if n < 1:
            raise ConfigurationError(f"empty supremum domain: floor(m B) = 0 for B={B!r}")
        lo = 1.0 / m
        t = n / m
    else:
        raise ValueError(f"Unknown m0 mode: {mode}")

    if spec.family == GeneratorFamily.W1_BH:
        # g(t)/t is constant for the linear family
        return spec.scale

    ratio = float(generator.extended(t)) / t
    if settings.DEBUG_CHECKS and t > lo:
        _check_endpoint_supremum(generator, lo, t, ratio)
    return ratio / spec.alpha


def dependence_correction(
    regime: Regime,
    mode: M0Mode,
    k: int,
    C: float = 1.0,
    delta: float = 1.0,
) -> float:
    """D_k: 1, H_k, 1/C or (1/C) log(1 + k/(C delta))"""
    if k < 1:
        raise DomainError(f"k must be >= 1, got {k}")
    if not (0 < C <= 1 and 0 < delta <= 1):
        raise ConfigurationError(f"clamp fractions C={C!r}, delta={delta!r} must lie in (0, 1]")
    if mode == "deterministic":
        return 1.0 if regime == "BI" else harmonic(k)
    if mode == "adaptive":
        if regime == "BI":
            return 1.0 / C
        return math.log1p(k / (C * delta)) / C
    raise ValueError(f"Unknown m0 mode: {mode}")


def correction_factors(
    spec: GeneratorSpec,
    m: int,
    regime: Regime,
    truncation: TruncationConfig,
    lam: Optional[float] = None,
) -> CorrectionFactors:
    """C_k and D_k of a truncated schedule; a deterministic config already carries C = delta = 1"""
    k, mode = truncation.k, truncation.m0_mode
    _check_truncation(k, m)
    Ck = procedure_correction_sup(spec, k, m, truncation.C, truncation.delta, mode, lam)
    Dk = dependence_correction(regime, mode, k, truncation.C, truncation.delta)
    B = effective_upper_argument(spec, k, m, truncation.C, lam)
    return CorrectionFactors(Ck=Ck, Dk=Dk, B=B, regime=regime, mode=mode)


def corrected_schedule(base: CriticalSchedule, Ck: float, Dk: float) -> CriticalSchedule:
    """Divide every critical value by Ck * Dk"""
    if Ck <= 0 or Dk <= 0:
        raise DomainError(f"correction factors must be positive, got Ck={Ck!r}, Dk={Dk!r}")
    values = base.as_array() / (Ck * Dk)
    if not values[0] > 0:
        raise ScheduleConstructionError("corrected first critical value is 0")

    meta = base.meta.model_copy(deep=True)
    meta.corrections.extend([f"Ck={Ck!r}", f"Dk={Dk!r}"])
    logger.info(f"Corrected {meta.generator} schedule by Ck*Dk = {Ck * Dk!r}")
    return CriticalSchedule(values=values.tolist(), meta=meta)


def truncation_savings(k: int, m: int) -> float:
    """H_k / H_m, the share of the full dependence correction still paid at truncation k"""
    _check_truncation(k, m)
    return harmonic(k) / harmonic(m)
