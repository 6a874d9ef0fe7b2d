# services/schedule_service.py
"""
Construction of critical-value schedules: generator-based (deterministic,
adaptive, truncated), Bonferroni, BY, truncated BH(k), early stopped ES(kappa)
and the sparsity test SP(k).

Every constructor returns a validated CriticalSchedule or raises
ScheduleConstructionError.
"""
import math
from typing import Optional
import logging

import numpy as np

from ..schemas.bound_schemas import CrossoverReport, FirstCriticalValues
from ..schemas.pvalue_schemas import PValueSet
from ..schemas.schedule_schemas import (
    CriticalSchedule,
    GeneratorFamily,
    GeneratorSpec,
    M0Estimate,
    ScheduleMeta,
)
from .bound_service import sp_ak
from .correction_service import harmonic, harmonic_prefix
from .errors import (
    ContractViolationError,
    DomainError,
    InternalConsistencyError,
    ScheduleConstructionError,
)
from .estimator_service import is_clamped
from .generator_service import (
    generator_eval,
    generator_inverse,
    get_generator,
    w4_precondition_margins,
    w4_preconditions_hold,
)

logger = logging.getLogger(__name__)

__all__ = [
    "generator_eval",
    "generator_inverse",
    "validate_schedule",
    "deterministic_schedule",
    "adaptive_schedule",
    "bonferroni_schedule",
    "by_schedule",
    "truncated_bh_schedule",
    "early_stop_schedule",
    "early_stop_corrected_schedule",
    "sp_schedule",
    "crossover_j0",
    "crossover_report",
    "first_critical_values",
]


def _check_k(m: int, k: int) -> None:
    if m < 1:
        raise DomainError(f"m must be >= 1, got {m}")
    if not 1 <= k <= m:
        raise DomainError(f"truncation level k={k} must lie in 1..{m}")


def _check_alpha(alpha: float) -> None:
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha={alpha!r} must lie in (0, 1)")


def validate_schedule(values: np.ndarray, meta: ScheduleMeta) -> CriticalSchedule:
    """Enforce 0 < a_1 <= ... <= a_m < 1 and wrap the values"""
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        raise ScheduleConstructionError("empty schedule")
    if not np.all(np.isfinite(values)):
        raise ScheduleConstructionError(f"{meta.generator}: non-finite critical value")
    if not values[0] > 0:
        raise ScheduleConstructionError(f"{meta.generator}: first critical value {values[0]!r} is not positive")
    if np.any(np.diff(values) < 0):
        j = int(np.flatnonzero(np.diff(values) < 0)[0]) + 1
        raise ScheduleConstructionError(f"{meta.generator}: critical values decrease after j={j}")
    if not values[-1] < 1:
        raise ScheduleConstructionError(f"{meta.generator}: last critical value {values[-1]!r} is not below 1")
    return CriticalSchedule(values=values.tolist(), meta=meta)


def _truncated_values(generator, m: int, k: int, lam: float, m0_hat: float) -> np.ndarray:
    """min(g((j ^ k)/m0_hat), lam) for j = 1..m"""
    j = np.arange(1, m + 1, dtype=float)
    return np.minimum(generator.extended(np.minimum(j, k) / m0_hat), lam)


def _generator_schedule(
    spec: GeneratorSpec,
    m: int,
    k: int,
    lam: Optional[float],
    m0_hat: float,
    m0_mode: str,
) -> CriticalSchedule:
    _check_k(m, k)
    if spec.family == GeneratorFamily.W3_BLANCHARD_ROQUAIN and spec.m != m:
        raise DomainError(f"W3 generator built for m={spec.m} used with m={m}")
    lam = spec.lam if lam is None else lam
    if not 0.0 < lam <= 1.0:
        raise DomainError(f"lambda={lam!r} must lie in (0, 1]")

    generator = get_generator(spec)
    values = _truncated_values(generator, m, k, lam, m0_hat)
    meta = ScheduleMeta(
        generator=spec.family.value,
        alpha=spec.alpha,
        lam=lam,
        k=k,
        m0_mode=m0_mode,
        m0_hat=m0_hat,
    )

    if spec.family == GeneratorFamily.W4_COMBINED and not w4_preconditions_hold(spec, m):
        margins = w4_precondition_margins(spec, m)
        logger.warning(f"W4 with m={m}, alpha={spec.alpha}, lambda={spec.lam} misses its independence preconditions: {margins}")
        meta.notes.append("independence preconditions not met")

    if spec.family == GeneratorFamily.W2_AORC and k == m and m0_hat == m and values[-1] >= 1:
        if m == 1:
            raise ScheduleConstructionError("W2 with m = 1 has no admissible last coefficient")
        values[-1] = (values[-2] + 1.0) / 2.0
        meta.notes.append(f"last coefficient replaced by midpoint {values[-1]!r}")

    schedule = validate_schedule(values, meta)
    logger.debug(f"Built {spec.family.value} schedule m={m} k={k} m0_hat={m0_hat!r}")
    return schedule


def deterministic_schedule(spec: GeneratorSpec, m: int, k: int, lam: Optional[float] = None) -> CriticalSchedule:
    """alpha_{j:m} = min(g((j ^ k)/m), lam); lam defaults to the generator's cap"""
    return _generator_schedule(spec, m, k, lam, float(m), "deterministic")


def adaptive_schedule(
    spec: GeneratorSpec,
    m: int,
    k: int,
    lam: Optional[float],
    m0_hat,
    C: float = 1.0,
    delta: float = 1.0,
) -> CriticalSchedule:
    """
    alpha_hat_{j:m} = min(g((j ^ k)/m0_hat), lam).

    m0_hat is either a clamped M0Estimate (its own C and delta are checked) or
    a number that must already lie in [C m, m / delta].
    """
    if isinstance(m0_hat, M0Estimate):
        C, delta, m0_value = m0_hat.C, m0_hat.delta, m0_hat.value
    else:
        m0_value = float(m0_hat)
    if not is_clamped(m0_value, m, C, delta):
        raise ContractViolationError(
            f"m0_hat={m0_value!r} outside the clamp [{C * m!r}, {m / delta!r}]; clamp the estimate first"
        )
    return _generator_schedule(spec, m, k, lam, m0_value, "adaptive")


def bonferroni_schedule(m: int, alpha: float) -> CriticalSchedule:
    _check_alpha(alpha)
    if m < 1:
        raise DomainError(f"m must be >= 1, got {m}")
    meta = ScheduleMeta(generator="Bonferroni", alpha=alpha, k=1)
    return validate_schedule(np.full(m, alpha / m), meta)


def truncated_bh_schedule(m: int, k: int, alpha: float) -> CriticalSchedule:
    """beta_{j:m} = (alpha/m) min(j, k) / H_k; k = 1 is Bonferroni, k = m is BY"""
    _check_k(m, k)
    _check_alpha(alpha)
    j = np.arange(1, m + 1, dtype=float)
    values = (alpha / m) * np.minimum(j, k) / harmonic(k)
    meta = ScheduleMeta(generator="BH(k)", alpha=alpha, k=k, corrections=[f"Dk=H_{k}"])
    return validate_schedule(values, meta)


def by_schedule(m: int, alpha: float) -> CriticalSchedule:
    """j alpha / (m H_m)"""
    schedule = truncated_bh_schedule(m, m, alpha)
    meta = schedule.meta.model_copy(update={"generator": "BY"})
    return CriticalSchedule(values=schedule.values, meta=meta)


def _early_stop_values(p: PValueSet, kappa: int, alpha: float):
    m = p.m
    if not 1 <= kappa <= m - 1:
        raise DomainError(f"kappa={kappa} must lie in 1..{m - 1}")
    _check_alpha(alpha)
    threshold = float(np.sort(p.as_array())[kappa])
    bh = (alpha / m) * np.arange(1, m + 1, dtype=float)
    # {i : i alpha/m < p_{kappa+1:m}} is a prefix of 1..m
    j_star = max(1, int(np.count_nonzero(bh < threshold)))
    return np.minimum(bh, bh[j_star - 1]), j_star


def early_stop_schedule(p: PValueSet, kappa: int, alpha: float) -> CriticalSchedule:
    """
    Data-dependent ES(kappa) values (alpha/m) min(j, j*) with
    j* = max(1, max{i <= m : i alpha/m < p_{kappa+1:m}}).

    j* only depends on p_{kappa+1:m}, so setting a rejected p-value to 0 leaves
    the schedule unchanged (ties with p_{kappa+1:m} excepted).
    """
    values, j_star = _early_stop_values(p, kappa, alpha)
    meta = ScheduleMeta(generator="ES", alpha=alpha, kappa=kappa, j_star=j_star, m0_mode="data-dependent")
    return validate_schedule(values, meta)


def early_stop_corrected_schedule(p: PValueSet, kappa: int, k: int, alpha: float) -> CriticalSchedule:
    """min(alpha_hat_j, alpha_hat_k) / H_k over the ES(kappa) values"""
    _check_k(p.m, k)
    values, j_star = _early_stop_values(p, kappa, alpha)
    corrected = np.minimum(values, values[k - 1]) / harmonic(k)
    meta = ScheduleMeta(
        generator="ES",
        alpha=alpha,
        k=k,
        kappa=kappa,
        j_star=j_star,
        m0_mode="data-dependent",
        corrections=[f"Dk=H_{k}"],
    )
    return validate_schedule(corrected, meta)


def sp_schedule(m: int, k: int, alpha: float) -> CriticalSchedule:
    """alpha/(m a_k) min(j/H_j, k/H_k)"""
    _check_k(m, k)
    _check_alpha(alpha)
    H = harmonic_prefix(m)
    j = np.arange(1, m + 1, dtype=float)
    a_k = sp_ak(k)
    values = alpha / (m * a_k) * np.minimum(j / H, k / H[k - 1])
    meta = ScheduleMeta(generator="SP(k)", alpha=alpha, k=k, notes=[f"a_k={a_k!r}"])
    return validate_schedule(values, meta)


def crossover_j0(m: int, k: int, alpha: float) -> int:
    """
    Largest j with SP(k) value >= BH(k) value. The set of such j must be
    exactly {1, ..., j0}.
    """
    sp = sp_schedule(m, k, alpha).as_array()
    bh = truncated_bh_schedule(m, k, alpha).as_array()
    at_least = sp >= bh
    hits = np.flatnonzero(at_least)
    if hits.size == 0:
        raise InternalConsistencyError(f"SP({k}) first value below BH({k}) first value for m={m}")
    j0 = int(hits[-1]) + 1
    if not np.all(at_least[:j0]):
        gap = int(np.flatnonzero(~at_least[:j0])[0]) + 1
        raise InternalConsistencyError(f"crossover set is not a prefix: fails at j={gap} < j0={j0}")
    return j0


def crossover_report(m: int, k: int, alpha: float) -> CrossoverReport:
    j0 = crossover_j0(m, k, alpha)
    approximation = None
    if k >= 3:
        approximation = k ** (1.0 / math.log(math.log(k)))
    return CrossoverReport(m=m, k=k, alpha=alpha, j0=j0, approximation=approximation)


def first_critical_values(m: int, k: int, alpha: float) -> FirstCriticalValues:
    """First coefficients alpha_{1:m} of Bonferroni, BY, BH(k), SP(k) and their leading-order forms"""
    _check_k(m, k)
    _check_alpha(alpha)
    log_m = math.log(m)
    log_k = math.log(k)
    loglog_k = math.log(log_k) if k >= 3 else 0.0
    return FirstCriticalValues(
        m=m,
        k=k,
        alpha=alpha,
        bonferroni=alpha / m,
        by=alpha / (m * harmonic(m)),
        bh_k=alpha / (m * harmonic(k)),
        sp_k=alpha / (m * sp_ak(k)),
        bonferroni_approx=alpha / m,
        by_approx=alpha / (m * log_m) if log_m > 0 else None,
        bh_k_approx=alpha / (m * log_k) if log_k > 0 else None,
        sp_k_approx=alpha / (m * loglog_k) if loglog_k > 0 else None,
    )
