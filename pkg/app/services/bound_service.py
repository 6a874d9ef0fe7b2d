# services/bound_service.py
"""
FDR upper bounds and exact FDR values, each reported as a BoundReport with
an applicability verdict. A bound that does not apply is still computed and
returned with applicable=False; it never raises.
"""
import math
import warnings
from typing import Callable, Dict, Literal, Optional, Tuple
import logging

import numpy as np
from scipy.integrate import IntegrationWarning, quad

from ..config import settings
from ..schemas.bound_schemas import BoundReport
from ..schemas.schedule_schemas import CriticalSchedule, GeneratorFamily, GeneratorSpec
from .correction_service import (
    effective_upper_argument,
    harmonic,
    harmonic_prefix,
    procedure_correction_sup,
)
from .errors import ConfigurationError, DomainError, InternalConsistencyError, UnknownBoundError
from .generator_service import get_generator, w4_precondition_margins

logger = logging.getLogger(__name__)

Regime = Literal["BI", "dependence"]

_mu_condition_logged = False


def _check_counts(m0: int, m: int) -> None:
    if m < 1 or not 0 <= m0 <= m:
        raise DomainError(f"need 0 <= m0 <= m and m >= 1, got m0={m0}, m={m}")


# ---------------------------------------------------------------------------
# Linear step-up procedures
# ---------------------------------------------------------------------------

def bound_bh_bi(m0: int, m: int, alpha: float) -> BoundReport:
    """BH under independence: FDR = (m0/m) alpha exactly"""
    _check_counts(m0, m)
    return BoundReport(
        value=m0 / m * alpha,
        applicable=True,
        condition_detail="independent uniform nulls",
        source="bh-bi",
        exact=True,
    )


def bound_by_dependence(m0: int, m: int, alpha: float) -> BoundReport:
    """BH under arbitrary dependence: FDR <= (m0/m) alpha H_m"""
    _check_counts(m0, m)
    return BoundReport(
        value=m0 / m * alpha * harmonic(m),
        applicable=True,
        condition_detail="arbitrary dependence",
        source="by-dependence",
    )


def bound_bhk_bi(m0: int, m: int, k: int, alpha: float) -> BoundReport:
    """Truncated BH(k) under independence: (m0/m) alpha / H_k"""
    _check_counts(m0, m)
    return BoundReport(
        value=m0 / m * alpha / harmonic(k),
        applicable=True,
        condition_detail="independent uniform nulls",
        source="bhk-bi",
    )


def bound_bhk_dependence(m0: int, m: int, k: int, alpha: float) -> BoundReport:
    """Truncated BH(k) under arbitrary dependence: (m0/m) alpha"""
    _check_counts(m0, m)
    if not 1 <= k <= m:
        raise DomainError(f"k={k} must lie in 1..{m}")
    return BoundReport(
        value=m0 / m * alpha,
        applicable=True,
        condition_detail="arbitrary dependence",
        source="bhk-dependence",
    )


# ---------------------------------------------------------------------------
# Generator-based procedures
# ---------------------------------------------------------------------------

def bound_w4_bi(m: int, alpha: float, lam: float, m0: Optional[int] = None) -> BoundReport:
    """
    W4 under independence: FDR <= alpha when alpha/(m-1) < lam < 1,
    m >= (1-alpha)/(alpha - alpha^2/4) and m >= (1-lam) lam / alpha.
    With m0 the finer value alpha lam / (1 - alpha + ((m+1) alpha - 1)/(m0 (1-lam)))
    is attached.
    """
    margins = w4_precondition_margins(
        GeneratorSpec(family=GeneratorFamily.W4_COMBINED, alpha=alpha, lam=min(lam, 1.0)), m
    )
    if lam >= 1:
        margins["lam_range"] = min(margins["lam_range"], 1.0 - lam)
    applicable = margins["lam_range"] > 0 and margins["m_vs_alpha"] >= 0 and margins["m_vs_lam"] >= 0

    sharper = None
    if m0 is not None and applicable:
        _check_counts(m0, m)
        if m0 == 0:
            sharper = 0.0
        else:
            denom = 1.0 - alpha + ((m + 1) * alpha - 1.0) / (m0 * (1.0 - lam))
            if denom > 0:
                sharper = alpha * lam / denom

    margin = min(margins["lam_range"], margins["m_vs_alpha"], margins["m_vs_lam"])
    if not applicable:
        logger.warning(f"W4 independence bound not applicable for m={m}, alpha={alpha}, lambda={lam}: {margins}")
    return BoundReport(
        value=alpha,
        applicable=applicable,
        condition_detail=(
            f"alpha/(m-1) < lambda < 1 [{margins['lam_range']:.6g}], "
            f"m >= (1-alpha)/(alpha-alpha^2/4) [{margins['m_vs_alpha']:.6g}], "
            f"m >= (1-lambda)lambda/alpha [{margins['m_vs_lam']:.6g}]"
        ),
        margin=margin,
        source="w4-bi",
        sharper_value=sharper,
        extras=margins,
    )


def bound_generator_bi(
    m0: int,
    m: int,
    C: float,
    Ck: float,
    alpha: float,
    mode: Literal["deterministic", "adaptive"] = "deterministic",
    restricted: bool = True,
) -> BoundReport:
    """
    Independence bound (m0/m) alpha C^{-1} C_k^ad (adaptive) or
    (m0/m) alpha C_k^det (deterministic). Adaptive mode needs an estimator
    that only reads the p-values above lambda.
    """
    _check_counts(m0, m)
    if mode == "deterministic":
        value = m0 / m * alpha * Ck
        applicable, detail = True, "deterministic m0_hat = m"
    else:
        value = m0 / m * alpha / C * Ck
        applicable = bool(restricted)
        detail = (
            "estimator reads only p-values above lambda"
            if restricted
            else "estimator also reads p-values below lambda"
        )
    return BoundReport(
        value=value,
        applicable=applicable,
        condition_detail=detail,
        source="ck-bi",
        extras={"Ck": Ck, "C": C},
    )


def mu_mass_det(spec: GeneratorSpec, m: int, k: int, C: float = 1.0, lam: Optional[float] = None) -> float:
    """mu(D) = sum_{1 <= j <= m B} m (g(j/m) - g((j-1)/m)) / j"""
    B = effective_upper_argument(spec, k, m, C, lam)
    n = math.floor(m * B + 1e-9)
    if n < 1:
        return 0.0
    generator = get_generator(spec)
    j = np.arange(1, n + 1, dtype=float)
    increments = generator.extended(j / m) - generator.extended((j - 1) / m)
    return float(np.sum(m * increments / j))


def bound_generator_dep_det(
    m0: int,
    m: int,
    spec: GeneratorSpec,
    k: int,
    lam: Optional[float] = None,
) -> BoundReport:
    """
    Deterministic schedule under arbitrary dependence:
    FDR <= (m0/m) alpha H_n C_k^det with n = floor(m B); the sharper value is
    (m0/m) mu(D). Applicability is judged by mu(D) < 1; the product
    H_n C_k^det is reported in extras but not enforced.
    """
    global _mu_condition_logged
    _check_counts(m0, m)
    alpha = spec.alpha
    B = effective_upper_argument(spec, k, m, 1.0, lam)
    n = math.floor(m * B + 1e-9)
    if n < 1:
        raise ConfigurationError(f"floor(m B) = 0 for B={B!r}")
    Ck = procedure_correction_sup(spec, k, m, 1.0, 1.0, "deterministic", lam)
    H_n = harmonic(n)
    mu = mu_mass_det(spec, m, k, 1.0, lam)

    if not _mu_condition_logged:
        logger.warning(
            "Deterministic dependence bound: applicability is judged by mu(D) < 1; "
            "the product H_n * C_k^det is reported only"
        )
        _mu_condition_logged = True

    return BoundReport(
        value=m0 / m * alpha * H_n * Ck,
        applicable=mu < 1,
        condition_detail=f"mu(D) = {mu!r} < 1",
        margin=1.0 - mu,
        source="det-dependence",
        sharper_value=m0 / m * mu,
        extras={"mu": mu, "H_n": H_n, "Ck": Ck, "B": B, "printed_condition": H_n * Ck},
    )


def _integral_condition(spec: GeneratorSpec, m: int, B: float, delta: float) -> Tuple[float, Optional[str]]:
    """
    (m/delta) g(delta/m) + int_delta^{mB} g'(z/m)/z dz, or (value, reason)
    with a reason when numerical integration failed.
    """
    generator = get_generator(spec)
    head = m / delta * float(generator.extended(delta / m))
    upper = m * B
    if upper <= delta:
        return head, None

    family = spec.family
    if family == GeneratorFamily.W1_BH:
        integral = spec.scale * spec.alpha * math.log(upper / delta)
        return head + integral, None
    if family in (GeneratorFamily.W2_AORC, GeneratorFamily.W4_COMBINED):
        c = (1.0 - spec.alpha) / m

        def F(z: float) -> float:
            return math.log(z) - math.log1p(-c * z) + 1.0 / (1.0 - c * z)

        factor = spec.scale * spec.alpha
        if family == GeneratorFamily.W4_COMBINED:
            factor *= 1.0 - spec.lam
        return head + factor * (F(upper) - F(delta)), None

    def integrand(z: float) -> float:
        return float(generator.derivative(z / m)) / z

    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", IntegrationWarning)
        integral, abserr = quad(integrand, delta, upper, epsabs=settings.QUAD_TOLERANCE, limit=200)
    if caught or abserr > settings.QUAD_TOLERANCE:
        reason = f"quadrature did not converge (abserr={abserr!r}, warnings={len(caught)})"
        return head + integral, reason
    return head + integral, None


def bound_generator_dep_adaptive(
    m0: int,
    m: int,
    spec: GeneratorSpec,
    k: int,
    C: float,
    delta: float,
    lam: Optional[float] = None,
) -> BoundReport:
    """
    Adaptive schedule under arbitrary dependence:
    FDR <= alpha (m0/m) C^{-1} (1 + log(m B / delta)) C_k^ad, applicable when
    (m/delta) g(delta/m) + int_delta^{mB} g'(z/m)/z dz < 1.
    """
    _check_counts(m0, m)
    B = effective_upper_argument(spec, k, m, C, lam)
    Ck = procedure_correction_sup(spec, k, m, C, delta, "adaptive", lam)
    value = spec.alpha * m0 / m / C * (1.0 + math.log(m * B / delta)) * Ck

    condition, failure = _integral_condition(spec, m, B, delta)
    if failure is not None:
        logger.warning(f"Adaptive dependence bound: {failure}")
        return BoundReport(
            value=value,
            applicable=False,
            condition_detail=failure,
            source="adaptive-dependence",
            extras={"B": B, "Ck": Ck, "condition": condition},
        )
    return BoundReport(
        value=value,
        applicable=condition < 1,
        condition_detail=f"(m/delta) g(delta/m) + int g'(z/m)/z dz = {condition!r} < 1",
        margin=1.0 - condition,
        source="adaptive-dependence",
        extras={"B": B, "Ck": Ck, "condition": condition},
    )


# ---------------------------------------------------------------------------
# Bound from marginal rejection probabilities
# ---------------------------------------------------------------------------

def _doehler_forms(P: np.ndarray, k: int) -> Tuple[float, float]:
    if k == 1:
        summed = float(np.sum(P[:, 0]))
        return summed, summed
    j = np.arange(1, k, dtype=float)
    weighted = float(np.sum(P[:, k - 1]) / k + np.sum(P[:, : k - 1] @ (1.0 / (j * (j + 1)))))
    steps = np.diff(P, axis=1, prepend=0.0)
    telescoped = float(np.sum(steps @ (1.0 / np.arange(1, k + 1, dtype=float))))
    return weighted, telescoped


def doehler_bound(marginals, k: int) -> float:
    """
    sum over nulls of P(p_i <= a_k)/k + sum_{j<k} P(p_i <= a_j)/(j(j+1)).

    marginals has one row per true null and k columns P(p_i <= a_{j:m}),
    non-decreasing along each row. The telescoped form
    sum_j (P_j - P_{j-1})/j is computed as well and must agree to 1e-12.
    """
    P = np.atleast_2d(np.asarray(marginals, dtype=float))
    if P.size == 0:
        return 0.0
    if k < 1 or P.shape[1] != k:
        raise DomainError(f"marginals need k={k} columns, got shape {P.shape}")
    if not np.all(np.isfinite(P)) or np.any(P < 0) or np.any(P > 1):
        raise DomainError("marginal probabilities must lie in [0, 1]")
    if np.any(np.diff(P, axis=1) < 0):
        raise DomainError("marginal probabilities must be non-decreasing in j")

    weighted, telescoped = _doehler_forms(P, k)
    if abs(weighted - telescoped) > 1e-12 * max(1.0, abs(weighted)):
        raise InternalConsistencyError(f"bound forms disagree: {weighted!r} vs {telescoped!r}")
    return weighted


def doehler_bound_uniform(schedule: CriticalSchedule, m0: int, k: int) -> BoundReport:
    """Marginal bound for uniform nulls, P(p_i <= a_j) = a_j, for the first k values of a schedule"""
    _check_counts(m0, schedule.m)
    if not 1 <= k <= schedule.m:
        raise DomainError(f"k={k} must lie in 1..{schedule.m}")
    per_null = doehler_bound(schedule.as_array()[:k][None, :], k)
    return BoundReport(
        value=m0 * per_null,
        applicable=True,
        condition_detail="uniform nulls; schedule constant from k on",
        source="marginal",
    )


# ---------------------------------------------------------------------------
# Sparsity test SP(k)
# ---------------------------------------------------------------------------

def sp_ak_prefix(n: int) -> np.ndarray:
    """(a_1, ..., a_n) with a_k = 1/H_k + sum_{j<k} 1/((j+1) H_j)"""
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    H = harmonic_prefix(n)
    j = np.arange(1, n, dtype=float)
    tail = np.concatenate(([0.0], np.cumsum(1.0 / ((j + 1) * H[: n - 1]))))
    return 1.0 / H + tail


def sp_ak(k: int) -> float:
    """Normalizer a_k of the SP(k) critical values; a_1 = 1"""
    if k < 1:
        raise DomainError(f"k must be >= 1, got {k}")
    H = harmonic_prefix(k)
    j = np.arange(1, k, dtype=float)
    return float(1.0 / H[k - 1] + np.sum(1.0 / ((j + 1) * H[: k - 1])))


def sp_ak_bounds(k: int) -> Tuple[float, float]:
    """
    lower = log(1 + log(k+1)) - log(1 + log 3) + 1/(1 + log k),
    upper = 13/18 + log log k + 1/log(k+1); valid for k >= 4
    """
    if k < 4:
        raise DomainError(f"a_k bracket needs k >= 4, got {k}")
    log_k = math.log(k)
    lower = math.log1p(math.log(k + 1)) - math.log1p(math.log(3)) + 1.0 / (1.0 + log_k)
    upper = 13.0 / 18.0 + math.log(log_k) + 1.0 / math.log(k + 1)
    return lower, upper


def bound_sp(m0: int, m: int, k: int, alpha: float, regime: Regime) -> BoundReport:
    """SP(k): (m0/m) alpha / a_k under independence, (m0/m) alpha under dependence"""
    _check_counts(m0, m)
    if not 1 <= k <= m:
        raise DomainError(f"k={k} must lie in 1..{m}")
    if regime == "BI":
        value, source = m0 / m * alpha / sp_ak(k), "sp-bi"
    elif regime == "dependence":
        value, source = m0 / m * alpha, "sp-dependence"
    else:
        raise ValueError(f"Unknown dependence regime: {regime}")
    return BoundReport(value=value, applicable=True, condition_detail=regime, source=source)


# ---------------------------------------------------------------------------
# Early stopped test
# ---------------------------------------------------------------------------

def bound_es_bi(m0: int, m: int, alpha: float) -> BoundReport:
    """Uncorrected ES(kappa) under independence: (m0/m) alpha"""
    _check_counts(m0, m)
    return BoundReport(
        value=m0 / m * alpha,
        applicable=True,
        condition_detail="independent uniform nulls",
        source="es-bi",
    )


def bound_es_dependence(m0: int, m: int, alpha: float) -> BoundReport:
    """ES(kappa) truncated at k and divided by H_k, arbitrary dependence: (m0/m) alpha"""
    _check_counts(m0, m)
    return BoundReport(
        value=m0 / m * alpha,
        applicable=True,
        condition_detail="arbitrary dependence, corrected values",
        source="es-dependence",
    )


# ---------------------------------------------------------------------------
# One common U for all nulls, false hypotheses at 0
# ---------------------------------------------------------------------------

def extreme_dep_fdr(
    m0: int,
    m: int,
    alpha: float,
    lam: float,
    variant: Literal["storey", "sparsity"] = "storey",
    C: Optional[float] = None,
) -> BoundReport:
    """
    Exact FDR of the lambda-capped adaptive linear step-up test when all null
    p-values equal one uniform U and the false ones are 0:
    storey -> (m0/m) min(alpha m (1-alpha), lambda);
    sparsity (m0_hat >= C m) -> (m0/m) min(alpha/C, lambda), needs C m >= 1/(1-lambda).
    """
    _check_counts(m0, m)
    if not 0 < lam < 1:
        raise DomainError(f"lambda={lam!r} must lie in (0, 1)")

    if variant == "storey":
        level = alpha * m * (1.0 - alpha)
        saturated = level >= lam
        return BoundReport(
            value=m0 / m * min(level, lam),
            applicable=True,
            condition_detail=(
                f"alpha m (1-alpha) = {level!r} {'>=' if saturated else '<'} lambda: "
                f"FDR {'equals' if saturated else 'below'} (m0/m) lambda"
            ),
            margin=level - lam,
            source="extreme-storey",
            exact=True,
            extras={"saturated": float(saturated), "lower_clamp_form": m0 / m * min(alpha * m * (1.0 - lam), lam)},
        )
    if variant == "sparsity":
        if C is None or not 0 < C <= 1:
            raise ConfigurationError(f"sparsity variant needs C in (0, 1], got {C!r}")
        needed = 1.0 / (1.0 - lam)
        applicable = C * m >= needed
        if not applicable:
            logger.warning(f"Sparsity clamp C m = {C * m!r} below 1/(1-lambda) = {needed!r}")
        return BoundReport(
            value=m0 / m * min(alpha / C, lam),
            applicable=applicable,
            condition_detail=f"C m = {C * m!r} >= 1/(1-lambda) = {needed!r}",
            margin=C * m - needed,
            source="extreme-sparsity",
            exact=True,
        )
    raise ValueError(f"Unknown extreme-dependence variant: {variant}")


BOUND_FUNCTIONS: Dict[str, Callable[..., BoundReport]] = {
    "bh-bi": bound_bh_bi,
    "by-dependence": bound_by_dependence,
    "bhk-bi": bound_bhk_bi,
    "bhk-dependence": bound_bhk_dependence,
    "w4-bi": bound_w4_bi,
    "ck-bi": bound_generator_bi,
    "det-dependence": bound_generator_dep_det,
    "adaptive-dependence": bound_generator_dep_adaptive,
    "marginal": doehler_bound_uniform,
    "sp-bi": lambda m0, m, k, alpha: bound_sp(m0, m, k, alpha, "BI"),
    "sp-dependence": lambda m0, m, k, alpha: bound_sp(m0, m, k, alpha, "dependence"),
    "es-bi": bound_es_bi,
    "es-dependence": bound_es_dependence,
    "extreme-storey": lambda m0, m, alpha, lam: extreme_dep_fdr(m0, m, alpha, lam, "storey"),
    "extreme-sparsity": lambda m0, m, alpha, lam, C: extreme_dep_fdr(m0, m, alpha, lam, "sparsity", C),
}


def compute_bound(bound_id: str, **params) -> BoundReport:
    """Dispatch a bound by identifier"""
    try:
        func = BOUND_FUNCTIONS[bound_id]
    except KeyError:
        raise UnknownBoundError(f"Unknown bound: {bound_id!r}; known: {', '.join(sorted(BOUND_FUNCTIONS))}")
    return func(**params)
