# services/procedure_service.py
"""
Procedure registry shared by the CLI, the HTTP routers and the Monte-Carlo
harness: turns a ProcedureParams into a schedule builder, a rejection rule,
its nominal level and its reference FDR bounds.
"""
from typing import Dict, List, Optional, Tuple
import logging

from ..config import settings
from ..schemas.analysis_schemas import ProcedureParams, SweepResult, SweepRow
from ..schemas.bound_schemas import BoundReport
from ..schemas.pvalue_schemas import PValueSet, RejectionResult
from ..schemas.schedule_schemas import (
    CriticalSchedule,
    EstimatorConfig,
    GeneratorFamily,
    GeneratorSpec,
    TruncationConfig,
)
from ..schemas.simulation_schemas import Scenario
from . import bound_service as bounds
from .correction_service import correction_factors, corrected_schedule, procedure_correction_sup
from .errors import DomainError, UnknownProcedureError
from .estimator_service import estimate_m0, storey_range
from .schedule_service import (
    adaptive_schedule,
    bonferroni_schedule,
    by_schedule,
    deterministic_schedule,
    early_stop_corrected_schedule,
    early_stop_schedule,
    sp_schedule,
    truncated_bh_schedule,
)
from .step_engine import run_step, step_up

logger = logging.getLogger(__name__)

GENERATOR_PROCEDURES: Dict[str, GeneratorFamily] = {
    "bh": GeneratorFamily.W1_BH,
    "w2": GeneratorFamily.W2_AORC,
    "w3": GeneratorFamily.W3_BLANCHARD_ROQUAIN,
    "w4": GeneratorFamily.W4_COMBINED,
}


class Procedure:
    """A configured multiple test: p-values -> schedule -> rejections"""

    def __init__(self, params: ProcedureParams):
        self.params = params
        self.name = params.procedure
        self.base_name = params.procedure.removeprefix("adaptive-")
        if self.base_name not in GENERATOR_PROCEDURES and params.is_adaptive:
            raise UnknownProcedureError(f"No adaptive variant of {self.base_name!r}")
        self._fixed: Dict[int, CriticalSchedule] = {}
        self._clamp_warned = False

    # -- parameter resolution -------------------------------------------------

    @property
    def alpha(self) -> float:
        return self.params.alpha

    @property
    def family(self) -> Optional[GeneratorFamily]:
        return GENERATOR_PROCEDURES.get(self.base_name)

    @property
    def is_adaptive(self) -> bool:
        return self.params.is_adaptive

    def lam(self) -> float:
        """Cap lambda of the schedule (also the Storey tuning parameter when adaptive)"""
        if self.params.lam is not None:
            return self.params.lam
        if self.is_adaptive or self.family in (GeneratorFamily.W3_BLANCHARD_ROQUAIN, GeneratorFamily.W4_COMBINED):
            return settings.DEFAULT_LAMBDA
        return 1.0

    def k(self, m: int) -> int:
        k = m if self.params.k is None else self.params.k
        if k > m:
            raise DomainError(f"k={k} exceeds m={m}")
        return k

    def kappa(self, m: int) -> int:
        if self.params.kappa is not None:
            return self.params.kappa
        return min(self.k(m), m - 1)

    def clamp(self, m: int) -> Tuple[float, float]:
        """(C, delta) of the m0 clamp; (1, 1) for deterministic procedures"""
        if not self.is_adaptive:
            return 1.0, 1.0
        if self.params.clamp == "natural":
            return storey_range(m, self.lam())
        C = settings.DEFAULT_C if self.params.C is None else self.params.C
        delta = settings.DEFAULT_DELTA if self.params.delta is None else self.params.delta
        if (self.params.C is None or self.params.delta is None) and not self._clamp_warned:
            logger.warning(f"{self.name}: sparsity clamp not fully specified, using C={C}, delta={delta}")
            self._clamp_warned = True
        return C, delta

    def spec(self, m: int) -> GeneratorSpec:
        family = self.family
        if family is None:
            raise UnknownProcedureError(f"{self.name!r} is not generator based")
        capped = family in (GeneratorFamily.W3_BLANCHARD_ROQUAIN, GeneratorFamily.W4_COMBINED)
        return GeneratorSpec(family=family, alpha=self.alpha, lam=self.lam() if capped else 1.0, m=m)

    @property
    def m0_mode(self) -> str:
        return "adaptive" if self.is_adaptive else "deterministic"

    def truncation(self, m: int) -> TruncationConfig:
        C, delta = self.clamp(m)
        return TruncationConfig(k=self.k(m), m0_mode=self.m0_mode, C=C, delta=delta)

    # -- schedules ------------------------------------------------------------

    def _generator_schedule(self, p: PValueSet) -> CriticalSchedule:
        m = p.m
        spec, k, lam = self.spec(m), self.k(m), self.lam()
        if self.is_adaptive:
            C, delta = self.clamp(m)
            estimate = estimate_m0(p, EstimatorConfig(kind="storey", lam=lam, C=C, delta=delta))
            base = adaptive_schedule(spec, m, k, lam, estimate)
        else:
            base = deterministic_schedule(spec, m, k, lam)
        if self.params.correction == "none":
            return base
        regime = "BI" if self.params.correction == "bi" else "dependence"
        factors = correction_factors(spec, m, regime, self.truncation(m), lam)
        return corrected_schedule(base, factors.Ck, factors.Dk)

    def _fixed_schedule(self, m: int) -> CriticalSchedule:
        if m not in self._fixed:
            alpha = self.alpha
            if self.name == "by":
                schedule = by_schedule(m, alpha)
            elif self.name == "bonferroni":
                schedule = bonferroni_schedule(m, alpha)
            elif self.name == "bh-k":
                schedule = truncated_bh_schedule(m, self.k(m), alpha)
            elif self.name == "sp-k":
                schedule = sp_schedule(m, self.k(m), alpha)
            else:
                schedule = self._generator_schedule(PValueSet.trusted([0.0] * m))
            self._fixed[m] = schedule
        return self._fixed[m]

    @property
    def data_dependent(self) -> bool:
        return self.is_adaptive or self.name == "es-k"

    def schedule(self, p: PValueSet) -> CriticalSchedule:
        if self.name == "es-k":
            if self.params.correction == "dependence":
                return early_stop_corrected_schedule(p, self.kappa(p.m), self.k(p.m), self.alpha)
            return early_stop_schedule(p, self.kappa(p.m), self.alpha)
        if self.is_adaptive:
            return self._generator_schedule(p)
        return self._fixed_schedule(p.m)

    def __call__(self, p: PValueSet) -> RejectionResult:
        return run_step(p, self.schedule(p), self.params.mode)

    # -- levels and bounds ----------------------------------------------------

    def nominal_level(self, m: int) -> float:
        """alpha, or alpha/C for an uncorrected sparsity-clamped adaptive test"""
        if self.is_adaptive and self.params.clamp == "sparsity" and self.params.correction == "none":
            C, _ = self.clamp(m)
            return self.alpha / C
        return self.alpha

    def _corrected_report(self, m0: int, m: int, regime: str) -> BoundReport:
        return BoundReport(
            value=m0 / m * self.alpha,
            applicable=True,
            condition_detail=f"schedule divided by Ck*Dk for {regime}",
            source=f"corrected-{regime}",
        )

    def _generator_bounds(self, m: int, m0: int, regime: str) -> BoundReport:
        spec, k, lam = self.spec(m), self.k(m), self.lam()
        C, delta = self.clamp(m)
        if regime == "BI":
            Ck = procedure_correction_sup(spec, k, m, C, delta, self.m0_mode, lam)
            return bounds.bound_generator_bi(m0, m, C, Ck, self.alpha, self.m0_mode, restricted=True)
        if self.is_adaptive:
            return bounds.bound_generator_dep_adaptive(m0, m, spec, k, C, delta, lam)
        return bounds.bound_generator_dep_det(m0, m, spec, k, lam)

    def reference_bound(self, scenario: Scenario) -> Optional[BoundReport]:
        """The bound a Monte-Carlo FDR estimate under this scenario is checked against"""
        m, m0 = scenario.m, scenario.m0
        regime = "BI" if scenario.model == "BI" else "dependence"
        name, alpha = self.name, self.alpha
        correction = self.params.correction

        if name == "bonferroni":
            return bounds.bound_bhk_dependence(m0, m, 1, alpha)
        if name == "by":
            return bounds.bound_bhk_dependence(m0, m, m, alpha)
        if name == "bh-k":
            return bounds.bound_bhk_dependence(m0, m, self.k(m), alpha)
        if name == "sp-k":
            return bounds.bound_sp(m0, m, self.k(m), alpha, regime)
        if name == "es-k":
            if correction == "dependence":
                return bounds.bound_es_dependence(m0, m, alpha)
            if regime == "BI":
                return bounds.bound_es_bi(m0, m, alpha)
            # ES values never exceed the BH values, whose marginal bound applies
            bh = deterministic_schedule(GeneratorSpec(family=GeneratorFamily.W1_BH, alpha=alpha), m, m)
            return bounds.doehler_bound_uniform(bh, m0, m)

        if correction == "dependence" or (correction == "bi" and regime == "BI"):
            return self._corrected_report(m0, m, correction)
        if (name == "adaptive-bh" and scenario.model == "extreme_dependence"
                and correction == "none" and self.k(m) == m):
            lam = self.lam()
            if self.params.clamp == "natural":
                return bounds.extreme_dep_fdr(m0, m, alpha, lam, "storey")
            C, _ = self.clamp(m)
            return bounds.extreme_dep_fdr(m0, m, alpha, lam, "sparsity", C)

        report = self._generator_bounds(m, m0, regime)
        if correction == "none":
            return report
        factor = self._correction_product(m, "BI")
        return _scaled_report(report, factor)

    def _correction_product(self, m: int, regime: str) -> float:
        factors = correction_factors(self.spec(m), m, regime, self.truncation(m), self.lam())
        return factors.product

    def bounds_for(self, m: int, m0: int) -> List[BoundReport]:
        """Every bound known for this procedure at (m, m0), both dependence regimes"""
        name, alpha = self.name, self.alpha
        if name == "bonferroni":
            reports = [bounds.bound_bhk_bi(m0, m, 1, alpha), bounds.bound_bhk_dependence(m0, m, 1, alpha)]
        elif name == "by":
            reports = [bounds.bound_bhk_bi(m0, m, m, alpha), bounds.bound_bhk_dependence(m0, m, m, alpha)]
        elif name == "bh-k":
            k = self.k(m)
            reports = [
                bounds.bound_bhk_bi(m0, m, k, alpha),
                bounds.bound_bhk_dependence(m0, m, k, alpha),
                bounds.doehler_bound_uniform(truncated_bh_schedule(m, k, alpha), m0, k),
            ]
        elif name == "sp-k":
            k = self.k(m)
            reports = [bounds.bound_sp(m0, m, k, alpha, "BI"), bounds.bound_sp(m0, m, k, alpha, "dependence")]
        elif name == "es-k":
            reports = [bounds.bound_es_bi(m0, m, alpha), bounds.bound_es_dependence(m0, m, alpha)]
        else:
            reports = [self._generator_bounds(m, m0, "BI"), self._generator_bounds(m, m0, "dependence")]
            if name == "bh" and self.k(m) == m:
                reports.insert(0, bounds.bound_bh_bi(m0, m, alpha))
                reports.insert(1, bounds.bound_by_dependence(m0, m, alpha))
            if self.family == GeneratorFamily.W4_COMBINED and not self.is_adaptive:
                reports.insert(0, bounds.bound_w4_bi(m, alpha, self.lam(), m0))
            if name == "adaptive-bh" and self.k(m) == m:
                lam = self.lam()
                if self.params.clamp == "natural":
                    reports.append(bounds.extreme_dep_fdr(m0, m, alpha, lam, "storey"))
                else:
                    reports.append(bounds.extreme_dep_fdr(m0, m, alpha, lam, "sparsity", self.clamp(m)[0]))
            if self.params.correction != "none":
                reports.append(self._corrected_report(m0, m, self.params.correction))
        return reports

    def _marginal_schedule(self, m: int) -> CriticalSchedule:
        if self.data_dependent:
            # data-dependent values never exceed the plain BH line
            return deterministic_schedule(GeneratorSpec(family=GeneratorFamily.W1_BH, alpha=self.alpha), m, m)
        return self._fixed_schedule(m)

    def bound(self, bound_id: str, m: int, m0: int) -> BoundReport:
        """One bound by identifier, its arguments taken from this procedure"""
        alpha, k = self.alpha, self.k(m)
        counts = {"m0": m0, "m": m}
        if bound_id in ("bh-bi", "by-dependence", "es-bi", "es-dependence"):
            params = {**counts, "alpha": alpha}
        elif bound_id in ("bhk-bi", "bhk-dependence", "sp-bi", "sp-dependence"):
            params = {**counts, "k": k, "alpha": alpha}
        elif bound_id == "w4-bi":
            params = {**counts, "alpha": alpha, "lam": self.lam()}
        elif bound_id == "ck-bi":
            truncation = self.truncation(m)
            Ck = procedure_correction_sup(self.spec(m), k, m, truncation.C, truncation.delta,
                                          truncation.m0_mode, self.lam())
            params = {**counts, "C": truncation.C, "Ck": Ck, "alpha": alpha, "mode": truncation.m0_mode}
        elif bound_id == "det-dependence":
            params = {**counts, "spec": self.spec(m), "k": k, "lam": self.lam()}
        elif bound_id == "adaptive-dependence":
            C, delta = self.clamp(m)
            params = {**counts, "spec": self.spec(m), "k": k, "C": C, "delta": delta, "lam": self.lam()}
        elif bound_id == "marginal":
            params = {"schedule": self._marginal_schedule(m), "m0": m0, "k": k}
        elif bound_id == "extreme-storey":
            params = {**counts, "alpha": alpha, "lam": self.lam()}
        elif bound_id == "extreme-sparsity":
            params = {**counts, "alpha": alpha, "lam": self.lam(), "C": self.clamp(m)[0]}
        else:
            params = {}
        return bounds.compute_bound(bound_id, **params)


def _scaled_report(report: BoundReport, factor: float) -> BoundReport:
    """The same bound for a schedule divided by factor"""
    extras = dict(report.extras)
    applicable = report.applicable
    margin = report.margin
    for key in ("mu", "condition"):
        if key in extras:
            extras[key] = extras[key] / factor
            applicable = extras[key] < 1
            margin = 1.0 - extras[key]
    return report.model_copy(update={
        "value": report.value / factor,
        "sharper_value": None if report.sharper_value is None else report.sharper_value / factor,
        "applicable": applicable,
        "margin": margin,
        "extras": extras,
        "source": f"{report.source}/scaled",
    })


def get_procedure(params: ProcedureParams) -> Procedure:
    return Procedure(params)


def sweep_k(p: PValueSet, alpha: float, k_min: int = 1, k_max: Optional[int] = None) -> SweepResult:
    """
    R of BH(k) and of the corrected ES(kappa = k) for k in [k_min, k_max],
    with the BY and Bonferroni reference counts. ES is undefined at k = m.
    """
    m = p.m
    k_max = m if k_max is None else k_max
    if not 1 <= k_min <= k_max <= m:
        raise DomainError(f"need 1 <= k_min <= k_max <= m, got k_min={k_min}, k_max={k_max}, m={m}")

    rows: List[SweepRow] = []
    for k in range(k_min, k_max + 1):
        R_bh = step_up(p, truncated_bh_schedule(m, k, alpha)).R
        R_es = None
        if k < m:
            R_es = step_up(p, early_stop_corrected_schedule(p, k, k, alpha)).R
        rows.append(SweepRow(k=k, R_BHk=R_bh, R_ESk=R_es))

    result = SweepResult(
        m=m,
        alpha=alpha,
        rows=rows,
        R_BY=step_up(p, by_schedule(m, alpha)).R,
        R_Bonferroni=step_up(p, bonferroni_schedule(m, alpha)).R,
    )
    logger.info(f"Swept k={k_min}..{k_max} over m={m}: R_BY={result.R_BY}, R_Bonferroni={result.R_Bonferroni}")
    return result
