# services/step_engine.py
"""
Order statistics and the step-up / step-down evaluation engine.

All functions are pure; ties among p-values are ordered by original index
(stable sort), and a p-value equal to its critical value is rejected.
"""
from typing import List, Literal, Tuple

import numpy as np

from ..schemas.pvalue_schemas import PValueSet, RejectionResult
from ..schemas.schedule_schemas import CriticalSchedule
from .errors import InternalConsistencyError, ScheduleMismatchError

StepMode = Literal["su", "sd"]


def order_statistics(p: PValueSet) -> List[Tuple[float, int]]:
    """Return (value, original 1-based index) pairs sorted ascending, ties by index."""
    arr = p.as_array()
    order = np.argsort(arr, kind="stable")
    return [(float(arr[i]), int(i) + 1) for i in order]


def _prepare(p: PValueSet, s: CriticalSchedule) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    if s.m != p.m:
        raise ScheduleMismatchError(f"schedule has {s.m} critical values for {p.m} p-values")
    arr = p.as_array()
    order = np.argsort(arr, kind="stable")
    return arr, order, s.as_array()


def _diagnostics(sorted_p: np.ndarray, crit: np.ndarray, R: int) -> dict:
    diag = {}
    if R > 0:
        diag["p_R"] = float(sorted_p[R - 1])
    if R < len(sorted_p):
        diag["p_next"] = float(sorted_p[R])
        diag["alpha_next"] = float(crit[R])
    return diag


def step_up(p: PValueSet, s: CriticalSchedule) -> RejectionResult:
    """R = max{j : p_{j:m} <= alpha_{j:m}}; rejects every p_i <= alpha_{R:m}."""
    arr, order, crit = _prepare(p, s)
    sorted_p = arr[order]
    crossings = np.flatnonzero(sorted_p <= crit)
    R = int(crossings[-1]) + 1 if crossings.size else 0
    if R == 0:
        return RejectionResult(R=0, threshold=0.0, rejected=frozenset(), mode="step-up",
                               diagnostics=_diagnostics(sorted_p, crit, 0))

    threshold = float(crit[R - 1])
    rejected = frozenset((np.flatnonzero(arr <= threshold) + 1).tolist())
    if len(rejected) != R:
        raise InternalConsistencyError(
            f"step-up count mismatch: {len(rejected)} p-values <= {threshold!r} but R = {R}"
        )
    return RejectionResult(R=R, threshold=threshold, rejected=rejected, mode="step-up",
                           diagnostics=_diagnostics(sorted_p, crit, R))


def step_down(p: PValueSet, s: CriticalSchedule) -> RejectionResult:
    """R = longest prefix with p_{i:m} <= alpha_{i:m}; rejects the R smallest p-values."""
    arr, order, crit = _prepare(p, s)
    sorted_p = arr[order]
    failures = np.flatnonzero(sorted_p > crit)
    R = int(failures[0]) if failures.size else p.m
    threshold = float(crit[R - 1]) if R else 0.0
    rejected = frozenset((order[:R] + 1).tolist())
    return RejectionResult(R=R, threshold=threshold, rejected=rejected, mode="step-down",
                           diagnostics=_diagnostics(sorted_p, crit, R))


def run_step(p: PValueSet, s: CriticalSchedule, mode: StepMode = "su") -> RejectionResult:
    if mode == "su":
        return step_up(p, s)
    if mode == "sd":
        return step_down(p, s)
    raise ValueError(f"Unknown step mode: {mode}")
