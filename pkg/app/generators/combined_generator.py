# generators/combined_generator.py
"""
Capped rejection-curve generator g(x) = min((1 - lam) alpha x / (1 - x (1 - alpha)), lam).

FDR control under independence holds when alpha/(m-1) < lam < 1,
m >= (1 - alpha)/(alpha - alpha^2/4) and m >= (1 - lam) lam / alpha; see
independence_preconditions.
"""
from typing import Dict

import numpy as np

from .base_generator import BaseGenerator


class CombinedGenerator(BaseGenerator):
    capped = True

    @property
    def pole(self) -> float:
        return 1.0 / (1.0 - self.alpha)

    def _formula(self, x: np.ndarray) -> np.ndarray:
        return (1.0 - self.lam) * self.alpha * x / (1.0 - x * (1.0 - self.alpha))

    def _formula_derivative(self, x: np.ndarray) -> np.ndarray:
        return (1.0 - self.lam) * self.alpha / (1.0 - x * (1.0 - self.alpha)) ** 2

    def _formula_inverse(self, y: float) -> float:
        return y / ((1.0 - self.lam) * self.alpha + y * (1.0 - self.alpha))


def independence_preconditions(m: int, alpha: float, lam: float) -> Dict[str, float]:
    """
    Margins of the three sufficient conditions: lam_range (distance to the
    nearest end of the open interval (alpha/(m-1), 1)) must be positive,
    the two sample-size margins non-negative.
    """
    lower = alpha / (m - 1) if m > 1 else float("inf")
    return {
        "lam_range": min(lam - lower, 1.0 - lam),
        "m_vs_alpha": m - (1.0 - alpha) / (alpha - alpha ** 2 / 4.0),
        "m_vs_lam": m - (1.0 - lam) * lam / alpha,
    }
