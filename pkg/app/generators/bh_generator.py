# generators/bh_generator.py
"""
Linear generator g(x) = alpha x (Benjamini-Hochberg critical values)
"""
import numpy as np

from .base_generator import BaseGenerator


class BHGenerator(BaseGenerator):

    def _formula(self, x: np.ndarray) -> np.ndarray:
        return self.alpha * x

    def _formula_derivative(self, x: np.ndarray) -> np.ndarray:
        return np.full_like(x, self.alpha, dtype=float)

    def _formula_inverse(self, y: float) -> float:
        return y / self.alpha
