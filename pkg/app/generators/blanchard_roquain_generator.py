# generators/blanchard_roquain_generator.py
"""
Capped generator g(x) = min((1 - lam) alpha x / (1 + 1/m - x), lam)
"""
import numpy as np

from .base_generator import BaseGenerator


class BlanchardRoquainGenerator(BaseGenerator):
    capped = True

    @property
    def pole(self) -> float:
        return 1.0 + 1.0 / self.spec.m

    def _formula(self, x: np.ndarray) -> np.ndarray:
        return (1.0 - self.lam) * self.alpha * x / (self.pole - x)

    def _formula_derivative(self, x: np.ndarray) -> np.ndarray:
        return (1.0 - self.lam) * self.alpha * self.pole / (self.pole - x) ** 2

    def _formula_inverse(self, y: float) -> float:
        return y * self.pole / ((1.0 - self.lam) * self.alpha + y)
