# generators/aorc_generator.py
"""
Generator of the asymptotically optimal rejection curve,
g(x) = alpha x / (1 - x (1 - alpha)).

g(1) = 1, so a schedule with k = m needs its last coefficient replaced
(see schedule_service.deterministic_schedule).
"""
import numpy as np

from .base_generator import BaseGenerator


class AORCGenerator(BaseGenerator):

    @property
    def pole(self) -> float:
        return 1.0 / (1.0 - self.alpha)

    def _formula(self, x: np.ndarray) -> np.ndarray:
        return self.alpha * x / (1.0 - x * (1.0 - self.alpha))

    def _formula_derivative(self, x: np.ndarray) -> np.ndarray:
        return self.alpha / (1.0 - x * (1.0 - self.alpha)) ** 2

    def _formula_inverse(self, y: float) -> float:
        return y / (self.alpha + y * (1.0 - self.alpha))
