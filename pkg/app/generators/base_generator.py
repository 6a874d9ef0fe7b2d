# generators/base_generator.py
"""
Base class for the generating functions g that produce critical values
alpha_{j:m} = g(j/m)
"""
from abc import ABC, abstractmethod
from typing import Optional
import logging

import numpy as np

from ..config import settings
from ..schemas.schedule_schemas import GeneratorSpec
from ..services.errors import DomainError

logger = logging.getLogger(__name__)


class BaseGenerator(ABC):
    """Non-decreasing, left-continuous g with g(0) = 0, optionally capped at lambda"""

    capped: bool = False

    def __init__(self, spec: GeneratorSpec):
        self.spec = spec
        self.alpha = spec.alpha
        self.lam = spec.lam
        self.scale = spec.scale

    @property
    def pole(self) -> float:
        """Argument where the uncapped formula blows up (inf when it never does)."""
        return float("inf")

    @abstractmethod
    def _formula(self, x: np.ndarray) -> np.ndarray:
        """Uncapped, unscaled g on arguments below the pole"""
        pass

    @abstractmethod
    def _formula_derivative(self, x: np.ndarray) -> np.ndarray:
        """Derivative of the uncapped, unscaled formula"""
        pass

    @abstractmethod
    def _formula_inverse(self, y: float) -> float:
        """Solve formula(x) = y for x (uncapped, unscaled)"""
        pass

    def extended(self, x) -> np.ndarray:
        """
        g on [0, inf): past the pole the formula is +inf (and so the cap for
        capped families). Used for adaptive arguments j/m0_hat > 1.
        """
        x = np.asarray(x, dtype=float)
        below = x < self.pole
        safe = np.where(below, x, 0.0)
        values = np.where(below, self.scale * self._formula(safe), np.inf)
        if self.capped:
            values = np.minimum(values, self.lam)
        return values

    def evaluate(self, x: float) -> float:
        if not 0.0 <= x <= 1.0:
            raise DomainError(f"generator argument {x!r} outside [0, 1]")
        return float(self.extended(x))

    def derivative(self, x) -> np.ndarray:
        """g' of the uncapped part; zero where the cap binds"""
        x = np.asarray(x, dtype=float)
        safe = np.where(x < self.pole, x, 0.0)
        slope = self.scale * self._formula_derivative(safe)
        if self.capped:
            slope = np.where(self.extended(x) < self.lam, slope, 0.0)
        return slope

    def inverse(self, y: float) -> float:
        """Right-continuous inverse sup{x in [0, 1] : g(x) <= y}"""
        if y < 0:
            raise DomainError(f"inverse argument {y!r} is negative")
        if self.capped and y >= self.lam:
            return 1.0
        x = self._closed_inverse(y)
        if x is None:
            logger.debug(f"{type(self).__name__}: closed inverse failed at y={y!r}, bisecting")
            x = self.bisect_inverse(y)
        return x

    def _closed_inverse(self, y: float) -> Optional[float]:
        x = self._formula_inverse(y / self.scale)
        if not np.isfinite(x) or x < 0:
            return None
        x = min(x, 1.0)
        if float(self.extended(x)) > y * (1.0 + 1e-12) + 1e-300:
            return None
        return x

    def bisect_inverse(self, y: float, tol: Optional[float] = None) -> float:
        """Bisection for sup{x in [0, 1] : g(x) <= y} to absolute tolerance tol"""
        tol = settings.INVERSE_TOLERANCE if tol is None else tol
        if float(self.extended(1.0)) <= y:
            return 1.0
        lo, hi = 0.0, 1.0
        while hi - lo > tol:
            mid = 0.5 * (lo + hi)
            if float(self.extended(mid)) <= y:
                lo = mid
            else:
                hi = mid
        return lo
