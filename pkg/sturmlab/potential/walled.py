"""
Walled potential family V_a(x)
Base potential restricted to [-a, a] with hard walls as Dirichlet conditions
"""

import math
from dataclasses import dataclass

import numpy as np

from ..errors import DomainError, InvalidParameterError
from .catalog import ArrayLike, PotentialSpec, evaluate


@dataclass(frozen=True)
class WalledPotential:
    """V_a: the base potential on [-a, a], psi(-a) = psi(a) = 0"""
    base: PotentialSpec
    a: float

    def __post_init__(self):
        if not (self.a > 0 and math.isfinite(self.a)):
            raise InvalidParameterError("Wall half-width must be positive", {"a": self.a})

    def contains(self, x: ArrayLike) -> bool:
        return bool(np.all(np.abs(np.asarray(x, dtype=float)) <= self.a))

    def evaluate(self, x: ArrayLike) -> ArrayLike:
        """Interior value; raises DomainError outside [-a, a]"""
        if not self.contains(x):
            raise DomainError("Query outside the walled domain", {"a": self.a})
        return evaluate(self.base, x)

    def sample(self, x: np.ndarray) -> np.ndarray:
        """
        Grid samples of V_a
        Point values, except that the grid cell holding a jump of the base potential
        gets the cell average, which keeps the finite-difference operator second order
        (the Numerov march samples point values and crosses jumps on its own)
        """
        x = np.asarray(x, dtype=float)
        values = np.asarray(self.evaluate(x), dtype=float).copy()
        if len(x) < 2:
            return values

        dx = (x[-1] - x[0]) / (len(x) - 1)
        for jump in self.base.jumps():
            if abs(jump.x) >= self.a:
                continue
            i = int(round((jump.x - x[0]) / dx))
            cell_left = x[0] + (i - 0.5) * dx
            left_fraction = min(max((jump.x - cell_left) / dx, 0.0), 1.0)
            values[i] = left_fraction * jump.left + (1.0 - left_fraction) * jump.right
        return values


def wall(spec: PotentialSpec, a: float) -> WalledPotential:
    """Build V_a from a base potential"""
    return WalledPotential(spec, float(a))
