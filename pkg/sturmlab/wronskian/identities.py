"""
Wronskian identities
W = psi1' psi2 - psi2' psi1 between eigenstates, its derivative identity
W' = (E2 - E1) psi1 psi2 and the integrated form over consecutive zeros
"""

import logging
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
from scipy.integrate import trapezoid

from ..config.app import get_tolerances
from ..errors import PreconditionError
from ..nodes.theorems import verify_interlacing, zero_intervals
from ..nodes.zeros import central_derivative
from ..solver.grid import Eigenpair, Grid, require_same_grid

logger = logging.getLogger(__name__)


@dataclass
class WronskianSeries:
    """Samples of psi1' psi2 - psi2' psi1 on a shared grid"""
    n1: int
    n2: int
    values: np.ndarray
    grid: Grid


@dataclass
class DerivativeIdentityReport:
    """Max interior residual of W' - (E2 - E1) psi1 psi2"""
    n1: int
    n2: int
    max_residual: float
    location: float
    dx: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.max_residual <= self.tolerance


@dataclass
class IntegralIntervalReport:
    """Both sides of the integrated identity on one zero interval of the lower state"""
    x_left: float
    x_right: float
    lhs: float
    rhs: float
    hump_sign: int
    witness: Optional[float] = None

    @property
    def residual(self) -> float:
        return abs(self.lhs - self.rhs)


@dataclass
class IntegralIdentityReport:
    """Per-interval integral identity with interlacing witnesses"""
    n1: int
    n2: int
    dx: float
    tolerance: float
    intervals: List[IntegralIntervalReport] = field(default_factory=list)

    @property
    def max_residual(self) -> float:
        return max((iv.residual for iv in self.intervals), default=0.0)

    @property
    def passed(self) -> bool:
        return self.max_residual <= self.tolerance

    @property
    def witnesses_present(self) -> bool:
        return all(iv.witness is not None for iv in self.intervals)


def _kinetic_scale(p1: Eigenpair, p2: Eigenpair) -> float:
    return max(p1.energy, p2.energy) - p1.grid.v_min


def wronskian_series(p1: Eigenpair, p2: Eigenpair) -> WronskianSeries:
    """Central differences inside, second-order one-sided differences at the walls"""
    require_same_grid(p1, p2)
    dx = p1.grid.dx
    d1 = central_derivative(p1.psi, dx)
    d2 = central_derivative(p2.psi, dx)
    return WronskianSeries(n1=p1.n, n2=p2.n, values=d1 * p2.psi - d2 * p1.psi, grid=p1.grid)


def check_derivative_identity(p1: Eigenpair, p2: Eigenpair,
                              scale: float = 1.0) -> DerivativeIdentityReport:
    """
    max over interior points of |dW/dx - (E2 - E1) psi1 psi2|
    scale multiplies the frozen tolerance
    """
    require_same_grid(p1, p2)
    if p1.n == p2.n:
        raise PreconditionError("Derivative identity needs two different states",
                                {"n1": p1.n, "n2": p2.n})

    grid = p1.grid
    series = wronskian_series(p1, p2)
    slope = central_derivative(series.values, grid.dx)
    target = (p2.energy - p1.energy) * p1.psi * p2.psi
    residual = np.abs(slope - target)[1:-1]

    if len(residual):
        worst = int(np.argmax(residual))
        max_residual, location = float(residual[worst]), float(grid.x[worst + 1])
    else:
        max_residual, location = 0.0, 0.0

    tolerance = scale * get_tolerances().derivative_identity(
        grid.dx, p2.energy - p1.energy, _kinetic_scale(p1, p2))
    report = DerivativeIdentityReport(n1=p1.n, n2=p2.n, max_residual=max_residual,
                                      location=location, dx=grid.dx, tolerance=tolerance)
    logger.debug(f"Derivative identity ({p1.n}, {p2.n}): residual {max_residual:.3e} "
                 f"at x={location:g}, tolerance {tolerance:.3e}")
    return report


def _partial_trapezoid(x: np.ndarray, f: np.ndarray, left: float, right: float) -> float:
    """Trapezoid integral of sampled f over [left, right] with interpolated end values"""
    inside = np.flatnonzero((x > left) & (x < right))
    xs = np.concatenate(([left], x[inside], [right]))
    fs = np.concatenate(([np.interp(left, x, f)], f[inside], [np.interp(right, x, f)]))
    return float(trapezoid(fs, xs))


def check_integral_identity(p1: Eigenpair, p2: Eigenpair,
                            scale: float = 1.0) -> IntegralIdentityReport:
    """
    On every consecutive-zero interval (x1, x2) of the lower state compare
    psi1'(x2) psi2(x2) - psi1'(x1) psi2(x1) with (E2 - E1) * integral of psi1 psi2

    Both sides are multiplied by the sign of psi1 on the interval so every hump
    reads positive; each interval also carries the interlacing witness.
    """
    if p1.n >= p2.n:
        raise PreconditionError("Integral identity needs the lower state first",
                                {"n1": p1.n, "n2": p2.n})
    require_same_grid(p1, p2)

    grid = p1.grid
    x = grid.x
    d1 = central_derivative(p1.psi, grid.dx)
    product = p1.psi * p2.psi
    delta_e = p2.energy - p1.energy
    interlacing = verify_interlacing(p1, p2)

    tolerance = scale * get_tolerances().integral_identity(grid.dx, delta_e, _kinetic_scale(p1, p2))
    report = IntegralIdentityReport(n1=p1.n, n2=p2.n, dx=grid.dx, tolerance=tolerance)

    for (left, right), witness in zip(zero_intervals(p1), interlacing.witnesses):
        lhs = (np.interp(right, x, d1) * np.interp(right, x, p2.psi)
               - np.interp(left, x, d1) * np.interp(left, x, p2.psi))
        rhs = delta_e * _partial_trapezoid(x, product, left, right)

        inside = np.flatnonzero((x > left) & (x < right))
        hump = p1.psi[inside] if len(inside) else np.zeros(1)
        sign = -1 if hump[int(np.argmax(np.abs(hump)))] < 0 else 1

        report.intervals.append(IntegralIntervalReport(
            x_left=float(left), x_right=float(right),
            lhs=float(sign * lhs), rhs=float(sign * rhs),
            hump_sign=sign, witness=witness))

    if not report.passed:
        logger.info(f"Integral identity ({p1.n}, {p2.n}): residual "
                    f"{report.max_residual:.3e} above {tolerance:.3e}")
    return report
