"""
Uniform grids and eigenpairs
Discretisation of [-a, a], trapezoid norms, sign convention
"""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.integrate import trapezoid

from ..errors import DegenerateInputError, GridMismatchError, InvalidParameterError
from ..potential.walled import WalledPotential

logger = logging.getLogger(__name__)

DEFAULT_POINTS = 4001
MIN_POINTS = 3
ACCURATE_POINTS = 51


@dataclass(frozen=True, eq=False)
class Grid:
    """Uniform sampling of [-a, a] with potential samples"""
    potential: WalledPotential
    n_points: int
    dx: float
    x: np.ndarray
    v: np.ndarray

    @property
    def a(self) -> float:
        return self.potential.a

    @property
    def v_min(self) -> float:
        return float(np.min(self.v))

    def same_as(self, other: "Grid") -> bool:
        """Identical discretisation (same object or same samples)"""
        if self is other:
            return True
        return (self.n_points == other.n_points
                and self.dx == other.dx
                and np.array_equal(self.x, other.x)
                and np.array_equal(self.v, other.v))

    def integrate(self, values: np.ndarray) -> float:
        """Trapezoid integral over [-a, a]"""
        return float(trapezoid(values, dx=self.dx))


@dataclass(frozen=True, eq=False)
class Eigenpair:
    """Bound state: 1-based index, energy and normalised samples"""
    n: int
    energy: float
    psi: np.ndarray
    grid: Grid
    solver_tag: str
    sign_convention: str = "first interior sample positive"

    def inner(self, other: "Eigenpair") -> float:
        """Trapezoid inner product"""
        require_same_grid(self, other)
        return self.grid.integrate(self.psi * other.psi)


def require_same_grid(p1: Eigenpair, p2: Eigenpair):
    """Raise GridMismatchError unless both eigenpairs share a grid"""
    if not p1.grid.same_as(p2.grid):
        raise GridMismatchError("Eigenpairs are sampled on different grids",
                                {"n1": p1.n, "n2": p2.n,
                                 "points": (p1.grid.n_points, p2.grid.n_points),
                                 "a": (p1.grid.a, p2.grid.a)})


def _frozen(values: np.ndarray) -> np.ndarray:
    values = np.ascontiguousarray(values, dtype=float)
    values.setflags(write=False)
    return values


def build_grid(wp: WalledPotential, n_points: int = DEFAULT_POINTS) -> Grid:
    """
    Uniform grid on [-a, a] with odd n_points so that x = 0 is sampled
    Raises InvalidParameterError for even or too-small n_points
    """
    if isinstance(n_points, bool) or int(n_points) != n_points:
        raise InvalidParameterError("n_points must be an integer", {"n_points": n_points})
    n_points = int(n_points)
    if n_points < MIN_POINTS or n_points % 2 == 0:
        raise InvalidParameterError("n_points must be odd and at least 3",
                                    {"n_points": n_points})
    if n_points < ACCURATE_POINTS:
        logger.warning(f"Grid with {n_points} points is below the accuracy floor "
                       f"of {ACCURATE_POINTS}")

    a = wp.a
    dx = 2.0 * a / (n_points - 1)
    x = -a + dx * np.arange(n_points)
    x[0] = -a
    x[-1] = a
    x[(n_points - 1) // 2] = 0.0

    return Grid(potential=wp, n_points=n_points, dx=dx, x=_frozen(x), v=_frozen(wp.sample(x)))


def normalize_and_fix_sign(psi: np.ndarray, grid: Optional[Grid] = None,
                           dx: Optional[float] = None) -> np.ndarray:
    """
    Clamp the walls to zero, scale to unit trapezoid norm and make the
    first nonzero interior sample positive
    """
    if grid is None and dx is None:
        raise InvalidParameterError("normalize_and_fix_sign needs a grid or a spacing")
    spacing = grid.dx if grid is not None else float(dx)

    out = np.array(psi, dtype=float, copy=True)
    if len(out) >= 2:
        out[0] = 0.0
        out[-1] = 0.0

    nonzero = np.flatnonzero(out)
    if len(nonzero) == 0:
        raise DegenerateInputError("Cannot normalise an all-zero wavefunction",
                                   {"samples": len(out)})

    norm = float(np.sqrt(trapezoid(out * out, dx=spacing)))
    if out[nonzero[0]] < 0:
        norm = -norm
    out /= norm
    return out
