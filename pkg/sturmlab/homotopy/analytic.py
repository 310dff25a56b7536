"""
Infinite-well reference states
Exact eigenpairs of the walled zero potential on [-eps, eps]
"""

import math

import numpy as np

from ..errors import InvalidParameterError
from ..potential.catalog import PotentialSpec
from ..potential.walled import wall
from ..solver.grid import DEFAULT_POINTS, Eigenpair, build_grid, normalize_and_fix_sign

SOLVER_TAG = "analytic"


def infinite_well_energy(n: int, eps: float) -> float:
    """E_n = n^2 pi^2 / (4 eps^2)"""
    return (n * math.pi / (2.0 * eps)) ** 2


def analytic_small_a(n: int, eps: float, n_points: int = DEFAULT_POINTS) -> Eigenpair:
    """
    State n of the infinite well of half-width eps, sampled on the solver grid
    Odd n are cosines, even n are sines, so state n has n-1 nodes
    """
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise InvalidParameterError("State index must be an integer >= 1", {"n": n})
    if not (eps > 0 and math.isfinite(eps)):
        raise InvalidParameterError("Well half-width must be positive", {"eps": eps})
    n = int(n)

    grid = build_grid(wall(PotentialSpec.zero(), eps), n_points)
    phase = n * math.pi / (2.0 * eps) * grid.x
    psi = np.cos(phase) if n % 2 == 1 else np.sin(phase)

    return Eigenpair(n=n, energy=infinite_well_energy(n, eps),
                     psi=normalize_and_fix_sign(psi, grid), grid=grid, solver_tag=SOLVER_TAG)
