"""
Finite square well bound states from the matching equations
Independent oracle for the walled sweep: V = -v0 on |x| < b, 0 outside, hbar^2/2m = 1
"""

import logging
import math
from dataclasses import dataclass
from typing import List

from scipy.optimize import bisect

from ..errors import InvalidParameterError

logger = logging.getLogger(__name__)

ROOT_XTOL = 1e-14


@dataclass(frozen=True)
class SquareWellState:
    """One bound state: z = b*sqrt(E + v0)"""
    n: int
    parity: str
    z: float
    energy: float


def _even_matching(z: float, z0: float) -> float:
    # z tan z = sqrt(z0^2 - z^2), multiplied through by cos z
    return z * math.sin(z) - math.sqrt(max(z0 * z0 - z * z, 0.0)) * math.cos(z)


def _odd_matching(z: float, z0: float) -> float:
    # -z cot z = sqrt(z0^2 - z^2), multiplied through by sin z
    return z * math.cos(z) + math.sqrt(max(z0 * z0 - z * z, 0.0)) * math.sin(z)


def square_well_bound_states(v0: float, b: float) -> List[SquareWellState]:
    """
    All bound states of the infinite-domain square well, lowest first
    Segment i of width pi/2 in z holds at most one root: even parity for
    even i, odd parity for odd i
    """
    if not (v0 > 0 and math.isfinite(v0)) or not (b > 0 and math.isfinite(b)):
        raise InvalidParameterError("Square well needs v0 > 0 and b > 0", {"v0": v0, "b": b})

    z0 = b * math.sqrt(v0)
    states: List[SquareWellState] = []
    i = 0
    while i * math.pi / 2.0 < z0:
        lower = i * math.pi / 2.0
        upper = min((i + 1) * math.pi / 2.0, z0)
        matching = _even_matching if i % 2 == 0 else _odd_matching
        z = bisect(matching, lower, upper, args=(z0,), xtol=ROOT_XTOL, maxiter=500)
        energy = (z / b) ** 2 - v0
        if energy < 0.0:
            states.append(SquareWellState(n=len(states) + 1,
                                          parity="even" if i % 2 == 0 else "odd",
                                          z=float(z), energy=float(energy)))
        i += 1

    logger.debug(f"Square well v0={v0:g}, b={b:g}: {len(states)} bound state(s)")
    return states


def count_square_well_bound_states(v0: float, b: float) -> int:
    """Number of bound states, ceil(2 b sqrt(v0) / pi)"""
    return len(square_well_bound_states(v0, b))
