"""
Zero-structure theorems
Interlacing of zeros between eigenstates and alternation of independent same-energy solutions
"""

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from ..errors import PreconditionError
from ..solver.grid import Eigenpair, Grid, require_same_grid
from ..solver.numerov import numerov_integrate
from .zeros import central_derivative, find_nodes, interior_zeros

logger = logging.getLogger(__name__)

VERDICT_ALTERNATING = "alternating"
VERDICT_VIOLATED = "violated"
VERDICT_VACUOUS = "vacuous"


@dataclass
class InterlacingReport:
    """Zero intervals of the lower state and their witnesses from the higher state"""
    n1: int
    n2: int
    intervals_checked: List[Tuple[float, float]] = field(default_factory=list)
    witnesses: List[Optional[float]] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(w is not None for w in self.witnesses)

    @property
    def empty_intervals(self) -> List[Tuple[float, float]]:
        return [iv for iv, w in zip(self.intervals_checked, self.witnesses) if w is None]


@dataclass
class SeparationReport:
    """Interior zeros of u (u(-a)=0, u'(-a)=1) and w (w(-a)=1, w'(-a)=0) at one energy"""
    energy: float
    u_zeros: List[float]
    w_zeros: List[float]
    verdict: str
    violations: List[Tuple[float, float]] = field(default_factory=list)
    ties: int = 0                     # u/w zeros closer than dx, ordered by the Wronskian

    @property
    def passed(self) -> bool:
        return self.verdict != VERDICT_VIOLATED


def zero_intervals(pair: Eigenpair) -> List[Tuple[float, float]]:
    """Consecutive zeros of an eigenfunction, wall zeros included"""
    a = pair.grid.a
    zeros = [-a] + list(find_nodes(pair).positions) + [a]
    return list(zip(zeros[:-1], zeros[1:]))


def verify_interlacing(p1: Eigenpair, p2: Eigenpair) -> InterlacingReport:
    """
    Check that every pair of consecutive zeros of p1 (walls included)
    encloses at least one node of p2
    """
    if p1.n >= p2.n:
        raise PreconditionError("Interlacing needs the lower state first",
                                {"n1": p1.n, "n2": p2.n})
    require_same_grid(p1, p2)

    nodes = find_nodes(p2).positions
    report = InterlacingReport(n1=p1.n, n2=p2.n)
    for left, right in zero_intervals(p1):
        witness = next((x for x in nodes if left < x < right), None)
        report.intervals_checked.append((left, right))
        report.witnesses.append(witness)

    if not report.passed:
        logger.info(f"Interlacing ({p1.n}, {p2.n}): no node in {report.empty_intervals}")
    return report


def _seed_slope_free(grid: Grid, energy: float) -> Tuple[float, float]:
    """Numerov start for w(-a)=1, w'(-a)=0 from the Taylor series of cosh/cos"""
    q = (grid.v[0] - energy) * grid.dx * grid.dx
    return 1.0, 1.0 + q / 2.0 + q * q / 24.0


# u w' - u' w at x = -a for the seeds above; conserved along x
SEED_WRONSKIAN = -1.0


def _order_zeros(grid: Grid, u: np.ndarray, w: np.ndarray, u_zeros: List[float],
                 w_zeros: List[float]) -> Tuple[List[Tuple[float, str]], int]:
    """
    Merge the zeros of u and w into one sequence

    A u zero and a w zero closer than dx are a numerical tie: once both solutions
    have grown through a forbidden region their independent part is below round-off.
    At a zero of u the Wronskian gives w = -W / u', so w has already crossed
    (x_w < x_u) iff -sign(W) sign(u'(x_u)) equals the sign of w'(x_w).
    Returns the ordered (position, label) list and the number of ties resolved.
    """
    du = central_derivative(u, grid.dx)
    dw = central_derivative(w, grid.dx)
    keyed = []
    taken = set()
    ties = 0
    for xu in u_zeros:
        near = [(abs(xw - xu), j) for j, xw in enumerate(w_zeros)
                if j not in taken and abs(xw - xu) < grid.dx]
        if not near:
            keyed.append(((xu, 0), xu, "u"))
            continue
        _, j = min(near)
        taken.add(j)
        ties += 1
        xw = w_zeros[j]
        slope_u = float(np.interp(xu, grid.x, du))
        slope_w = float(np.interp(xw, grid.x, dw))
        w_first = -np.sign(SEED_WRONSKIAN) * np.sign(slope_u) == np.sign(slope_w)
        center = 0.5 * (xu + xw)
        keyed.append(((center, 1 if w_first else 0), xu, "u"))
        keyed.append(((center, 0 if w_first else 1), xw, "w"))
    keyed.extend(((xw, 0), xw, "w") for j, xw in enumerate(w_zeros) if j not in taken)
    keyed.sort(key=lambda item: item[0])
    return [(x, label) for _, x, label in keyed], ties


def verify_separation(grid: Grid, E: float) -> SeparationReport:
    """
    Integrate two independent solutions at E (not necessarily an eigenvalue)
    and check that their interior zeros strictly alternate
    """
    energy = float(E)
    u = numerov_integrate(grid, energy)
    w = numerov_integrate(grid, energy, start=_seed_slope_free(grid, energy))

    u_zeros = interior_zeros(grid.x, u, grid.dx)
    w_zeros = interior_zeros(grid.x, w, grid.dx)

    if len(u_zeros) < 2 or len(w_zeros) < 2:
        logger.debug(f"Separation at E={energy!r} vacuous: "
                     f"{len(u_zeros)} u zero(s), {len(w_zeros)} w zero(s)")
        return SeparationReport(energy=energy, u_zeros=u_zeros, w_zeros=w_zeros,
                                verdict=VERDICT_VACUOUS)

    merged, ties = _order_zeros(grid, u, w, u_zeros, w_zeros)
    violations = [(merged[i][0], merged[i + 1][0]) for i in range(len(merged) - 1)
                  if merged[i][1] == merged[i + 1][1]]
    if ties:
        logger.debug(f"Separation at E={energy!r}: {ties} u/w tie(s) ordered by the Wronskian")

    verdict = VERDICT_VIOLATED if violations else VERDICT_ALTERNATING
    if violations:
        logger.info(f"Separation at E={energy!r}: {len(violations)} non-alternating pair(s)")
    return SeparationReport(energy=energy, u_zeros=u_zeros, w_zeros=w_zeros,
                            verdict=verdict, violations=violations, ties=ties)
