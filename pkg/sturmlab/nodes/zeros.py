"""
Interior zeros of eigenfunctions
Node location by sign change + linear refinement, node-count check, critical-touch detection
"""

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from ..config.app import get_tolerances
from ..solver.grid import Eigenpair

logger = logging.getLogger(__name__)


@dataclass
class NodeSet:
    """Sorted interior nodes of one eigenfunction"""
    n: int
    positions: List[float]
    refinement_tol: float

    @property
    def count(self) -> int:
        return len(self.positions)


@dataclass
class NodeCountResult:
    """Outcome of the n-1 node check"""
    n: int
    expected: int
    found: int
    positions: List[float] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.found == self.expected

    @property
    def message(self) -> str:
        return f"state {self.n}: {self.found} node(s), expected {self.expected}"


def sign_crossings(x: np.ndarray, values: np.ndarray,
                   floor: float = 0.0) -> List[Tuple[int, int, float]]:
    """
    Strict sign changes between consecutive samples whose magnitude exceeds floor
    Returns (left index, right index, interpolated zero) for each crossing
    """
    values = np.asarray(values, dtype=float)
    significant = np.flatnonzero(np.abs(values) > floor)
    if len(significant) < 2:
        return []

    negative = np.signbit(values[significant])
    change = np.flatnonzero(negative[1:] != negative[:-1])
    crossings = []
    for c in change:
        i, j = int(significant[c]), int(significant[c + 1])
        vi, vj = values[i], values[j]
        crossings.append((i, j, float(x[i] + (x[j] - x[i]) * vi / (vi - vj))))
    return crossings


def _is_jitter(values: np.ndarray, first: Tuple[int, int, float],
               second: Tuple[int, int, float], min_separation: float, jitter: float) -> bool:
    """
    Two consecutive crossings are a touch when they are close and the samples
    between them are tiny next to the samples bracketing the pair
    """
    if second[2] - first[2] > min_separation:
        return False
    hump = float(np.max(np.abs(values[first[1]:second[0] + 1])))
    outer = max(abs(float(values[first[0]])), abs(float(values[second[1]])))
    return hump <= jitter * outer


def _merge_clusters(values: np.ndarray, crossings: List[Tuple[int, int, float]],
                    min_separation: float, jitter: float) -> List[float]:
    """Collapse chains of jitter crossings: odd chain -> median, even -> none"""
    merged: List[float] = []
    cluster: List[Tuple[int, int, float]] = []
    for crossing in crossings:
        if cluster and _is_jitter(values, cluster[-1], crossing, min_separation, jitter):
            cluster.append(crossing)
            continue
        if cluster and len(cluster) % 2 == 1:
            merged.append(cluster[len(cluster) // 2][2])
        cluster = [crossing]
    if cluster and len(cluster) % 2 == 1:
        merged.append(cluster[len(cluster) // 2][2])
    return merged


def interior_zeros(x: np.ndarray, values: np.ndarray, dx: float,
                   floor: float = 0.0) -> List[float]:
    """
    Deduplicated interior zeros of sampled data (wall samples excluded)
    Full-amplitude alternations are kept however close; only near-zero wiggles merge
    """
    interior = np.asarray(values, dtype=float)[1:-1]
    crossings = sign_crossings(x[1:-1], interior, floor)
    return _merge_clusters(interior, crossings, 2.0 * dx, get_tolerances().jitter)


def find_nodes(pair: Eigenpair) -> NodeSet:
    """
    Interior nodes of an eigenfunction, refined by linear interpolation
    Samples below the noise floor are treated as zeros; wall zeros are never nodes
    """
    grid = pair.grid
    floor = get_tolerances().noise_floor * float(np.max(np.abs(pair.psi)))
    positions = interior_zeros(grid.x, pair.psi, grid.dx, floor)
    return NodeSet(n=pair.n, positions=positions, refinement_tol=grid.dx * grid.dx)


def verify_node_count(pair: Eigenpair) -> NodeCountResult:
    """True iff the n-th eigenfunction has exactly n-1 nodes"""
    nodes = find_nodes(pair)
    result = NodeCountResult(n=pair.n, expected=pair.n - 1, found=nodes.count,
                             positions=list(nodes.positions))
    if not result.passed:
        logger.info(f"Node count mismatch ({pair.solver_tag}): {result.message}")
    return result


def central_derivative(psi: np.ndarray, dx: float) -> np.ndarray:
    """psi' by central differences, second-order one-sided at the walls"""
    psi = np.asarray(psi, dtype=float)
    if len(psi) < 3:
        return np.zeros_like(psi)
    return np.gradient(psi, dx, edge_order=2)


def detect_critical_touch(pair: Eigenpair, tol: Optional[float] = None) -> List[float]:
    """
    Interior points where psi and psi' vanish together (relative to their maxima)
    Candidates are discrete local minima of |psi| inside the support; an all-zero
    input flags every interior point
    """
    tol = get_tolerances().critical_touch if tol is None else tol
    grid = pair.grid
    psi = np.asarray(pair.psi, dtype=float)
    if len(psi) < 3:
        return []

    magnitude = np.abs(psi)
    peak = float(np.max(magnitude))
    if peak == 0.0:
        return [float(x) for x in grid.x[1:-1]]

    slope = np.abs(central_derivative(psi, grid.dx))
    slope_peak = float(np.max(slope))

    support = np.flatnonzero(magnitude > get_tolerances().noise_floor * peak)
    first, last = max(int(support[0]), 1), min(int(support[-1]), len(psi) - 2)

    index = np.arange(first, last + 1)
    here = magnitude[index]
    local_min = (here <= magnitude[index - 1]) & (here <= magnitude[index + 1])
    critical = (here <= tol * peak) & (slope[index] <= tol * slope_peak)
    flagged = [float(x) for x in grid.x[index[local_min & critical]]]

    if flagged:
        logger.info(f"State {pair.n}: {len(flagged)} critical touch point(s)")
    return flagged
