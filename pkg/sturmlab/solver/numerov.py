"""
Numerov shooting solver
Integrates psi'' = (V - E) psi from the left wall, crossing jumps of V exactly,
and brackets eigenvalues by node count
"""

import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np
from scipy.integrate import solve_ivp

from ..errors import BracketNotFoundError, ConvergenceError, InvalidParameterError, SturmLabError
from ..potential.catalog import Jump, PotentialSpec, evaluate
from .grid import Eigenpair, Grid, normalize_and_fix_sign

logger = logging.getLogger(__name__)

RESCALE_THRESHOLD = 1e100
SOLVER_TAG = "numerov"

# jump closer than this fraction of dx to a sample sits on it
JUMP_SNAP = 1e-9
TRANSFER_RTOL = 1e-12
TRANSFER_ATOL = 1e-15


@dataclass(frozen=True)
class ShootingOptions:
    """Controls for energy bracketing and bisection"""
    bracket_expansion: int = 60      # window doublings before giving up
    bisection_tol: float = 1e-12     # relative bracket width
    max_iterations: int = 200

    def __post_init__(self):
        if self.bracket_expansion < 0:
            raise InvalidParameterError("bracket_expansion must be >= 0",
                                        {"bracket_expansion": self.bracket_expansion})
        if not self.bisection_tol > 0:
            raise InvalidParameterError("bisection_tol must be positive",
                                        {"bisection_tol": self.bisection_tol})
        if self.max_iterations < 1:
            raise InvalidParameterError("max_iterations must be >= 1",
                                        {"max_iterations": self.max_iterations})


def _march(c: List[float], y: List[float], first: int, last: int) -> int:
    """
    Three-point Numerov recurrence filling y[first + 2 .. last] from y[first], y[first + 1]
    Overflow rescales every sample computed so far; returns the rescale count
    """
    rescales = 0
    i = first
    try:
        for i in range(first + 1, last):
            nxt = ((12.0 - 10.0 * c[i]) * y[i] - c[i - 1] * y[i - 1]) / c[i + 1]
            y[i + 1] = nxt
            if abs(nxt) > RESCALE_THRESHOLD:
                for j in range(i + 2):
                    y[j] /= RESCALE_THRESHOLD
                rescales += 1
    except ZeroDivisionError:
        raise ConvergenceError("Numerov coefficient vanished; grid too coarse for this energy",
                               {"step": i})
    return rescales


@dataclass(frozen=True)
class _JumpSite:
    """A jump seen in march order: k is the last sample on the approach side (or on the jump)"""
    k: int
    on_node: bool
    jump: Jump


def _jump_sites(grid: Grid, reverse: bool) -> List[_JumpSite]:
    n = grid.n_points
    sites = []
    for jump in grid.potential.base.jumps():
        if abs(jump.x) >= grid.a:
            continue
        r = (jump.x - grid.x[0]) / grid.dx
        nearest = int(round(r))
        on_node = abs(r - nearest) < JUMP_SNAP
        below = nearest if on_node else int(math.floor(r))
        if reverse:
            approach = below if on_node else below + 1
            sites.append(_JumpSite(k=n - 1 - approach, on_node=on_node, jump=jump))
        else:
            sites.append(_JumpSite(k=below, on_node=on_node, jump=jump))
    return sorted(sites, key=lambda site: site.k)


def _crossings(sites: List[_JumpSite], n: int) -> List[Tuple[int, int]]:
    """
    (k, t) march spans handed to the exact transfer: Numerov stops at k and resumes
    from t-1, t. Jumps closer than two cells share one span; a jump in the first
    march cell has no sample to recover the slope from and is marched through
    """
    spans: List[Tuple[int, int]] = []
    for site in sites:
        if site.k < 1:
            continue
        if spans and site.k < spans[-1][1]:
            k, t = spans[-1]
            spans[-1] = (k, min(max(t, site.k + 2), n - 1))
            continue
        spans.append((site.k, min(site.k + 2, n - 1)))
    return spans


def _segment_matrix(spec: PotentialSpec, E: float, x_from: float, x_to: float) -> np.ndarray:
    """Fundamental matrix of (psi, psi') over a stretch where V is smooth"""
    inset = 1e-9 * abs(x_to - x_from)
    lo, hi = min(x_from, x_to) + inset, max(x_from, x_to) - inset

    def rhs(x, y):
        # the clamp keeps endpoint evaluations on this side of a jump
        s = evaluate(spec, min(max(x, lo), hi)) - E
        return [y[1], s * y[0], y[3], s * y[2]]

    sol = solve_ivp(rhs, (x_from, x_to), [1.0, 0.0, 0.0, 1.0], method="DOP853",
                    rtol=TRANSFER_RTOL, atol=TRANSFER_ATOL)
    if not sol.success:
        raise ConvergenceError("Transfer across a potential jump failed",
                               {"E": E, "span": (x_from, x_to), "reason": sol.message})
    end = sol.y[:, -1]
    return np.array([[end[0], end[2]], [end[1], end[3]]])


def transfer_matrix(spec: PotentialSpec, E: float, x_from: float, x_to: float) -> np.ndarray:
    """
    Exact (psi, psi') propagator of psi'' = (V - E) psi from x_from to x_to,
    split at every jump strictly inside the span
    """
    lo, hi = min(x_from, x_to), max(x_from, x_to)
    snap = JUMP_SNAP * (hi - lo)
    cuts = [j.x for j in spec.jumps() if lo + snap < j.x < hi - snap]
    if x_to < x_from:
        cuts.reverse()
    points = [x_from] + cuts + [x_to]
    matrix = np.eye(2)
    for p, q in zip(points[:-1], points[1:]):
        matrix = _segment_matrix(spec, E, p, q) @ matrix
    return matrix


def _cross_jump(grid: Grid, E: float, xs: np.ndarray, y: List[float], k: int, t: int):
    """
    Recover psi' at xs[k] from the samples at k-1 and k, then carry (psi, psi')
    exactly to xs[k+1] .. xs[t]
    """
    spec = grid.potential.base
    back = transfer_matrix(spec, E, float(xs[k]), float(xs[k - 1]))
    slope = (y[k - 1] - back[0, 0] * y[k]) / back[0, 1]
    state = np.array([y[k], slope])
    for m in range(k + 1, t + 1):
        state = transfer_matrix(spec, E, float(xs[m - 1]), float(xs[m])) @ state
        y[m] = float(state[0])


def numerov_integrate(grid: Grid, E: float, start: Optional[Tuple[float, float]] = None,
                      reverse: bool = False) -> np.ndarray:
    """
    Integrate psi'' = (V - E) psi across the grid (local error O(dx^6))
    Default initial data psi[0] = 0, psi[1] = dx; reverse=True starts at the right wall
    Jumps of V are crossed by an exact transfer between Numerov stretches, so the
    march stays fourth order for piecewise potentials
    No normalisation is applied; overflow is handled by rescaling the computed prefix
    """
    dx = grid.dx
    n = grid.n_points
    xs = grid.x[::-1] if reverse else grid.x
    sites = _jump_sites(grid, reverse)

    v = np.asarray(grid.potential.evaluate(xs), dtype=float).copy()
    for site in sites:
        if site.on_node:
            v[site.k] = site.jump.right if reverse else site.jump.left
    c = (1.0 - (dx * dx / 12.0) * (v - E)).tolist()

    y0, y1 = start if start is not None else (0.0, dx)
    y = [0.0] * n
    y[0] = float(y0)
    if n > 1:
        y[1] = float(y1)

    rescales = 0
    position = 0
    for k, t in _crossings(sites, n):
        rescales += _march(c, y, position, k)
        _cross_jump(grid, E, xs, y, k, t)
        position = t - 1
    rescales += _march(c, y, position, n - 1)
    if rescales:
        logger.debug(f"Numerov at E={E!r}: {rescales} rescale(s) by {RESCALE_THRESHOLD:g}")

    psi = np.array(y)
    if reverse:
        psi = psi[::-1].copy()
    if not np.all(np.isfinite(psi)):
        raise ConvergenceError("Numerov integration produced non-finite samples", {"E": E})
    return psi


def discretisation_drift(pair: Eigenpair) -> float:
    """
    Leading Numerov eigenvalue error (dx^4 / 240) * int (V - E)^3 psi^2 dx
    Positive where the state lives mostly in forbidden regions, negative otherwise
    """
    grid = pair.grid
    weight = (grid.v - pair.energy) ** 3 * pair.psi * pair.psi
    return grid.dx ** 4 / 240.0 * grid.integrate(weight)


def _sign_changes(values: np.ndarray) -> int:
    nonzero = values[values != 0.0]
    if len(nonzero) < 2:
        return 0
    negative = np.signbit(nonzero)
    return int(np.count_nonzero(negative[1:] != negative[:-1]))


def count_sign_changes(psi: np.ndarray) -> int:
    """
    Strict sign changes between consecutive nonzero interior samples
    The first and last samples (wall zeros) are ignored
    """
    psi = np.asarray(psi, dtype=float)
    return _sign_changes(psi[1:-1])


def shooting_count(grid: Grid, E: float) -> int:
    """
    Zeros of the outward solution on (-a, a], i.e. the number of
    discrete eigenvalues below E
    """
    psi = numerov_integrate(grid, E)
    return _sign_changes(psi[1:])


def _bracket(grid: Grid, n: int, options: ShootingOptions,
             floor: Optional[float]) -> Tuple[float, float]:
    """Energy window [lo, hi] with count(lo) <= n-1 < n <= count(hi)"""
    v_min = grid.v_min
    lo = v_min - 1.0
    if floor is not None and floor > lo and shooting_count(grid, floor) <= n - 1:
        lo = floor

    # infinite-well kinetic scale for state n
    width = max(1.0, (n * math.pi / (2.0 * grid.a)) ** 2 + 1.0)
    hi = v_min + width
    for attempt in range(options.bracket_expansion + 1):
        count = shooting_count(grid, hi)
        if count >= n:
            logger.debug(f"State {n}: window [{lo!r}, {hi!r}] after {attempt} doubling(s)")
            return lo, hi
        if hi > lo:
            lo = hi
        width *= 2.0
        hi = v_min + width

    raise BracketNotFoundError("Could not bracket the requested state",
                               {"n": n, "window": (v_min - 1.0, hi),
                                "doublings": options.bracket_expansion})


def _assemble(grid: Grid, E: float) -> np.ndarray:
    """
    Eigenfunction at E from outward and inward solutions joined at the
    largest |psi| in the classically allowed region
    """
    left = numerov_integrate(grid, E)
    right = numerov_integrate(grid, E, reverse=True)

    allowed = np.flatnonzero(grid.v[1:-1] < E) + 1
    if len(allowed) == 0:
        lo, hi = 1, grid.n_points - 2
    else:
        lo, hi = int(allowed[0]), int(allowed[-1])
    m = lo + int(np.argmax(np.abs(left[lo:hi + 1])))

    if right[m] == 0.0 or left[m] == 0.0:
        return left
    psi = np.empty_like(left)
    psi[:m + 1] = left[:m + 1]
    psi[m + 1:] = right[m + 1:] * (left[m] / right[m])
    return psi


def solve_state(grid: Grid, n: int, options: Optional[ShootingOptions] = None,
                floor: Optional[float] = None) -> Eigenpair:
    """
    n-th eigenpair by node-count bracketing and bisection on E
    floor: optional energy known to lie at or below E_{n-1}
    """
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise InvalidParameterError("State index must be an integer >= 1", {"n": n})
    n = int(n)
    options = options or ShootingOptions()

    lo, hi = _bracket(grid, n, options, floor)

    iterations = 0
    while hi - lo >= options.bisection_tol * max(1.0, abs(0.5 * (lo + hi))):
        if iterations >= options.max_iterations:
            raise ConvergenceError("Bisection did not converge",
                                   {"n": n, "iterations": iterations, "bracket": (lo, hi)})
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break  # bracket at floating-point resolution
        if shooting_count(grid, mid) >= n:
            hi = mid
        else:
            lo = mid
        iterations += 1

    energy = 0.5 * (lo + hi)
    psi = normalize_and_fix_sign(_assemble(grid, energy), grid)

    nodes = count_sign_changes(psi)
    if nodes != n - 1:
        logger.warning(f"State {n} at E={energy!r} has {nodes} sign changes, expected {n - 1}")
    logger.debug(f"State {n}: E={energy!r} after {iterations} bisection steps")

    return Eigenpair(n=n, energy=energy, psi=psi, grid=grid, solver_tag=SOLVER_TAG)


def solve_lowest(grid: Grid, k: int, options: Optional[ShootingOptions] = None) -> List[Eigenpair]:
    """Eigenpairs n = 1..k with strictly increasing energies"""
    if isinstance(k, bool) or int(k) != k or k < 1:
        raise InvalidParameterError("State count must be an integer >= 1", {"k": k})

    pairs: List[Eigenpair] = []
    floor: Optional[float] = None
    for n in range(1, int(k) + 1):
        try:
            pair = solve_state(grid, n, options, floor=floor)
        except SturmLabError as e:
            e.details.setdefault("n", n)
            raise
        if pairs and not pair.energy > pairs[-1].energy:
            raise ConvergenceError("Energies are not strictly increasing",
                                   {"n": n, "E_prev": pairs[-1].energy, "E": pair.energy})
        pairs.append(pair)
        floor = pair.energy

    logger.info(f"Solved {len(pairs)} state(s) on a={grid.a:g} with {grid.n_points} points")
    return pairs
