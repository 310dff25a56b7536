"""
Wall-separation sweep
Solve the lowest states of V_a over a schedule of half-widths, track branches by index,
check node-count invariance and domain monotonicity, classify bound vs escaping
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from joblib import Parallel, delayed

from ..config.app import get_tolerances
from ..errors import InvalidParameterError, SturmLabError
from ..nodes.zeros import find_nodes
from ..potential.catalog import PotentialSpec, continuum_threshold
from ..potential.walled import wall
from ..solver.grid import DEFAULT_POINTS, build_grid
from ..solver.numerov import ShootingOptions, discretisation_drift, solve_state

logger = logging.getLogger(__name__)

BOUND = "bound"
ESCAPING = "escaping"
UNDETERMINED = "undetermined"

DEFAULT_A_MIN = 0.5
DEFAULT_A_MAX = 10.0
DEFAULT_A_COUNT = 40


@dataclass(frozen=True)
class BranchSample:
    """E_n and the node count at one half-width"""
    a: float
    energy: float
    node_count: int
    drift: float = 0.0               # leading Numerov error estimate of energy


@dataclass
class Branch:
    """Eigenvalue branch E_n(a) along the schedule"""
    n: int
    samples: List[BranchSample] = field(default_factory=list)
    classification: str = UNDETERMINED
    diagnostics: List[str] = field(default_factory=list)
    monotonicity_tol: float = 1e-10

    @property
    def a_values(self) -> List[float]:
        return [s.a for s in self.samples]

    @property
    def energies(self) -> List[float]:
        return [s.energy for s in self.samples]

    @property
    def node_counts(self) -> List[int]:
        return [s.node_count for s in self.samples]


@dataclass
class SweepConfig:
    """Schedule and solver settings for a sweep"""
    a_schedule: Tuple[float, ...] = ()
    n_max: int = 3
    n_points: int = DEFAULT_POINTS
    margin: Optional[float] = None
    options: ShootingOptions = field(default_factory=ShootingOptions)
    workers: int = 1

    def __post_init__(self):
        if not self.a_schedule:
            self.a_schedule = geometric_schedule(DEFAULT_A_MIN, DEFAULT_A_MAX, DEFAULT_A_COUNT)
        self.a_schedule = tuple(float(a) for a in self.a_schedule)

        if not all(a > 0 and math.isfinite(a) for a in self.a_schedule):
            raise InvalidParameterError("Schedule half-widths must be positive")
        if any(b <= a for a, b in zip(self.a_schedule, self.a_schedule[1:])):
            raise InvalidParameterError("Schedule must be strictly increasing",
                                        {"schedule": self.a_schedule})
        if self.n_max < 1:
            raise InvalidParameterError("n_max must be at least 1", {"n_max": self.n_max})
        if self.margin is not None and not self.margin >= 0:
            raise InvalidParameterError("Margin must be non-negative", {"margin": self.margin})
        if self.workers < 1:
            raise InvalidParameterError("workers must be at least 1", {"workers": self.workers})


@dataclass
class BranchViolation:
    """One failed sample along a branch (1-based index)"""
    sample: int
    kind: str
    message: str


@dataclass
class BranchReport:
    """Node-count invariance and monotonicity along one branch"""
    n: int
    node_counts: List[int]
    tolerance: float
    violations: List[BranchViolation] = field(default_factory=list)

    @property
    def node_counts_constant(self) -> bool:
        return len(set(self.node_counts)) <= 1

    @property
    def monotone(self) -> bool:
        return not any(v.kind == "monotonicity" for v in self.violations)

    @property
    def passed(self) -> bool:
        return not self.violations


def geometric_schedule(a_min: float, a_max: float, count: int) -> Tuple[float, ...]:
    """count half-widths spaced geometrically from a_min to a_max"""
    if not 0 < a_min <= a_max or count < 1:
        raise InvalidParameterError("Schedule needs 0 < a_min <= a_max and count >= 1",
                                    {"a_min": a_min, "a_max": a_max, "count": count})
    if count == 1:
        return (float(a_min),)
    schedule = np.geomspace(a_min, a_max, count)
    schedule[0], schedule[-1] = a_min, a_max
    return tuple(float(a) for a in schedule)


def default_margin(threshold: float, v_min: float) -> float:
    """1e-3 * max(1, |threshold - min V|)"""
    if not math.isfinite(threshold):
        return 1e-3
    return 1e-3 * max(1.0, abs(threshold - v_min))


def _solve_point(spec: PotentialSpec, a: float, n_max: int, n_points: int,
                 options: ShootingOptions) -> Dict[str, Any]:
    """Lowest n_max states at one half-width; a failed state is recorded, not raised"""
    grid = build_grid(wall(spec, a), n_points)
    states: List[Optional[Tuple[float, int, float]]] = []
    failures: Dict[int, str] = {}
    floor: Optional[float] = None
    for n in range(1, n_max + 1):
        try:
            pair = solve_state(grid, n, options, floor=floor)
        except SturmLabError as e:
            states.append(None)
            failures[n] = str(e)
            continue
        states.append((pair.energy, find_nodes(pair).count, discretisation_drift(pair)))
        floor = pair.energy
    return {"a": a, "dx": grid.dx, "v_min": grid.v_min, "states": states, "failures": failures}


def sweep(spec: PotentialSpec, config: SweepConfig) -> List[Branch]:
    """
    Solve every schedule point independently (optionally in parallel) and
    assemble branches n = 1..n_max in schedule order
    """
    schedule = config.a_schedule
    logger.info(f"Sweep {spec.kind}: {len(schedule)} point(s) from a={schedule[0]:g} "
                f"to a={schedule[-1]:g}, n_max={config.n_max}, workers={config.workers}")

    with Parallel(n_jobs=config.workers) as parallel:
        points = parallel(
            delayed(_solve_point)(spec, a, config.n_max, config.n_points, config.options)
            for a in schedule
        )

    branches = [Branch(n=n) for n in range(1, config.n_max + 1)]
    for point in points:
        for n, state in enumerate(point["states"], start=1):
            branch = branches[n - 1]
            if state is None:
                branch.diagnostics.append(f"a={point['a']!r}: {point['failures'][n]}")
                logger.warning(f"Branch {n} aborted at a={point['a']:g}: {point['failures'][n]}")
                continue
            energy, node_count, drift = state
            branch.samples.append(BranchSample(a=point["a"], energy=energy,
                                               node_count=node_count, drift=drift))

    final_v_min = points[-1]["v_min"]
    threshold = continuum_threshold(spec)
    margin = config.margin if config.margin is not None else default_margin(threshold,
                                                                             final_v_min)
    for branch in branches:
        branch.monotonicity_tol = get_tolerances().monotonicity
        branch.classification = classify_branch(branch, threshold, margin)
        logger.info(f"Branch {branch.n}: {len(branch.samples)} sample(s), "
                    f"{branch.classification}")

    return branches


def verify_branch(branch: Branch, tolerance: Optional[float] = None) -> BranchReport:
    """
    Node count equal to n-1 at every sample and E non-increasing in a
    An explicit tolerance is used as is; by default each step may also rise by the
    change in the samples' Numerov drift estimates
    """
    with_drift = tolerance is None
    tolerance = branch.monotonicity_tol if tolerance is None else tolerance
    report = BranchReport(n=branch.n, node_counts=branch.node_counts, tolerance=tolerance)

    if len(branch.samples) < 2:
        report.violations.append(BranchViolation(
            sample=len(branch.samples), kind="samples",
            message=f"branch {branch.n} has {len(branch.samples)} sample(s), needs 2"))
        return report

    expected = branch.n - 1
    for i, sample in enumerate(branch.samples, start=1):
        if sample.node_count != expected:
            report.violations.append(BranchViolation(
                sample=i, kind="node_count",
                message=f"a={sample.a:g}: {sample.node_count} node(s), expected {expected}"))
        if i > 1:
            previous = branch.samples[i - 2]
            allowed = tolerance
            if with_drift:
                allowed += abs(sample.drift - previous.drift)
            if sample.energy > previous.energy + allowed:
                report.violations.append(BranchViolation(
                    sample=i, kind="monotonicity",
                    message=f"a={sample.a:g}: E rose by {sample.energy - previous.energy:.3e}"))

    for violation in report.violations:
        logger.info(f"Branch {branch.n} violation at sample {violation.sample}: "
                    f"{violation.message}")
    return report


def classify_branch(branch: Branch, threshold: float, margin: float) -> str:
    """bound, escaping or undetermined relative to the continuum threshold"""
    if math.isinf(threshold) and threshold > 0:
        return BOUND
    energies = branch.energies
    if len(energies) < 2 or not math.isfinite(threshold):
        return UNDETERMINED

    final = energies[-1]
    recent = energies[-3:]
    if final < threshold - margin and max(recent) - min(recent) <= margin:
        return BOUND
    if final >= threshold - margin and final <= energies[-2]:
        return ESCAPING
    return UNDETERMINED
