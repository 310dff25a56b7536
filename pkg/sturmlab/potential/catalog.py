"""
Base potential catalog
Analytic potentials V(x) in units where hbar^2/2m = 1, plus piecewise-linear user data
"""

import csv
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Tuple, Union

import numpy as np

from ..errors import InvalidParameterError

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]

KINDS = ("zero", "harmonic", "square_well", "double_well", "piecewise_linear")


@dataclass(frozen=True)
class Jump:
    """Jump discontinuity of a base potential"""
    x: float
    left: float
    right: float

    @property
    def size(self) -> float:
        return abs(self.right - self.left)


@dataclass(frozen=True)
class PotentialSpec:
    """Analytic description of a base potential"""
    kind: str
    k: float = 0.0
    v0: float = 0.0
    b: float = 0.0
    c4: float = 0.0
    c2: float = 0.0
    points: Tuple[Tuple[float, float], ...] = field(default_factory=tuple)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidParameterError(f"Unknown potential kind '{self.kind}'",
                                        {"known": ", ".join(KINDS)})

        if self.kind == "harmonic" and not math.isfinite(self.k):
            raise InvalidParameterError("Harmonic stiffness must be finite", {"k": self.k})

        if self.kind == "square_well":
            if not (self.v0 > 0 and math.isfinite(self.v0)):
                raise InvalidParameterError("Square well depth must be positive", {"v0": self.v0})
            if not (self.b > 0 and math.isfinite(self.b)):
                raise InvalidParameterError("Square well half-width must be positive",
                                            {"b": self.b})

        if self.kind == "double_well":
            if not (self.c4 > 0 and self.c2 > 0):
                raise InvalidParameterError("Double well needs c4 > 0 and c2 > 0",
                                            {"c4": self.c4, "c2": self.c2})

        if self.kind == "piecewise_linear":
            if len(self.points) < 2:
                raise InvalidParameterError("Piecewise potential needs at least two points",
                                            {"points": len(self.points)})
            xs = [p[0] for p in self.points]
            for i in range(1, len(xs)):
                if not xs[i] > xs[i - 1]:
                    raise InvalidParameterError("Piecewise x-coordinates must strictly increase",
                                                {"index": i, "x_prev": xs[i - 1], "x": xs[i]})
            if not all(math.isfinite(x) and math.isfinite(v) for x, v in self.points):
                raise InvalidParameterError("Piecewise data must be finite")

    # Catalog constructors

    @classmethod
    def zero(cls) -> "PotentialSpec":
        return cls("zero")

    @classmethod
    def harmonic(cls, k: float) -> "PotentialSpec":
        return cls("harmonic", k=float(k))

    @classmethod
    def square_well(cls, v0: float, b: float) -> "PotentialSpec":
        return cls("square_well", v0=float(v0), b=float(b))

    @classmethod
    def double_well(cls, c4: float, c2: float) -> "PotentialSpec":
        return cls("double_well", c4=float(c4), c2=float(c2))

    @classmethod
    def piecewise_linear(cls, points) -> "PotentialSpec":
        return cls("piecewise_linear",
                   points=tuple((float(x), float(v)) for x, v in points))

    def is_even(self) -> bool:
        """True for the parity-symmetric catalog variants"""
        return self.kind != "piecewise_linear"

    def jumps(self) -> List[Jump]:
        """Jump discontinuities, ordered by position"""
        if self.kind == "square_well":
            return [Jump(-self.b, 0.0, -self.v0), Jump(self.b, -self.v0, 0.0)]
        return []

    def describe(self) -> Dict[str, Any]:
        """Flat parameter dict for output headers"""
        params: Dict[str, Any] = {"potential": self.kind}
        if self.kind == "harmonic":
            params["k_stiffness"] = self.k
        elif self.kind == "square_well":
            params.update({"v0": self.v0, "b": self.b})
        elif self.kind == "double_well":
            params.update({"c4": self.c4, "c2": self.c2})
        elif self.kind == "piecewise_linear":
            params["points"] = [list(p) for p in self.points]
        return params


def evaluate(spec: PotentialSpec, x: ArrayLike) -> ArrayLike:
    """
    Evaluate V(x) for scalar or array x
    Total over the real line; returns a float for scalar input
    """
    xa = np.asarray(x, dtype=float)

    if spec.kind == "zero":
        values = np.zeros_like(xa)
    elif spec.kind == "harmonic":
        values = spec.k * xa * xa
    elif spec.kind == "square_well":
        values = np.where(np.abs(xa) < spec.b, -spec.v0, 0.0)
    elif spec.kind == "double_well":
        x2 = xa * xa
        values = spec.c4 * x2 * x2 - spec.c2 * x2
    else:
        xs = np.array([p[0] for p in spec.points])
        vs = np.array([p[1] for p in spec.points])
        # np.interp clamps to the end values outside the data range
        values = np.interp(xa, xs, vs)

    if np.ndim(x) == 0:
        return float(values)
    return values


def continuum_threshold(spec: PotentialSpec) -> float:
    """liminf of V(x) as |x| -> infinity (math.inf for confining potentials)"""
    if spec.kind in ("zero", "square_well"):
        return 0.0
    if spec.kind == "harmonic":
        if spec.k > 0:
            return math.inf
        return 0.0 if spec.k == 0 else -math.inf
    if spec.kind == "double_well":
        return math.inf
    return min(spec.points[0][1], spec.points[-1][1])


def load_piecewise_csv(path: Union[str, Path]) -> PotentialSpec:
    """
    Load a piecewise-linear potential from a two-column CSV file (x, V)
    A non-numeric first row is treated as a header
    """
    path = Path(path)
    if not path.exists():
        raise InvalidParameterError(f"Potential file not found: {path}")

    points: List[Tuple[float, float]] = []
    with open(path, 'r', newline='') as f:
        reader = csv.reader(f)
        for row_number, row in enumerate(reader, start=1):
            cells = [cell.strip() for cell in row if cell.strip()]
            if not cells or cells[0].startswith('#'):
                continue
            if len(cells) != 2:
                raise InvalidParameterError(f"Expected two columns in {path.name}",
                                            {"row": row_number, "columns": len(cells)})
            try:
                points.append((float(cells[0]), float(cells[1])))
            except ValueError:
                if row_number == 1 and not points:
                    continue  # header
                raise InvalidParameterError(f"Non-numeric value in {path.name}",
                                            {"row": row_number})

    spec = PotentialSpec.piecewise_linear(points)
    logger.info(f"Loaded {len(points)} potential points from {path}")
    return spec
