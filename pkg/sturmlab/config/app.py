"""
Run configuration and frozen tolerance defaults
Flat YAML config file < command-line flags; unknown keys rejected
"""

import logging
import math
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Any, Dict, Optional

import yaml

from ..errors import ConfigError, SturmLabError

logger = logging.getLogger(__name__)

POTENTIAL_CHOICES = ("zero", "harmonic", "square-well", "double-well", "piecewise")
FORMAT_CHOICES = ("csv", "json")


@dataclass(frozen=True)
class ToleranceConfig:
    """Verification constants, fixed on the infinite well"""
    derivative_coeff: float = 1.0     # x dx^2 (|dE|+1)(E_kin+1)
    integral_coeff: float = 1.0       # x dx^2 (|dE|+1)(E_kin+1)
    cross_solver_coeff: float = 5.0   # x dx^2 (|E|+1), plus (|E|+1)^2/8 truncation term
    normalization: float = 1e-10
    critical_touch: float = 1e-5
    noise_floor: float = 1e-12        # fraction of the peak treated as numerically zero
    jitter: float = 1e-2              # hump / bracketing samples below this is a touch
    monotonicity: float = 1e-10

    def cross_solver(self, dx: float, energy: float) -> float:
        scale = abs(energy) + 1.0
        return dx * dx * (self.cross_solver_coeff * scale + scale * scale / 8.0)

    def derivative_identity(self, dx: float, delta_e: float, kinetic: float) -> float:
        return self.derivative_coeff * dx * dx * (abs(delta_e) + 1.0) * (abs(kinetic) + 1.0)

    def integral_identity(self, dx: float, delta_e: float, kinetic: float) -> float:
        return self.integral_coeff * dx * dx * (abs(delta_e) + 1.0) * (abs(kinetic) + 1.0)


# Global tolerance instance
tolerances = ToleranceConfig()


def get_tolerances() -> ToleranceConfig:
    """Get the frozen tolerance defaults"""
    return tolerances


@dataclass
class RunConfig:
    """Every parameter of a CLI run"""
    # Potential selection
    potential: str = "zero"
    k_stiffness: float = 1.0
    v0: float = 4.0
    b: float = 1.0
    c4: float = 1.0
    c2: float = 5.0
    points_csv: Optional[str] = None

    # Problem
    a: float = 1.0
    n_points: int = 4001
    k: int = 5

    # Sweep schedule
    a_min: float = 0.5
    a_max: float = 10.0
    a_count: int = 40
    n_max: int = 3
    margin: Optional[float] = None

    # Solver controls
    bisection_tol: float = 1e-12
    bracket_expansion: int = 60
    max_iterations: int = 200

    # Verification
    tolerance: float = 1.0            # multiplier on residual tolerances
    critical_tol: float = 1e-5
    separation_samples: int = 20
    seed: int = 0

    # Output
    format: str = "csv"
    out: Optional[str] = None
    workers: Optional[int] = None

    @classmethod
    def keys(cls):
        return [f.name for f in fields(cls)]

    @classmethod
    def from_sources(cls, file_values: Optional[Dict[str, Any]] = None,
                     flag_values: Optional[Dict[str, Any]] = None) -> "RunConfig":
        """
        Merge defaults < config file < command-line flags
        Flags left at None do not override
        """
        merged: Dict[str, Any] = {}
        for source in (file_values or {}, flag_values or {}):
            unknown = sorted(set(source) - set(cls.keys()))
            if unknown:
                raise ConfigError("Unknown configuration key(s)", {"keys": ", ".join(unknown)})
            merged.update({key: value for key, value in source.items() if value is not None})

        config = cls(**merged)
        config.validate()
        return config

    def validate(self):
        """Mirror the module validation rules; raises ConfigError"""
        def fail(message: str, **details):
            raise ConfigError(message, details)

        if self.potential not in POTENTIAL_CHOICES:
            fail("Unknown potential", potential=self.potential)
        if self.format not in FORMAT_CHOICES:
            fail("Unknown output format", format=self.format)

        try:
            for name in ("k_stiffness", "v0", "b", "c4", "c2", "a", "a_min", "a_max",
                         "bisection_tol", "tolerance", "critical_tol"):
                setattr(self, name, float(getattr(self, name)))
            for name in ("n_points", "k", "a_count", "n_max", "bracket_expansion",
                         "max_iterations", "separation_samples", "seed"):
                value = getattr(self, name)
                if isinstance(value, bool) or float(value) != int(value):
                    fail(f"{name} must be an integer", value=value)
                setattr(self, name, int(value))
            if self.margin is not None:
                self.margin = float(self.margin)
            if self.workers is not None:
                if isinstance(self.workers, bool) or float(self.workers) != int(self.workers):
                    fail("workers must be an integer", value=self.workers)
                self.workers = int(self.workers)
        except (TypeError, ValueError) as e:
            if isinstance(e, SturmLabError):
                raise
            raise ConfigError(f"Invalid numeric value: {e}")

        if not (self.a > 0 and math.isfinite(self.a)):
            fail("a must be positive", a=self.a)
        if self.n_points < 3 or self.n_points % 2 == 0:
            fail("n_points must be odd and at least 3", n_points=self.n_points)
        if self.k < 1:
            fail("k must be at least 1", k=self.k)
        if self.n_max < 1:
            fail("n_max must be at least 1", n_max=self.n_max)
        if not 0 < self.a_min <= self.a_max:
            fail("Sweep needs 0 < a_min <= a_max", a_min=self.a_min, a_max=self.a_max)
        if self.a_count < 2 or self.a_min == self.a_max:
            fail("Sweep schedule too short to verify", a_count=self.a_count,
                 a_min=self.a_min, a_max=self.a_max)
        if self.margin is not None and not self.margin >= 0:
            fail("margin must be non-negative", margin=self.margin)
        if not self.bisection_tol > 0:
            fail("bisection_tol must be positive", bisection_tol=self.bisection_tol)
        if self.bracket_expansion < 0 or self.max_iterations < 1:
            fail("Solver iteration limits out of range",
                 bracket_expansion=self.bracket_expansion, max_iterations=self.max_iterations)
        if not self.tolerance >= 0 or not self.critical_tol >= 0:
            fail("Tolerances must be non-negative",
                 tolerance=self.tolerance, critical_tol=self.critical_tol)
        if self.separation_samples < 0:
            fail("separation_samples must be >= 0", separation_samples=self.separation_samples)
        if self.workers is not None and self.workers < 1:
            fail("workers must be at least 1", workers=self.workers)
        if self.potential == "square-well" and not (self.v0 > 0 and self.b > 0):
            fail("Square well needs v0 > 0 and b > 0", v0=self.v0, b=self.b)
        if self.potential == "double-well" and not (self.c4 > 0 and self.c2 > 0):
            fail("Double well needs c4 > 0 and c2 > 0", c4=self.c4, c2=self.c2)
        if self.potential == "piecewise" and not self.points_csv:
            fail("Piecewise potential needs points_csv")

    def to_dict(self) -> Dict[str, Any]:
        """Effective configuration, echoed into output headers"""
        return asdict(self)


def load_config_file(path: str) -> Dict[str, Any]:
    """
    Read a flat key-value YAML file
    Returns the mapping; raises ConfigError for missing files, nesting or bad syntax
    """
    config_path = Path(path)
    if not config_path.exists():
        raise ConfigError(f"Config file not found: {config_path}")

    try:
        with open(config_path, 'r') as f:
            data = yaml.safe_load(f)
    except yaml.YAMLError as e:
        raise ConfigError(f"Config file is not valid YAML: {e}")

    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigError("Config file must be a flat key: value mapping")

    for key, value in data.items():
        if isinstance(value, (dict, list)):
            raise ConfigError("Nested values are not allowed in the config file", {"key": key})
        if key == "format" and value is not None:
            data[key] = str(value)

    logger.info(f"Loaded {len(data)} key(s) from {config_path}")
    return {str(key).replace('-', '_'): value for key, value in data.items()}
