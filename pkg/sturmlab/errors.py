"""
Exception hierarchy for STURMLAB
Every error carries a details dict with its diagnostic payload
"""

from typing import Any, Dict, Optional


class SturmLabError(Exception):
    """Base error with a diagnostic payload"""

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.details: Dict[str, Any] = dict(details or {})

    def __str__(self) -> str:
        base = super().__str__()
        if not self.details:
            return base
        extra = ", ".join(f"{key}={value}" for key, value in self.details.items())
        return f"{base} ({extra})"


class InvalidParameterError(SturmLabError, ValueError):
    """Parameter outside its valid range"""


class DomainError(SturmLabError, ValueError):
    """Query outside the walled domain"""


class DegenerateInputError(SturmLabError, ValueError):
    """Input carries no information (e.g. an all-zero wavefunction)"""


class PreconditionError(SturmLabError, ValueError):
    """Ordering or identity precondition violated"""


class GridMismatchError(SturmLabError, ValueError):
    """Eigenpairs live on different grids"""


class BracketNotFoundError(SturmLabError):
    """Energy window expansion exhausted without bracketing the state"""


class ConvergenceError(SturmLabError):
    """Iteration cap reached or non-finite samples produced"""


class ConfigError(SturmLabError, ValueError):
    """Invalid run configuration"""
