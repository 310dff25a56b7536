"""
Verification suite
Registered checks over one solved problem; results aggregated into a report for `verify`
"""

import logging
import time
from dataclasses import dataclass, field
from itertools import combinations
from typing import Any, Callable, Dict, List

import numpy as np

from ..config.app import get_tolerances
from ..nodes.theorems import verify_interlacing, verify_separation
from ..nodes.zeros import detect_critical_touch, find_nodes, verify_node_count
from ..solver.grid import Eigenpair, Grid
from ..wronskian.identities import check_derivative_identity, check_integral_identity

logger = logging.getLogger(__name__)

CheckFunc = Callable[[], Dict[str, Any]]


class VerificationSuite:
    """Named checks run in registration order"""

    def __init__(self):
        self.checks: Dict[str, Dict[str, Any]] = {}
        self.overall_status = "unknown"

    def register_check(self, name: str, check_func: CheckFunc, residual: bool = False):
        """Register a check; residual checks compare a measured value against a tolerance"""
        self.checks[name] = {
            "function": check_func,
            "residual": residual,
            "last_result": None,
        }

    def run_checks(self) -> Dict[str, Any]:
        """Run all checks; an exception inside a check is a failed result"""
        results = {
            "overall_status": "passed",
            "checks": {},
            "failed": [],
        }

        for name, check_info in self.checks.items():
            start_time = time.time()
            try:
                result = check_info["function"]()
                check_result = {
                    "status": "passed" if result.get("passed", False) else "failed",
                    "message": result.get("message", ""),
                    "measured": result.get("measured"),
                    "tolerance": result.get("tolerance"),
                    "details": result.get("details", {}),
                }
            except Exception as e:
                logger.error(f"Check '{name}' raised: {e}", exc_info=True)
                check_result = {
                    "status": "error",
                    "message": f"Check raised: {e}",
                    "measured": None,
                    "tolerance": None,
                    "details": {},
                }

            check_result["residual"] = check_info["residual"]
            check_result["check_time"] = time.time() - start_time
            check_info["last_result"] = check_result
            results["checks"][name] = check_result

            if check_result["status"] != "passed":
                results["failed"].append(name)
                results["overall_status"] = "failed"
            logger.info(f"Check {name}: {check_result['status']} {check_result['message']}")

        self.overall_status = results["overall_status"]
        return results

    def all_passed(self) -> bool:
        return self.run_checks()["overall_status"] == "passed"


@dataclass
class VerificationProblem:
    """Both solvers' eigenpairs for one walled potential plus check settings"""
    grid: Grid
    numerov_pairs: List[Eigenpair]
    oracle_pairs: List[Eigenpair]
    separation_energies: List[float] = field(default_factory=list)
    tolerance_scale: float = 1.0
    critical_tol: float = 1e-5

    @property
    def all_pairs(self) -> List[Eigenpair]:
        return list(self.numerov_pairs) + list(self.oracle_pairs)


# Check functions

def check_normalization(problem: VerificationProblem) -> Dict[str, Any]:
    """Unit trapezoid norm for every eigenpair"""
    errors = [abs(p.inner(p) - 1.0) for p in problem.all_pairs]
    worst = max(errors, default=0.0)
    tolerance = get_tolerances().normalization
    return {
        "passed": worst <= tolerance,
        "message": f"max |<psi,psi> - 1| = {worst:.3e}",
        "measured": worst,
        "tolerance": tolerance,
    }


def check_node_counts(problem: VerificationProblem) -> Dict[str, Any]:
    """n-1 nodes for every state of both solvers"""
    results = [verify_node_count(p) for p in problem.all_pairs]
    failures = [f"{p.solver_tag} {r.message}" for p, r in zip(problem.all_pairs, results)
                if not r.passed]
    return {
        "passed": not failures,
        "message": f"{len(results) - len(failures)}/{len(results)} state(s) with n-1 nodes",
        "measured": len(failures),
        "tolerance": 0,
        "details": {"failures": failures},
    }


def check_interlacing(problem: VerificationProblem) -> Dict[str, Any]:
    """A node of the higher state between consecutive zeros of the lower, all pairs"""
    failures = []
    pairs = 0
    for p1, p2 in combinations(problem.numerov_pairs, 2):
        report = verify_interlacing(p1, p2)
        pairs += 1
        if not report.passed:
            failures.append(f"({p1.n}, {p2.n}) empty {report.empty_intervals}")
    return {
        "passed": not failures,
        "message": f"{pairs - len(failures)}/{pairs} pair(s) interlace",
        "measured": len(failures),
        "tolerance": 0,
        "details": {"failures": failures},
    }


def check_separation(problem: VerificationProblem) -> Dict[str, Any]:
    """Alternating zeros of two independent solutions at each sample energy"""
    reports = [verify_separation(problem.grid, e) for e in problem.separation_energies]
    failures = [r.energy for r in reports if not r.passed]
    vacuous = sum(1 for r in reports if r.verdict == "vacuous")
    return {
        "passed": not failures,
        "message": f"{len(reports) - len(failures)}/{len(reports)} energies alternate "
                   f"({vacuous} vacuous)",
        "measured": len(failures),
        "tolerance": 0,
        "details": {"violated_energies": failures,
                    "wronskian_ties": sum(r.ties for r in reports)},
    }


def check_critical_touch(problem: VerificationProblem) -> Dict[str, Any]:
    """No point where psi and psi' vanish together"""
    flagged = {f"{p.solver_tag}:{p.n}": detect_critical_touch(p, problem.critical_tol)
               for p in problem.all_pairs}
    flagged = {key: points for key, points in flagged.items() if points}
    return {
        "passed": not flagged,
        "message": f"{len(flagged)} state(s) with critical touches",
        "measured": len(flagged),
        "tolerance": 0,
        "details": flagged,
    }


def _worst(reports) -> Dict[str, Any]:
    """Largest residual-to-tolerance ratio across pair reports"""
    if not reports:
        return {"passed": True, "message": "no state pairs", "measured": 0.0, "tolerance": 0.0}

    def ratio(r):
        if r.tolerance > 0:
            return r.max_residual / r.tolerance
        return np.inf if r.max_residual > 0 else 0.0

    worst = max(reports, key=ratio)
    failures = [f"({r.n1}, {r.n2})" for r in reports if not r.passed]
    return {
        "passed": not failures,
        "message": f"worst pair ({worst.n1}, {worst.n2}): residual "
                   f"{worst.max_residual:.3e} vs {worst.tolerance:.3e}",
        "measured": worst.max_residual,
        "tolerance": worst.tolerance,
        "details": {"failures": failures},
    }


def check_derivative_identities(problem: VerificationProblem) -> Dict[str, Any]:
    return _worst([check_derivative_identity(p1, p2, problem.tolerance_scale)
                   for p1, p2 in combinations(problem.numerov_pairs, 2)])


def check_integral_identities(problem: VerificationProblem) -> Dict[str, Any]:
    return _worst([check_integral_identity(p1, p2, problem.tolerance_scale)
                   for p1, p2 in combinations(problem.numerov_pairs, 2)])


def check_cross_solver(problem: VerificationProblem) -> Dict[str, Any]:
    """Numerov and matrix-oracle energies agree; node counts identical"""
    tolerances = get_tolerances()
    dx = problem.grid.dx
    worst_ratio, measured, allowed = -1.0, 0.0, 0.0
    failures = []
    for p_num, p_mat in zip(problem.numerov_pairs, problem.oracle_pairs):
        difference = abs(p_num.energy - p_mat.energy)
        tolerance = problem.tolerance_scale * tolerances.cross_solver(dx, p_num.energy)
        ratio = difference / tolerance if tolerance > 0 else (np.inf if difference else 0.0)
        if ratio > worst_ratio:
            worst_ratio, measured, allowed = ratio, difference, tolerance
        if difference > tolerance:
            failures.append(f"state {p_num.n}: |dE| = {difference:.3e} > {tolerance:.3e}")
        if find_nodes(p_num).count != find_nodes(p_mat).count:
            failures.append(f"state {p_num.n}: node counts differ")
    return {
        "passed": not failures,
        "message": f"max |E_numerov - E_oracle| = {measured:.3e} vs {allowed:.3e}",
        "measured": measured,
        "tolerance": allowed,
        "details": {"failures": failures},
    }


def create_verification_suite(problem: VerificationProblem) -> VerificationSuite:
    """Suite with every zero-structure and identity check for one problem"""
    suite = VerificationSuite()
    suite.register_check("normalization", lambda: check_normalization(problem))
    suite.register_check("node_count", lambda: check_node_counts(problem))
    suite.register_check("interlacing", lambda: check_interlacing(problem))
    suite.register_check("separation", lambda: check_separation(problem))
    suite.register_check("critical_touch", lambda: check_critical_touch(problem))
    suite.register_check("derivative_identity", lambda: check_derivative_identities(problem),
                         residual=True)
    suite.register_check("integral_identity", lambda: check_integral_identities(problem),
                         residual=True)
    suite.register_check("cross_solver", lambda: check_cross_solver(problem), residual=True)
    return suite
