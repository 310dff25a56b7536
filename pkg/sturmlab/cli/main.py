"""
STURMLAB command line
Subcommands solve, sweep, verify, nodes and oracle; results on stdout (or --out), logs on stderr
"""

import argparse
import logging
import math
from typing import Any, Callable, Dict, List, Optional

import numpy as np
import psutil

from .. import __version__
from ..config.app import FORMAT_CHOICES, POTENTIAL_CHOICES, RunConfig, load_config_file
from ..errors import ConfigError, InvalidParameterError, SturmLabError
from ..health.verify_suite import VerificationProblem, create_verification_suite
from ..homotopy.square_well import square_well_bound_states
from ..homotopy.sweep import SweepConfig, geometric_schedule, sweep, verify_branch
from ..logging.rotating_logger import setup_logging
from ..nodes.zeros import find_nodes
from ..potential.catalog import PotentialSpec, continuum_threshold, load_piecewise_csv
from ..potential.walled import wall
from ..solver.grid import build_grid
from ..solver.matrix_oracle import matrix_oracle, sturm_count, tridiagonal_operator
from ..solver.numerov import ShootingOptions, solve_lowest
from .output import emit, render_csv, render_json

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_CONFIG = 2

SEPARATION_ENERGY_SPAN = 50.0

# CLI-only arguments that are not RunConfig keys
NON_CONFIG_ARGS = ("command", "config", "verbose", "log_dir")


def build_potential(config: RunConfig) -> PotentialSpec:
    """Base potential selected by the run configuration"""
    if config.potential == "zero":
        return PotentialSpec.zero()
    if config.potential == "harmonic":
        return PotentialSpec.harmonic(config.k_stiffness)
    if config.potential == "square-well":
        return PotentialSpec.square_well(config.v0, config.b)
    if config.potential == "double-well":
        return PotentialSpec.double_well(config.c4, config.c2)
    return load_piecewise_csv(config.points_csv)


def shooting_options(config: RunConfig) -> ShootingOptions:
    return ShootingOptions(bracket_expansion=config.bracket_expansion,
                           bisection_tol=config.bisection_tol,
                           max_iterations=config.max_iterations)


def _solve(config: RunConfig):
    spec = build_potential(config)
    grid = build_grid(wall(spec, config.a), config.n_points)
    return grid, solve_lowest(grid, config.k, shooting_options(config))


def _write(config: RunConfig, columns: List[str], rows: List[List[Any]],
           payload: Dict[str, Any], notes: Optional[List[str]] = None):
    if config.format == "json":
        emit(render_json(payload, config.to_dict()), config.out)
    else:
        emit(render_csv(columns, rows, config.to_dict(), notes), config.out)


def cmd_solve(config: RunConfig) -> int:
    """Eigenvalues, node counts and node positions for states 1..k"""
    _, pairs = _solve(config)
    states = []
    for pair in pairs:
        nodes = find_nodes(pair)
        states.append({"n": pair.n, "energy": pair.energy,
                       "node_count": nodes.count, "nodes": nodes.positions})

    rows = [[s["n"], s["energy"], s["node_count"], s["nodes"]] for s in states]
    _write(config, ["n", "energy", "node_count", "nodes"], rows, {"states": states})
    return EXIT_OK


def cmd_nodes(config: RunConfig) -> int:
    """Node positions only, one row per node"""
    _, pairs = _solve(config)
    states = [{"n": pair.n, "nodes": find_nodes(pair).positions} for pair in pairs]
    rows = [[s["n"], i, x] for s in states for i, x in enumerate(s["nodes"], start=1)]
    _write(config, ["n", "node", "x"], rows, {"states": states})
    return EXIT_OK


def cmd_sweep(config: RunConfig) -> int:
    """Branch table plus per-branch verification summary"""
    spec = build_potential(config)
    workers = config.workers or psutil.cpu_count(logical=True) or 1
    sweep_config = SweepConfig(
        a_schedule=geometric_schedule(config.a_min, config.a_max, config.a_count),
        n_max=config.n_max, n_points=config.n_points, margin=config.margin,
        options=shooting_options(config), workers=workers)

    branches = sweep(spec, sweep_config)
    reports = [verify_branch(branch) for branch in branches]

    summary = []
    for branch, report in zip(branches, reports):
        summary.append({
            "branch": branch.n,
            "classification": branch.classification,
            "node_counts_constant": report.node_counts_constant,
            "monotone": report.monotone,
            "passed": report.passed,
            "monotonicity_tol": report.tolerance,
            "violations": [v.message for v in report.violations],
            "diagnostics": list(branch.diagnostics),
        })

    census: Dict[str, Any] = {}
    threshold = continuum_threshold(spec)
    if math.isfinite(threshold):
        final_grid = build_grid(wall(spec, sweep_config.a_schedule[-1]), config.n_points)
        diag, off = tridiagonal_operator(final_grid)
        census["oracle_states_below_threshold"] = sturm_count(diag, off, threshold)
    if spec.kind == "square_well":
        census["transcendental_bound_states"] = len(square_well_bound_states(spec.v0, spec.b))

    notes = [f"branch={s['branch']} classification={s['classification']} "
             f"node_counts_constant={str(s['node_counts_constant']).lower()} "
             f"monotone={str(s['monotone']).lower()}" for s in summary]
    notes += [f"{key}={value}" for key, value in census.items()]

    rows = [[branch.n, sample.a, sample.energy, sample.node_count]
            for branch in branches for sample in branch.samples]
    payload = {
        "branches": [dict(s, samples=[{"a": x.a, "E": x.energy, "node_count": x.node_count}
                                      for x in branch.samples])
                     for s, branch in zip(summary, branches)],
        "census": census,
    }
    _write(config, ["branch", "a", "E", "node_count"], rows, payload, notes)

    failed = [r.n for r in reports if not r.passed]
    if failed:
        logger.error(f"Branch verification failed for branch(es) {failed}")
        return EXIT_FAILURE
    return EXIT_OK


def separation_energies(config: RunConfig, v_min: float) -> List[float]:
    """Seeded uniform sample of energies above the potential minimum"""
    rng = np.random.default_rng(config.seed)
    draws = rng.random(config.separation_samples)
    return [float(e) for e in v_min + SEPARATION_ENERGY_SPAN * draws]


def cmd_verify(config: RunConfig) -> int:
    """Full zero-structure and identity report for the configured problem"""
    grid, numerov_pairs = _solve(config)
    oracle_pairs = matrix_oracle(grid, config.k)

    problem = VerificationProblem(
        grid=grid, numerov_pairs=numerov_pairs, oracle_pairs=oracle_pairs,
        separation_energies=separation_energies(config, grid.v_min),
        tolerance_scale=config.tolerance, critical_tol=config.critical_tol)
    results = create_verification_suite(problem).run_checks()

    rows = [[name, r["status"], r["measured"], r["tolerance"], r["message"]]
            for name, r in results["checks"].items()]
    payload = {
        "overall_status": results["overall_status"],
        "failed": results["failed"],
        "checks": {name: {key: r[key] for key in ("status", "measured", "tolerance",
                                                  "message", "residual", "details")}
                   for name, r in results["checks"].items()},
    }
    _write(config, ["check", "status", "measured", "tolerance", "message"], rows, payload,
           [f"overall_status={results['overall_status']}"])

    if results["failed"]:
        logger.error(f"Verification failed: {', '.join(results['failed'])}")
        return EXIT_FAILURE
    return EXIT_OK


def cmd_oracle(config: RunConfig) -> int:
    """Square-well bound states from the matching equations"""
    states = square_well_bound_states(config.v0, config.b)
    rows = [[s.n, s.parity, s.z, s.energy] for s in states]
    payload = {"states": [{"n": s.n, "parity": s.parity, "z": s.z, "energy": s.energy}
                          for s in states]}
    _write(config, ["n", "parity", "z", "energy"], rows, payload)
    return EXIT_OK


COMMANDS: Dict[str, Callable[[RunConfig], int]] = {
    "solve": cmd_solve,
    "sweep": cmd_sweep,
    "verify": cmd_verify,
    "nodes": cmd_nodes,
    "oracle": cmd_oracle,
}


def _common_arguments() -> argparse.ArgumentParser:
    """Flags shared by every subcommand; None means 'not given'"""
    common = argparse.ArgumentParser(add_help=False)

    potential = common.add_argument_group("potential")
    potential.add_argument("--potential", choices=POTENTIAL_CHOICES)
    potential.add_argument("--k-stiffness", dest="k_stiffness", type=float)
    potential.add_argument("--v0", type=float)
    potential.add_argument("--b", type=float)
    potential.add_argument("--c4", type=float)
    potential.add_argument("--c2", type=float)
    potential.add_argument("--points-csv", dest="points_csv")

    problem = common.add_argument_group("problem")
    problem.add_argument("--a", type=float, help="wall half-width")
    problem.add_argument("--n-points", dest="n_points", type=int, help="odd grid size")
    problem.add_argument("--k", type=int, help="number of states")

    schedule = common.add_argument_group("sweep")
    schedule.add_argument("--a-min", dest="a_min", type=float)
    schedule.add_argument("--a-max", dest="a_max", type=float)
    schedule.add_argument("--a-count", dest="a_count", type=int)
    schedule.add_argument("--n-max", dest="n_max", type=int)
    schedule.add_argument("--margin", type=float)
    schedule.add_argument("--workers", type=int, help="default: available cores")

    solver = common.add_argument_group("solver and verification")
    solver.add_argument("--bisection-tol", dest="bisection_tol", type=float)
    solver.add_argument("--bracket-expansion", dest="bracket_expansion", type=int)
    solver.add_argument("--max-iterations", dest="max_iterations", type=int)
    solver.add_argument("--tolerance", type=float, help="multiplier on residual tolerances")
    solver.add_argument("--critical-tol", dest="critical_tol", type=float)
    solver.add_argument("--separation-samples", dest="separation_samples", type=int)
    solver.add_argument("--seed", type=int)

    output = common.add_argument_group("output")
    output.add_argument("--format", choices=FORMAT_CHOICES)
    output.add_argument("--out", help="output path (default: standard output)")
    output.add_argument("--config", help="flat YAML config file")
    output.add_argument("-v", "--verbose", action="count", default=0)
    output.add_argument("--log-dir", dest="log_dir")
    return common


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sturmlab",
                                     description="1D bound states and Sturm oscillation checks")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subparsers = parser.add_subparsers(dest="command", required=True)

    common = _common_arguments()
    subparsers.add_parser("solve", parents=[common], help="lowest k eigenpairs")
    subparsers.add_parser("sweep", parents=[common], help="wall-separation sweep")
    subparsers.add_parser("verify", parents=[common], help="node and Wronskian checks")
    subparsers.add_parser("nodes", parents=[common], help="node positions only")
    subparsers.add_parser("oracle", parents=[common], help="square-well matching equations")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Parse, configure, dispatch; returns the exit code"""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_CONFIG

    setup_logging(args.verbose, args.log_dir)

    try:
        file_values = load_config_file(args.config) if args.config else {}
        flags = {key: value for key, value in vars(args).items() if key not in NON_CONFIG_ARGS}
        config = RunConfig.from_sources(file_values, flags)
    except ConfigError as e:
        logger.error(f"Configuration error: {e}")
        return EXIT_CONFIG

    logger.info(f"sturmlab {args.command}: potential={config.potential}")
    try:
        return COMMANDS[args.command](config)
    except (ConfigError, InvalidParameterError) as e:
        logger.error(f"Invalid parameter: {e}")
        return EXIT_CONFIG
    except SturmLabError as e:
        logger.error(f"{args.command} failed: {e}")
        return EXIT_FAILURE
    except Exception as e:
        logger.error(f"Unexpected error in {args.command}: {e}", exc_info=True)
        return EXIT_FAILURE
