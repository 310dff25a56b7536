#!/usr/bin/env python3
"""
STURMLAB - Homotopy tests
Small-width analytic states, square-well oracle, wall-separation sweeps and branch checks
"""

import math
import sys
from pathlib import Path

import numpy as np
import pytest

# Add the sturmlab package to Python path
sys.path.insert(0, str(Path(__file__).parent.parent))

from sturmlab.errors import InvalidParameterError
from sturmlab.homotopy.analytic import analytic_small_a, infinite_well_energy
from sturmlab.homotopy.square_well import (
    count_square_well_bound_states, square_well_bound_states,
)
from sturmlab.homotopy.sweep import (
    BOUND, ESCAPING, UNDETERMINED, Branch, BranchSample, SweepConfig, classify_branch,
    default_margin, geometric_schedule, sweep, verify_branch,
)
from sturmlab.nodes.zeros import find_nodes
from sturmlab.potential.catalog import PotentialSpec
from sturmlab.potential.walled import wall
from sturmlab.solver.grid import build_grid
from sturmlab.solver.numerov import ShootingOptions, solve_lowest


def _branch(n, energies, node_count=None, a_values=None):
    node_count = n - 1 if node_count is None else node_count
    a_values = a_values or [float(i + 1) for i in range(len(energies))]
    return Branch(n=n, samples=[BranchSample(a=a, energy=e, node_count=node_count)
                                for a, e in zip(a_values, energies)])


@pytest.fixture(scope="module")
def square_well_sweep():
    config = SweepConfig(a_schedule=geometric_schedule(1.5, 30.0, 40), n_max=3, n_points=4001,
                         workers=2)
    return sweep(PotentialSpec.square_well(4.0, 1.0), config)


# Analytic small-width states

def test_analytic_energies():
    assert infinite_well_energy(1, 1.0) == pytest.approx(math.pi ** 2 / 4)
    assert infinite_well_energy(3, 1.0) == pytest.approx(9 * math.pi ** 2 / 4)
    assert analytic_small_a(1, 0.05).energy == pytest.approx(986.9604401, rel=1e-9)


def test_analytic_nodes():
    third = analytic_small_a(3, 1.0)
    left, right = find_nodes(third).positions
    assert left == pytest.approx(-1.0 / 3.0, abs=1e-6)
    assert right == pytest.approx(1.0 / 3.0, abs=1e-6)
    assert third.solver_tag == "analytic"
    assert third.inner(third) == pytest.approx(1.0, abs=1e-10)


@pytest.mark.parametrize("eps", [0.0, -1.0, math.inf])
def test_analytic_rejects_bad_width(eps):
    with pytest.raises(InvalidParameterError):
        analytic_small_a(1, eps)


def test_analytic_rejects_bad_index():
    with pytest.raises(InvalidParameterError):
        analytic_small_a(0, 1.0)


def test_analytic_matches_numerov():
    numerov = solve_lowest(build_grid(wall(PotentialSpec.zero(), 1.0), 4001), 3)
    for pair in numerov:
        exact = analytic_small_a(pair.n, 1.0)
        assert pair.energy == pytest.approx(exact.energy, rel=1e-8)
        assert np.max(np.abs(pair.psi - exact.psi)) < 1e-6


# Square-well oracle

def test_square_well_states():
    states = square_well_bound_states(4.0, 1.0)
    assert [s.parity for s in states] == ["even", "odd"]
    assert all(-4.0 < s.energy < 0.0 for s in states)
    assert states[0].energy < states[1].energy
    even = states[0]
    assert even.z * math.tan(even.z) == pytest.approx(math.sqrt(4.0 - even.z ** 2), rel=1e-10)


def test_shallow_square_well_has_one_state():
    assert count_square_well_bound_states(0.1, 1.0) == 1
    assert square_well_bound_states(0.1, 1.0)[0].parity == "even"


def test_square_well_oracle_rejects_bad_input():
    with pytest.raises(InvalidParameterError):
        square_well_bound_states(0.0, 1.0)
    with pytest.raises(InvalidParameterError):
        square_well_bound_states(4.0, -1.0)


def test_wide_box_matches_oracle():
    grid = build_grid(wall(PotentialSpec.square_well(4.0, 1.0), 30.0), 30001)
    pairs = solve_lowest(grid, 2)
    for pair, state in zip(pairs, square_well_bound_states(4.0, 1.0)):
        assert abs(pair.energy - state.energy) < 1e-8


# Schedules and margins

def test_geometric_schedule():
    schedule = geometric_schedule(0.5, 10.0, 40)
    assert len(schedule) == 40
    assert schedule[0] == 0.5 and schedule[-1] == 10.0
    assert all(b > a for a, b in zip(schedule, schedule[1:]))
    assert geometric_schedule(2.0, 2.0, 1) == (2.0,)
    with pytest.raises(InvalidParameterError):
        geometric_schedule(0.0, 1.0, 5)


def test_default_margin():
    assert default_margin(0.0, -4.0) == pytest.approx(4e-3)
    assert default_margin(0.0, -0.1) == pytest.approx(1e-3)
    assert default_margin(math.inf, 0.0) == 1e-3


def test_default_sweep_config():
    config = SweepConfig()
    assert len(config.a_schedule) == 40
    assert config.a_schedule[0] == 0.5 and config.a_schedule[-1] == 10.0


@pytest.mark.parametrize("kwargs", [
    {"a_schedule": (2.0, 1.0)},
    {"a_schedule": (1.0, 1.0)},
    {"a_schedule": (-1.0, 1.0)},
    {"n_max": 0},
    {"margin": -1.0},
    {"workers": 0},
])
def test_sweep_config_validation(kwargs):
    with pytest.raises(InvalidParameterError):
        SweepConfig(**kwargs)


# Sweeps

def test_free_sweep_follows_closed_form():
    branches = sweep(PotentialSpec.zero(), SweepConfig(a_schedule=(1.0, 2.0, 4.0), n_max=2))
    for branch in branches:
        assert branch.a_values == [1.0, 2.0, 4.0]
        for a, energy in zip(branch.a_values, branch.energies):
            assert energy == pytest.approx(infinite_well_energy(branch.n, a), rel=1e-8)
        assert verify_branch(branch).passed
        # threshold 0 is never crossed from below
        assert branch.classification == ESCAPING


def test_oscillator_sweep_settles():
    branches = sweep(PotentialSpec.harmonic(1.0),
                     SweepConfig(a_schedule=(4.0, 6.0, 8.0), n_max=3))
    for branch in branches:
        assert branch.classification == BOUND
        assert branch.node_counts == [branch.n - 1] * 3
        assert branch.energies[-1] == pytest.approx(2 * branch.n - 1, abs=1e-6)
        report = verify_branch(branch)
        assert report.passed and report.monotone and report.node_counts_constant


def test_square_well_sweep(square_well_sweep):
    oracle = square_well_bound_states(4.0, 1.0)
    assert [b.node_counts[0] for b in square_well_sweep] == [0, 1, 2]
    assert all(len(b.samples) == 40 for b in square_well_sweep)
    for branch in square_well_sweep:
        assert verify_branch(branch).passed
        report = verify_branch(branch, tolerance=1e-10)
        assert report.passed, [v.message for v in report.violations]
    for branch, state in zip(square_well_sweep[:2], oracle):
        assert branch.classification == BOUND
        assert abs(branch.energies[-1] - state.energy) < 1e-6
    third = square_well_sweep[2]
    assert third.classification == ESCAPING
    assert 0.0 < third.energies[-1] < 0.05


def test_sweep_is_independent_of_worker_count():
    spec = PotentialSpec.double_well(1.0, 5.0)
    schedule = geometric_schedule(1.0, 4.0, 4)
    serial = sweep(spec, SweepConfig(a_schedule=schedule, n_max=2, n_points=1001, workers=1))
    parallel = sweep(spec, SweepConfig(a_schedule=schedule, n_max=2, n_points=1001, workers=2))
    for one, two in zip(serial, parallel):
        assert one.samples == two.samples
        assert one.classification == two.classification


def test_failed_points_become_diagnostics():
    config = SweepConfig(a_schedule=(1.0, 1.5), n_max=1, n_points=401,
                         options=ShootingOptions(bracket_expansion=0))
    (branch,) = sweep(PotentialSpec.harmonic(100.0), config)
    assert branch.samples == []
    assert len(branch.diagnostics) == 2
    report = verify_branch(branch)
    assert not report.passed
    assert report.violations[0].kind == "samples"


# Branch verdicts

def test_verify_branch_flags_node_change():
    branch = _branch(2, [5.0, 4.0, 3.0])
    branch.samples[1] = BranchSample(a=2.0, energy=4.0, node_count=2)
    report = verify_branch(branch, tolerance=1e-10)
    assert not report.passed
    assert not report.node_counts_constant
    assert [(v.sample, v.kind) for v in report.violations] == [(2, "node_count")]


def test_verify_branch_flags_rising_energy():
    report = verify_branch(_branch(1, [5.0, 4.0, 4.5]), tolerance=1e-10)
    assert not report.monotone
    assert [(v.sample, v.kind) for v in report.violations] == [(3, "monotonicity")]
    # within the allowance the rise is tolerated
    assert verify_branch(_branch(1, [5.0, 4.0, 4.0 + 1e-12]), tolerance=1e-10).passed


def test_verify_branch_default_allows_drift_change():
    branch = _branch(1, [-2.0, -2.0 + 5e-10], a_values=[20.0, 25.0])
    branch.samples = [BranchSample(a=s.a, energy=s.energy, node_count=0, drift=d)
                      for s, d in zip(branch.samples, (1e-10, 9e-10))]
    # the rise is within the growth of the estimated Numerov error
    assert verify_branch(branch).passed
    assert not verify_branch(branch, tolerance=1e-10).passed


def test_verify_branch_single_sample():
    report = verify_branch(_branch(1, [1.0]))
    assert [v.kind for v in report.violations] == ["samples"]


def test_classify_branch():
    assert classify_branch(_branch(1, [3.0, 2.0]), math.inf, 1e-3) == BOUND
    assert classify_branch(_branch(1, [-1.0, -2.0, -2.0, -2.0]), 0.0, 1e-3) == BOUND
    assert classify_branch(_branch(1, [0.5, 0.1, 0.01]), 0.0, 1e-3) == ESCAPING
    # still falling well below the threshold
    assert classify_branch(_branch(1, [-1.0, -1.5, -2.0]), 0.0, 1e-3) == UNDETERMINED
    assert classify_branch(_branch(1, [-1.0]), 0.0, 1e-3) == UNDETERMINED


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v"]))
