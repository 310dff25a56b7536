#!/usr/bin/env python3
"""
STURMLAB - Configuration tests
Defaults, file/flag precedence, YAML loading and validation
"""

import sys
from pathlib import Path

import pytest

# Add the sturmlab package to Python path
sys.path.insert(0, str(Path(__file__).parent.parent))

from sturmlab.config.app import RunConfig, ToleranceConfig, get_tolerances, load_config_file
from sturmlab.errors import ConfigError

REPO_CONFIG = Path(__file__).parent.parent / "config" / "sturmlab.yaml"


def test_defaults():
    config = RunConfig.from_sources()
    assert config.potential == "zero"
    assert config.n_points == 4001
    assert config.k == 5
    assert (config.a_min, config.a_max, config.a_count) == (0.5, 10.0, 40)
    assert config.margin is None and config.workers is None
    assert config.format == "csv"


def test_flags_override_file():
    config = RunConfig.from_sources({"a": 3.0, "k": 2}, {"a": 5.0, "k": None})
    assert config.a == 5.0
    # a None flag leaves the file value in place
    assert config.k == 2


def test_numeric_coercion():
    config = RunConfig.from_sources({"a": "2.5", "n_points": 101.0})
    assert config.a == 2.5
    assert config.n_points == 101 and isinstance(config.n_points, int)


def test_unknown_keys_rejected():
    with pytest.raises(ConfigError) as excinfo:
        RunConfig.from_sources({"colour": "blue"})
    assert "colour" in excinfo.value.details["keys"]
    with pytest.raises(ConfigError):
        RunConfig.from_sources(None, {"bogus": 1})


@pytest.mark.parametrize("values", [
    {"a": 0.0},
    {"a": -1.0},
    {"n_points": 4000},
    {"n_points": 1},
    {"n_points": 10.5},
    {"k": 0},
    {"n_max": 0},
    {"a_count": 1},
    {"a_min": 2.0, "a_max": 1.0},
    {"margin": -0.1},
    {"bisection_tol": 0.0},
    {"tolerance": -1.0},
    {"workers": 0},
    {"workers": 2.5},
    {"workers": True},
    {"potential": "morse"},
    {"format": "xml"},
    {"potential": "square-well", "v0": 0.0},
    {"potential": "double-well", "c2": -1.0},
    {"potential": "piecewise"},
    {"a": "wide"},
])
def test_validation_errors(values):
    with pytest.raises(ConfigError):
        RunConfig.from_sources(values)


def test_whole_float_workers_accepted():
    assert RunConfig.from_sources({"workers": 2.0}).workers == 2


def test_config_error_is_value_error():
    with pytest.raises(ValueError):
        RunConfig.from_sources({"k": -3})


def test_load_repo_config():
    values = load_config_file(str(REPO_CONFIG))
    assert set(values) <= set(RunConfig.keys())
    config = RunConfig.from_sources(values)
    assert config.potential == "square-well"
    assert config.a == 10.0


def test_load_config_file_dashes(tmp_path):
    path = tmp_path / "run.yaml"
    path.write_text("n-points: 101\nbisection-tol: 1.0e-10\n")
    assert load_config_file(str(path)) == {"n_points": 101, "bisection_tol": 1e-10}


def test_load_config_file_empty(tmp_path):
    path = tmp_path / "empty.yaml"
    path.write_text("")
    assert load_config_file(str(path)) == {}


@pytest.mark.parametrize("text", [
    "a: [1, 2]\n",
    "sweep:\n  a_min: 1.0\n",
    "- a\n- b\n",
    "a: [unclosed\n",
])
def test_load_config_file_rejects(tmp_path, text):
    path = tmp_path / "bad.yaml"
    path.write_text(text)
    with pytest.raises(ConfigError):
        load_config_file(str(path))


def test_missing_config_file(tmp_path):
    with pytest.raises(ConfigError):
        load_config_file(str(tmp_path / "nowhere.yaml"))


def test_to_dict_round_trips_keys():
    config = RunConfig.from_sources({"a": 2.0})
    assert list(config.to_dict()) == RunConfig.keys()


def test_tolerances_are_frozen():
    tolerances = get_tolerances()
    assert isinstance(tolerances, ToleranceConfig)
    with pytest.raises(Exception):
        tolerances.noise_floor = 0.0


def test_tolerance_formulas():
    tolerances = ToleranceConfig()
    assert tolerances.cross_solver(0.1, 1.0) == pytest.approx(0.01 * (5 * 2 + 4 / 8))
    assert tolerances.derivative_identity(0.1, -3.0, 9.0) == pytest.approx(0.01 * 4 * 10)
    assert tolerances.integral_identity(0.0, 3.0, 9.0) == 0.0


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v"]))
