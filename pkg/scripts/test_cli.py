#!/usr/bin/env python3
"""
STURMLAB - Command line tests
Subcommands, exit codes, config precedence and deterministic CSV/JSON output
"""

import csv
import json
import math
import sys
from pathlib import Path

import pytest

# Add the sturmlab package to Python path
sys.path.insert(0, str(Path(__file__).parent.parent))

from sturmlab.cli.main import EXIT_CONFIG, EXIT_FAILURE, EXIT_OK, main


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr().out


def parse_csv(text):
    """Data rows of a result file, header comments skipped"""
    lines = [line for line in text.splitlines() if not line.startswith("#")]
    return list(csv.DictReader(lines))


def header(text):
    return [line[2:] for line in text.splitlines() if line.startswith("# ")]


# solve / nodes

def test_solve_infinite_well(capsys):
    code, out = run(capsys, "solve", "--potential", "zero", "--a", "1", "--k", "3")
    assert code == EXIT_OK
    rows = parse_csv(out)
    assert [int(r["n"]) for r in rows] == [1, 2, 3]
    for row in rows:
        n = int(row["n"])
        assert float(row["energy"]) == pytest.approx((n * math.pi / 2) ** 2, rel=1e-8)
        assert int(row["node_count"]) == n - 1
    assert rows[0]["nodes"] == ""
    left, right = (float(x) for x in rows[2]["nodes"].split(";"))
    assert left == pytest.approx(-1 / 3, abs=1e-6) and right == pytest.approx(1 / 3, abs=1e-6)


def test_solve_oscillator(capsys):
    code, out = run(capsys, "solve", "--potential", "harmonic", "--a", "8", "--k", "3")
    assert code == EXIT_OK
    for row in parse_csv(out):
        assert float(row["energy"]) == pytest.approx(2 * int(row["n"]) - 1, abs=1e-6)


def test_header_echoes_config(capsys):
    _, out = run(capsys, "solve", "--a", "1", "--k", "1", "--workers", "3")
    lines = header(out)
    assert "potential=zero" in lines
    assert "a=1.0" in lines
    assert "n_points=4001" in lines
    assert not any(line.startswith("workers=") for line in lines)


def test_nodes_subcommand(capsys):
    code, out = run(capsys, "nodes", "--a", "1", "--k", "3")
    assert code == EXIT_OK
    rows = parse_csv(out)
    assert [(int(r["n"]), int(r["node"])) for r in rows] == [(2, 1), (3, 1), (3, 2)]
    assert abs(float(rows[0]["x"])) < 1e-6


def test_piecewise_potential(capsys, tmp_path):
    points = tmp_path / "vee.csv"
    points.write_text("x,V\n-2,4\n0,0\n2,4\n")
    code, out = run(capsys, "solve", "--potential", "piecewise", "--points-csv", str(points),
                    "--a", "2", "--k", "3", "--n-points", "2001")
    assert code == EXIT_OK
    assert [int(r["node_count"]) for r in parse_csv(out)] == [0, 1, 2]


def test_json_output(capsys):
    code, out = run(capsys, "solve", "--a", "1", "--k", "2", "--format", "json")
    assert code == EXIT_OK
    document = json.loads(out)
    assert document["config"]["potential"] == "zero"
    assert "workers" not in document["config"]
    assert [s["n"] for s in document["states"]] == [1, 2]
    assert document["states"][1]["node_count"] == 1


def test_output_is_repeatable(capsys):
    _, first = run(capsys, "solve", "--potential", "double-well", "--a", "4", "--k", "2",
                   "--n-points", "1001")
    _, second = run(capsys, "solve", "--potential", "double-well", "--a", "4", "--k", "2",
                    "--n-points", "1001")
    assert first == second


# Exit codes

def test_invalid_half_width(capsys):
    code, out = run(capsys, "solve", "--a", "-1")
    assert code == EXIT_CONFIG
    assert out == ""


def test_even_grid_rejected(capsys):
    assert run(capsys, "solve", "--n-points", "100")[0] == EXIT_CONFIG


def test_short_schedule_rejected(capsys):
    assert run(capsys, "sweep", "--a-count", "1")[0] == EXIT_CONFIG


def test_unknown_command_and_flag(capsys):
    assert run(capsys, "integrate")[0] == EXIT_CONFIG
    assert run(capsys, "solve", "--colour", "blue")[0] == EXIT_CONFIG


def test_help_exits_cleanly(capsys):
    code, out = run(capsys, "solve", "--help")
    assert code == EXIT_OK
    assert "--n-points" in out


def test_solver_failure_exit_code(capsys):
    code, _ = run(capsys, "solve", "--potential", "harmonic", "--k-stiffness", "100",
                  "--a", "1", "--n-points", "401", "--bracket-expansion", "0")
    assert code == EXIT_FAILURE


# sweep

SWEEP_ARGS = ("sweep", "--potential", "harmonic", "--a-min", "2", "--a-max", "4",
              "--a-count", "3", "--n-max", "2", "--n-points", "1001")


def test_sweep_table(capsys):
    code, out = run(capsys, *SWEEP_ARGS, "--workers", "1")
    assert code == EXIT_OK
    rows = parse_csv(out)
    assert len(rows) == 6
    assert {int(r["node_count"]) for r in rows if r["branch"] == "2"} == {1}
    assert "branch=1 classification=bound node_counts_constant=true monotone=true" \
        in header(out)


def test_sweep_independent_of_workers(capsys):
    _, serial = run(capsys, *SWEEP_ARGS, "--workers", "1")
    _, parallel = run(capsys, *SWEEP_ARGS, "--workers", "2")
    assert serial == parallel


def test_square_well_sweep_census(capsys):
    code, out = run(capsys, "sweep", "--potential", "square-well", "--v0", "4", "--b", "1",
                    "--a-min", "2", "--a-max", "12", "--a-count", "4", "--n-max", "2",
                    "--n-points", "2001", "--workers", "1")
    assert code == EXIT_OK
    lines = header(out)
    assert "transcendental_bound_states=2" in lines
    assert "oracle_states_below_threshold=2" in lines


# verify

def test_verify_oscillator(capsys):
    code, out = run(capsys, "verify", "--potential", "harmonic", "--a", "8", "--k", "6")
    assert code == EXIT_OK
    rows = {r["check"]: r for r in parse_csv(out)}
    assert set(rows) == {"normalization", "node_count", "interlacing", "separation",
                         "critical_touch", "derivative_identity", "integral_identity",
                         "cross_solver"}
    assert all(r["status"] == "passed" for r in rows.values())
    assert "overall_status=passed" in header(out)


def test_verify_infinite_well(capsys):
    assert run(capsys, "verify", "--a", "1", "--k", "8")[0] == EXIT_OK


def test_verify_zero_tolerance_fails_residual_checks(capsys):
    code, out = run(capsys, "verify", "--a", "1", "--k", "4", "--tolerance", "0",
                    "--format", "json")
    assert code == EXIT_FAILURE
    document = json.loads(out)
    assert document["overall_status"] == "failed"
    assert set(document["failed"]) == {"derivative_identity", "integral_identity",
                                       "cross_solver"}
    assert document["checks"]["node_count"]["status"] == "passed"


# oracle

def test_oracle_subcommand(capsys):
    code, out = run(capsys, "oracle", "--v0", "4", "--b", "1")
    assert code == EXIT_OK
    rows = parse_csv(out)
    assert [r["parity"] for r in rows] == ["even", "odd"]
    assert all(-4.0 < float(r["energy"]) < 0.0 for r in rows)


# Config file and output path

def test_config_file_with_flag_override(capsys, tmp_path):
    config = tmp_path / "run.yaml"
    config.write_text("potential: harmonic\na: 8.0\nk: 2\n")
    code, out = run(capsys, "solve", "--config", str(config), "--k", "3")
    assert code == EXIT_OK
    rows = parse_csv(out)
    assert len(rows) == 3
    assert float(rows[0]["energy"]) == pytest.approx(1.0, abs=1e-6)


def test_config_file_unknown_key(capsys, tmp_path):
    config = tmp_path / "run.yaml"
    config.write_text("potential: harmonic\nsmoothing: 3\n")
    assert run(capsys, "solve", "--config", str(config))[0] == EXIT_CONFIG


def test_out_file(capsys, tmp_path):
    target = tmp_path / "results" / "solve.csv"
    code, out = run(capsys, "solve", "--a", "1", "--k", "2", "--out", str(target))
    assert code == EXIT_OK
    assert out == ""
    assert len(parse_csv(target.read_text())) == 2


def test_log_dir(capsys, tmp_path):
    code, _ = run(capsys, "oracle", "-v", "--log-dir", str(tmp_path / "logs"))
    assert code == EXIT_OK
    assert (tmp_path / "logs" / "sturmlab.log").exists()


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v"]))
