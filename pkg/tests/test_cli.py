"""Tests for the command-line surface (argument parsing, exit codes, output files)."""

from __future__ import annotations

import json

import pytest

import src.main as main
from src.config import Config, get_config, use_config
from src.errors import SolverError
from src.main import (
    EXIT_CAPACITY,
    EXIT_IO,
    EXIT_OK,
    EXIT_SOLVER,
    EXIT_VALIDATION,
    build_parser,
    run,
)


@pytest.fixture(autouse=True)
def _restore_config():
    saved = get_config()
    yield
    use_config(saved)


def _write_instance(tmp_path, **overrides):
    payload = {
        "resources": [{"id": "r1", "value": 1.0}, {"id": "r2", "value": 0.4}],
        "agents": [[["r1"], ["r2"]], [["r1"], ["r2"]]],
        "basis": {"n": 2, "w": [1, 1]},
    }
    payload.update(overrides)
    path = tmp_path / "game.json"
    path.write_text(json.dumps(payload))
    return path


class TestParser:
    def test_global_options(self):
        args = build_parser().parse_args(["--seed", "5", "--tol", "1e-7", "poa", "--n", "3"])
        assert args.seed == 5
        assert args.tol == 1e-7
        assert args.rule == "sv"
        assert args.method == "auto"

    def test_command_required(self):
        with pytest.raises(SystemExit):
            build_parser().parse_args([])


class TestPoA:
    def test_covering_shapley(self, capsys):
        assert run(["poa", "--n", "2", "--method", "primal"]) == EXIT_OK
        assert "1.5" in capsys.readouterr().out

    def test_witness_file(self, tmp_path):
        out = tmp_path / "witness.json"
        assert run(["--out", str(out), "poa", "--n", "3", "--witness"]) == EXIT_OK
        payload = json.loads(out.read_text())
        assert len(payload["agents"]) == 3

    def test_unknown_basis(self):
        assert run(["poa", "--n", "2", "--basis", "quadratic"]) == EXIT_VALIDATION

    def test_reduced_dual_precondition(self):
        args = ["poa", "--n", "3", "--basis", "power:2", "--method", "reduced"]
        assert run(args) == EXIT_VALIDATION

    def test_tolerance_override(self):
        assert run(["--tol", "1e-7", "poa", "--n", "2"]) == EXIT_OK
        assert get_config().feas_tol == 1e-7


class TestDesign:
    def test_covering_rule_file(self, tmp_path):
        out = tmp_path / "rule.json"
        assert run(["--out", str(out), "design", "--n", "3", "--family", "covering"]) == EXIT_OK
        rule = json.loads(out.read_text())
        assert rule["n"] == 3
        assert rule["f"] == pytest.approx([1.0, 3 / 7, 2 / 7], abs=1e-6)

    def test_submodular_family(self):
        args = ["design", "--n", "4", "--basis", "vehicle:0.8", "--family", "submodular"]
        assert run(args) == EXIT_OK


class TestClosedForm:
    def test_gairing(self, capsys):
        assert run(["closed-form", "gairing", "--n", "2"]) == EXIT_OK
        assert "0.666666666667" in capsys.readouterr().out

    def test_maximizer_output(self, capsys):
        assert run(["closed-form", "covering-wstar", "--n", "4"]) == EXIT_OK
        assert "1.75" in capsys.readouterr().out

    def test_precondition_failure(self):
        args = ["closed-form", "supermodular", "--n", "3", "--basis", "covering"]
        assert run(args) == EXIT_VALIDATION


class TestInstanceCommands:
    def test_validate_ok(self, tmp_path):
        assert run(["validate", str(_write_instance(tmp_path))]) == EXIT_OK

    def test_validate_reports_violations(self, tmp_path):
        path = _write_instance(tmp_path, rule={"f": [0.5, 0.25]})
        assert run(["validate", str(path)]) == EXIT_VALIDATION

    @pytest.mark.parametrize(
        "resources",
        [
            [{"id": "r1", "value": "abc"}, {"id": "r2", "value": 0.4}],
            [{"id": ["r1"], "value": 1.0}, {"id": "r2", "value": 0.4}],
        ],
    )
    def test_validate_malformed_resources(self, tmp_path, resources):
        path = _write_instance(tmp_path, resources=resources)
        assert run(["validate", str(path)]) == EXIT_VALIDATION

    def test_oracle(self, capsys, tmp_path):
        assert run(["oracle", str(_write_instance(tmp_path))]) == EXIT_OK
        assert "0.714285714286" in capsys.readouterr().out

    def test_oracle_capacity(self, tmp_path):
        assert run(["oracle", str(_write_instance(tmp_path)), "--cap", "3"]) == EXIT_CAPACITY

    def test_dynamics_trace(self, tmp_path):
        out = tmp_path / "trace.csv"
        path = _write_instance(tmp_path)
        assert run(["--out", str(out), "dynamics", str(path), "--init", "first"]) == EXIT_OK
        assert out.read_text().splitlines()[0] == "step,agent,action,potential"

    def test_dynamics_rule_override(self, tmp_path):
        path = _write_instance(tmp_path)
        assert run(["dynamics", str(path), "--rule", "gairing", "--random-order"]) == EXIT_OK

    def test_missing_file(self, tmp_path):
        assert run(["validate", str(tmp_path / "absent.json")]) == EXIT_IO

    def test_malformed_file(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("[1, 2")
        assert run(["oracle", str(path)]) == EXIT_VALIDATION


class TestBench:
    def test_random_singleton(self, tmp_path):
        out = tmp_path / "bench.csv"
        args = [
            "--seed", "3", "--out", str(out),
            "bench", "random-singleton", "--samples", "4", "--n-agents", "3",
            "--n-resources", "4", "--rules", "sv,gairing",
        ]
        assert run(args) == EXIT_OK
        lines = out.read_text().splitlines()
        assert lines[0].startswith("seed,scenario,sample,rule")
        assert len(lines) == 1 + 4 * 2

    def test_archive(self, tmp_path, monkeypatch):
        monkeypatch.setenv("POA_DATA_DIR", str(tmp_path))
        use_config(Config())
        args = ["bench", "vehicle-target", "--samples", "2", "--n-agents", "4", "--archive"]
        assert run(args) == EXIT_OK
        assert (tmp_path / "experiments.db").exists()

    def test_file_scenario_needs_instance(self):
        assert run(["bench", "file", "--samples", "1"]) == EXIT_VALIDATION

    def test_solver_failure_exit_code(self, monkeypatch):
        def _fail(*args, **kwargs):
            raise SolverError("pivot budget exhausted")

        monkeypatch.setattr(main, "compute_poa", _fail)
        assert run(["poa", "--n", "2"]) == EXIT_SOLVER
