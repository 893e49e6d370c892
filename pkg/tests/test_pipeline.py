"""Tests for scenario loading, the stage pipeline and report output."""

import json

import numpy as np
import pandas as pd
import pytest

from pdgd_ftc.cli.report import emit_trace
from pdgd_ftc.cli.scenario import load_scenario, parse_scenario, validate_payload
from pdgd_ftc.closedloop import Trace
from pdgd_ftc.common.errors import ScenarioError
from pdgd_ftc.common.status import ExitCode, RunStatus, Verdict
from pdgd_ftc.common.tabular import atomic_write_json, to_json_text
from pdgd_ftc.orchestrator import GAINS_ONLY, Pipeline, run_scenario


def scalar_payload(scenario_dir, **simulation):
    payload = json.loads((scenario_dir / "scalar.json").read_text(encoding="utf-8"))
    payload["simulation"].update(simulation)
    payload.pop("outputs")
    return payload


class TestScenario:
    """Test scenario validation and parsing."""

    def test_shipped_scenarios_validate(self, scenario_dir):
        for path in sorted(scenario_dir.glob("*.json")):
            config = load_scenario(path)
            assert config.name == path.stem

    def test_kinds(self, scenario_dir):
        assert load_scenario(scenario_dir / "scalar.json").kind == "generic"
        assert load_scenario(scenario_dir / "microgrid_fig1.json").kind == "microgrid"

    def test_every_violation_reported(self, scenario_dir):
        payload = scalar_payload(scenario_dir, T=-1.0, record_every=0)
        payload["unexpected"] = True
        with pytest.raises(ScenarioError) as exc:
            validate_payload(payload)
        pointers = exc.value.pointers()
        assert "/simulation/T" in pointers
        assert "/simulation/record_every" in pointers
        assert len(pointers) >= 3

    def test_plant_kind_exclusive(self, scenario_dir):
        payload = scalar_payload(scenario_dir)
        payload["plant"]["microgrid"] = {"buses": [], "lines": [], "targets": {}}
        with pytest.raises(ScenarioError):
            validate_payload(payload)

    def test_defaults(self, scenario_dir):
        payload = scalar_payload(scenario_dir)
        payload.pop("controller")
        config = parse_scenario(payload)
        assert config.name == "scalar"
        assert config.controller.eta == "auto"
        assert config.certificates.enabled

    def test_output_paths(self, scenario_dir, temp_dir):
        config = parse_scenario(scalar_payload(scenario_dir))
        trace, report = config.output_paths(temp_dir)
        assert trace == temp_dir / "scalar_trace.csv"
        assert report == temp_dir / "scalar_report.json"

    def test_yaml_scenario(self, scenario_dir, temp_dir):
        yaml = pytest.importorskip("yaml")
        path = temp_dir / "scalar.yaml"
        path.write_text(yaml.safe_dump(scalar_payload(scenario_dir)), encoding="utf-8")
        assert load_scenario(path).simulation.T == pytest.approx(100.0)

    def test_missing_file(self, temp_dir):
        with pytest.raises(ScenarioError):
            load_scenario(temp_dir / "absent.json")


class TestPipeline:
    """Test stage orchestration."""

    def test_full_scalar_run(self, scenario_dir, test_config):
        config = parse_scenario(scalar_payload(scenario_dir, T=20.0))
        result = Pipeline(test_config).run_scenario(config, seed=1)
        assert result.exit_code is ExitCode.OK
        ctx = result.context
        assert ctx.status is RunStatus.COMPLETED
        assert ctx.envelope.monotone
        assert ctx.certificates.verdicts["p2_floor"] is Verdict.PASS
        assert result.trace_path.exists()
        assert result.report_path.exists()
        assert result.report["gamma_f"] == 1.0

    def test_gains_only(self, scenario_dir, test_config, temp_dir):
        path = temp_dir / "scalar.json"
        path.write_text(json.dumps(scalar_payload(scenario_dir)), encoding="utf-8")
        result = run_scenario(path, test_config, names=GAINS_ONLY)
        assert result.exit_code is ExitCode.OK
        assert result.trace_path is None
        assert result.report["final_kkt_residuals"] is None
        assert result.report["certificates"] is None
        assert result.report["gains"]["eta"] == pytest.approx(2.1)

    def test_tuning_failure(self, scenario_dir, test_config):
        result = run_scenario(scenario_dir / "eta_too_small.json", test_config,
                              output_dir=test_config.output_dir / "tuning")
        assert result.exit_code is ExitCode.TUNING
        assert result.context.trace is None
        report = json.loads(result.report_path.read_text(encoding="utf-8"))
        assert report["status"] == "tuning_failed"
        assert report["minimal_eta"] == pytest.approx(2.0)
        assert report["eta_condition_ok"] is False

    def test_tuning_failure_after_fault(self, scenario_dir, test_config):
        payload = scalar_payload(scenario_dir, T=2.0)
        payload["faults"] = [{"time": 1.0, "kind": "matrix_change", "subsystem": 1,
                              "matrices": {"A": [[-0.01]], "B": [[0.01]]}}]
        result = Pipeline(test_config).run_scenario(parse_scenario(payload), write=False)
        assert result.exit_code is ExitCode.TUNING
        assert result.context.status is RunStatus.TUNING_FAILED
        assert result.context.margin.eta_condition_ok
        assert result.report["eta_condition_ok"] is False
        assert result.report["minimal_eta"] > 1e3
        assert "after fault" in result.report["error"]

    def test_invalid_scenario(self, temp_dir, test_config):
        path = temp_dir / "invalid.json"
        path.write_text(json.dumps({"plant": {}}), encoding="utf-8")
        result = run_scenario(path, test_config)
        assert result.exit_code is ExitCode.INVALID
        assert result.context is None
        assert "/" in result.report["violations"]


class TestOutput:
    """Test trace and report files."""

    def test_empty_trace_is_header_only(self, temp_dir):
        path = temp_dir / "empty.csv"
        trace = Trace.empty(n=1, n_theta=5, m=1, p=1)
        emit_trace(trace, path)
        lines = path.read_text(encoding="utf-8").splitlines()
        assert len(lines) == 1
        assert lines[0].split(",") == trace.columns()
        assert pd.read_csv(path).empty

    def test_json_is_deterministic(self):
        payload = {"b": np.float64(1.5), "a": [np.int64(2), float("nan")],
                   "v": Verdict.PASS, "m": np.eye(2)}
        text = to_json_text(payload)
        assert text == to_json_text(dict(reversed(list(payload.items()))))
        decoded = json.loads(text)
        assert decoded == {"a": [2, None], "b": 1.5, "m": [[1.0, 0.0], [0.0, 1.0]],
                           "v": "pass"}

    def test_atomic_write_leaves_no_temp_files(self, temp_dir):
        target = temp_dir / "nested" / "report.json"
        atomic_write_json({"x": 1}, target)
        atomic_write_json({"x": 2}, target)
        assert json.loads(target.read_text(encoding="utf-8")) == {"x": 2}
        assert [p.name for p in target.parent.iterdir()] == ["report.json"]
