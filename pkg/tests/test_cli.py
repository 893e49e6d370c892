"""Tests for the command-line interface."""

import json

import pandas as pd
import pytest
from click.testing import CliRunner

from pdgd_ftc.cli import commands
from pdgd_ftc.cli.commands import cli


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture(autouse=True)
def patched_config(mocker, test_config):
    """Route every command to the temporary output directory."""
    mocker.patch.object(commands, "_load_config", return_value=test_config)
    return test_config


def write_scenario(path, payload):
    path.write_text(json.dumps(payload), encoding="utf-8")
    return path


@pytest.fixture
def short_scalar(scenario_dir, temp_dir):
    """Scalar scenario cut to a one-second horizon."""
    payload = json.loads((scenario_dir / "scalar.json").read_text(encoding="utf-8"))
    payload["name"] = "short_scalar"
    payload["simulation"]["T"] = 1.0
    payload.pop("outputs")
    return write_scenario(temp_dir / "short_scalar.json", payload)


class TestRun:
    """Test the run command."""

    def test_scalar_scenario(self, runner, scenario_dir, patched_config):
        result = runner.invoke(cli, ["run", str(scenario_dir / "scalar.json")])
        assert result.exit_code == 0
        assert "✓ Scenario completed" in result.output

        report_path = patched_config.output_dir / "scalar_report.json"
        report = json.loads(report_path.read_text(encoding="utf-8"))
        assert report["exit_code"] == 0
        assert report["eta"] == pytest.approx(2.1)
        assert report["minimal_eta"] == pytest.approx(2.0)
        assert report["eta_condition_ok"] is True
        assert report["certificates"]["verdicts"]["vertex"] == "pass"
        assert max(report["final_kkt_residuals"].values()) <= 1e-4

        trace = pd.read_csv(patched_config.output_dir / "scalar_trace.csv")
        assert len(trace) == 1001
        assert trace["x[0]"].iloc[-1] == pytest.approx(0.5, abs=1e-4)

    def test_tuning_failure_exit_code(self, runner, scenario_dir):
        result = runner.invoke(cli, ["run", str(scenario_dir / "eta_too_small.json")])
        assert result.exit_code == 2
        assert "Tuning condition violated" in result.output
        assert "suggested eta > 2" in result.output

    def test_schema_violation(self, runner, short_scalar, temp_dir):
        payload = json.loads(short_scalar.read_text(encoding="utf-8"))
        payload["simulation"]["T"] = "long"
        bad = write_scenario(temp_dir / "bad.json", payload)
        result = runner.invoke(cli, ["run", str(bad)])
        assert result.exit_code == 1
        assert "/simulation/T" in result.output

    def test_unparsable_file(self, runner, temp_dir):
        bad = temp_dir / "broken.json"
        bad.write_text("{not json", encoding="utf-8")
        result = runner.invoke(cli, ["run", str(bad)])
        assert result.exit_code == 1

    def test_needs_config_or_sweep(self, runner):
        result = runner.invoke(cli, ["run"])
        assert result.exit_code == 1
        assert "exactly one" in result.output

    def test_sweep(self, runner, short_scalar, temp_dir, patched_config):
        sweep_dir = temp_dir / "sweep"
        sweep_dir.mkdir()
        short_scalar.rename(sweep_dir / "good.json")
        (sweep_dir / "broken.json").write_text("[]", encoding="utf-8")
        (sweep_dir / "notes.txt").write_text("ignored", encoding="utf-8")

        result = runner.invoke(cli, ["run", "--sweep", str(sweep_dir)])
        assert result.exit_code == 1
        assert "✓ good.json: exit 0" in result.output
        assert "✗ broken.json: exit 1" in result.output
        assert (patched_config.output_dir / "good" / "short_scalar_report.json").exists()


class TestCertify:
    """Test the certify command."""

    def test_scalar_certificates_pass(self, runner, short_scalar):
        result = runner.invoke(cli, ["certify", str(short_scalar), "--seed", "3"])
        assert result.exit_code == 0
        assert '"verdicts"' in result.output
        assert "✓ All certificates passed" in result.output

    def test_tuning_failure_stops(self, runner, scenario_dir):
        result = runner.invoke(cli, ["certify", str(scenario_dir / "eta_too_small.json")])
        assert result.exit_code == 2
        assert "Certification stopped" in result.output


class TestGains:
    """Test the gains command."""

    def test_prints_json(self, runner, short_scalar):
        result = runner.invoke(cli, ["gains", str(short_scalar)])
        assert result.exit_code == 0
        gains = json.loads(result.output)
        assert gains["eta"] == pytest.approx(2.1)
        assert gains["c"] >= gains["c3"]

    def test_version(self, runner):
        result = runner.invoke(cli, ["--version"])
        assert result.exit_code == 0
        assert "0.1.0" in result.output
