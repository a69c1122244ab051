"""Scenario runner: schema, validation diagnostics, exit codes, reports.

Subprocess tests drive `python -m gerbetool.cli` end to end; report
determinism is checked byte for byte after masking the runtime_ms fields,
which are the only nondeterministic bytes by design.
"""

import json
import re
import subprocess
import sys
from pathlib import Path

import pytest

from gerbetool.cli import (
    COMMANDS,
    emit_schema,
    render_report,
    run_scenario,
    validate_scenario,
)
from gerbetool.errors import ConfigError

CONFIG_DIR = Path(__file__).resolve().parent.parent / "configs"


def run_cli(*args, cwd=None):
    return subprocess.run(
        [sys.executable, "-m", "gerbetool.cli", *args],
        capture_output=True,
        text=True,
        cwd=cwd,
    )


def mask_runtimes(text):
    return re.sub(r'"runtime_ms": [0-9.]+', '"runtime_ms": 0', text)


class TestSchema:
    def test_every_command_is_described(self):
        schema = emit_schema()
        assert sorted(schema["commands"]) == sorted(COMMANDS)
        assert schema["scenario"]["command"] == list(COMMANDS)

    def test_schema_subcommand_prints_json(self):
        proc = run_cli("schema")
        assert proc.returncode == 0
        parsed = json.loads(proc.stdout)
        assert set(parsed) == {"commands", "scenario"}


class TestValidation:
    def test_shipped_configs_validate(self):
        configs = sorted(CONFIG_DIR.glob("*.json"))
        assert len(configs) == 8
        for path in configs:
            obj = json.loads(path.read_text())
            command, params, seed, _ = validate_scenario(obj)
            assert command == obj["command"]
            assert seed == obj.get("seed", 0)
            assert set(params) == set(obj.get("params", {})) | set(params)

    def test_unknown_scenario_key(self):
        with pytest.raises(ConfigError, match="unknown key 'mode' in scenario"):
            validate_scenario({"command": "spectrum", "mode": "fast"})

    def test_unknown_command(self):
        with pytest.raises(ConfigError, match="unknown command 'instanton'"):
            validate_scenario({"command": "instanton"})

    def test_unknown_param_key_names_the_command(self):
        with pytest.raises(
            ConfigError, match="unknown key 'n_min' in params for command 'spectrum'"
        ):
            validate_scenario({"command": "spectrum", "params": {"n_min": 2}})

    def test_type_mismatch_names_the_key(self):
        with pytest.raises(ConfigError, match="key 'n_max' .* must be an integer"):
            validate_scenario({"command": "spectrum", "params": {"n_max": "six"}})

    def test_boolean_is_not_an_integer(self):
        with pytest.raises(ConfigError, match="must be an integer"):
            validate_scenario({"command": "spectrum", "params": {"n_max": True}})

    def test_bad_rational_cut(self):
        with pytest.raises(ConfigError, match="not a rational"):
            validate_scenario({"command": "fock", "params": {"cut": "half"}})

    def test_bad_suite_value(self):
        with pytest.raises(ConfigError, match="'trivial' or 'standard'"):
            validate_scenario({"command": "cocycle", "params": {"suite": "exotic"}})

    def test_bad_preset_value(self):
        with pytest.raises(ConfigError, match="must be one of"):
            validate_scenario({"command": "caloron", "params": {"preset": "nahm"}})

    def test_bad_seed(self):
        with pytest.raises(ConfigError, match="'seed' must be an integer"):
            validate_scenario({"command": "spectrum", "seed": 1.5})

    def test_command_mismatch_with_subcommand(self):
        with pytest.raises(ConfigError, match="does not match subcommand"):
            validate_scenario({"command": "cover"}, cli_command="spectrum")

    def test_defaults_fill_missing_params(self):
        _, params, seed, out = validate_scenario({"command": "spectrum"})
        assert params == {"n_max": 6, "phases": [0.15, 0.55]}
        assert seed == 0 and out is None


class TestReports:
    def test_spectrum_battery_passes(self):
        _, params, seed, _ = validate_scenario({"command": "spectrum"})
        report = run_scenario("spectrum", params, seed)
        assert report["status"] == "pass"
        assert report["checks"]
        assert all(r["status"] == "pass" for r in report["checks"])
        for rec in report["checks"]:
            assert set(rec) == {"name", "residual", "runtime_ms", "status", "tolerance"}

    def test_report_is_canonically_ordered_json(self):
        _, params, seed, _ = validate_scenario({"command": "cover"})
        report = run_scenario("cover", params, seed)
        text = render_report(report)
        parsed = json.loads(text)
        assert parsed == json.loads(json.dumps(report))
        assert list(parsed) == sorted(parsed)

    def test_config_hash_depends_on_params(self):
        _, params, seed, _ = validate_scenario({"command": "spectrum"})
        base = run_scenario("spectrum", params, seed)["config_sha256"]
        reseeded = run_scenario("spectrum", params, seed + 1)["config_sha256"]
        assert base != reseeded and len(base) == 64


class TestExitCodes:
    def test_passing_battery_exits_zero(self, tmp_path):
        cfg = tmp_path / "s.json"
        cfg.write_text(json.dumps({"command": "spectrum", "seed": 7}))
        proc = run_cli("spectrum", "--config", str(cfg))
        assert proc.returncode == 0
        report = json.loads(proc.stdout)
        assert report["status"] == "pass"

    def test_missing_config_exits_two(self):
        proc = run_cli("spectrum", "--config", "/nonexistent/scenario.json")
        assert proc.returncode == 2
        assert proc.stderr.startswith("config error:")
        assert proc.stdout == ""

    def test_malformed_json_exits_two(self, tmp_path):
        cfg = tmp_path / "bad.json"
        cfg.write_text("{not json")
        proc = run_cli("spectrum", "--config", str(cfg))
        assert proc.returncode == 2
        assert "not valid JSON" in proc.stderr

    def test_subcommand_mismatch_exits_two(self, tmp_path):
        cfg = tmp_path / "cover.json"
        cfg.write_text(json.dumps({"command": "cover"}))
        proc = run_cli("spectrum", "--config", str(cfg))
        assert proc.returncode == 2
        assert "does not match subcommand" in proc.stderr

    def test_raised_check_exits_one_with_sentinel(self, tmp_path):
        # a 3-step flow path is too coarse to track and must raise inside
        # the battery, which reports the failure instead of crashing
        cfg = tmp_path / "m.json"
        cfg.write_text(
            json.dumps({"command": "moduli", "params": {"flow_steps": 3}, "seed": 7})
        )
        proc = run_cli("moduli", "--config", str(cfg))
        assert proc.returncode == 1
        assert "raised" in proc.stderr
        report = json.loads(proc.stdout)
        assert report["status"] == "fail"
        raised = [r for r in report["checks"] if r["residual"] == 1e300]
        assert raised and all(r["status"] == "fail" for r in raised)

    def test_seed_flag_overrides_scenario(self, tmp_path):
        cfg = tmp_path / "s.json"
        cfg.write_text(json.dumps({"command": "spectrum", "seed": 7}))
        with_flag = run_cli("spectrum", "--config", str(cfg), "--seed", "9")
        plain = run_cli("spectrum", "--config", str(cfg))
        assert with_flag.returncode == plain.returncode == 0
        assert json.loads(with_flag.stdout)["seed"] == 9
        assert json.loads(plain.stdout)["seed"] == 7


class TestDeterminism:
    def test_reports_are_byte_stable_modulo_runtimes(self, tmp_path):
        cfg = tmp_path / "s.json"
        cfg.write_text(json.dumps({"command": "spectrum", "seed": 7}))
        first = run_cli("spectrum", "--config", str(cfg))
        second = run_cli("spectrum", "--config", str(cfg))
        assert first.returncode == second.returncode == 0
        assert mask_runtimes(first.stdout) == mask_runtimes(second.stdout)

    def test_out_file_matches_stdout(self, tmp_path):
        cfg = tmp_path / "s.json"
        cfg.write_text(json.dumps({"command": "cover", "seed": 7}))
        out = tmp_path / "report.json"
        proc = run_cli("cover", "--config", str(cfg), "--out", str(out))
        assert proc.returncode == 0
        assert out.read_text() == proc.stdout
