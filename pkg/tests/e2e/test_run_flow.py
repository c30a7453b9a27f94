"""
End-to-end tests of the sqzsim command line.
"""

import json
import re
import sys
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from pathlib import Path

import numpy as np
import pytest
import typer
from typer.testing import CliRunner

from src.config import get_settings
from src.main import app, main

pytestmark = pytest.mark.e2e

runner = CliRunner()

ROOT = Path(__file__).resolve().parents[2]


@pytest.fixture(autouse=True)
def threaded_workers(monkeypatch):
    """Keep worker pools in-process and reload settings around each test."""
    monkeypatch.setenv("SQZ_MC_BACKEND", "threading")
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


def _error_line(output: str) -> dict:
    lines = [line for line in output.splitlines() if line.startswith('{"error"')]
    assert lines, output
    return json.loads(lines[-1])


def test_run_writes_results(tmp_path, write_config):
    out = tmp_path / "out"
    result = runner.invoke(app, ["run", str(write_config()), "-o", str(out)])
    assert result.exit_code == 0, result.output
    assert (out / "Spectrum_spectrum.csv").exists()
    payload = json.loads((out / "report.json").read_text())
    assert payload["verdict"] == "PASS"
    assert payload["experiment"] == "Spectrum"


def test_workers_do_not_change_outputs(tmp_path, write_config):
    """Same config and seed, different worker counts: identical bytes."""
    path = write_config()
    one, two = tmp_path / "one", tmp_path / "two"
    assert runner.invoke(app, ["run", str(path), "-o", str(one), "-w", "1"]).exit_code == 0
    assert runner.invoke(app, ["run", str(path), "-o", str(two), "-w", "2"]).exit_code == 0
    names = sorted(p.name for p in one.iterdir())
    assert names == sorted(p.name for p in two.iterdir())
    for name in names:
        assert (one / name).read_bytes() == (two / name).read_bytes(), name


def test_invalid_config_reports_json_error(write_config):
    result = runner.invoke(app, ["run", str(write_config(n_points=50))])
    assert result.exit_code == 2
    record = _error_line(result.output)
    assert record["error"] == "ConfigError"
    assert record["field"] == "lattice.n_points"
    assert record["line"] == 7
    assert record["exit_code"] == 2


def test_experiment_override(tmp_path, write_config):
    out = tmp_path / "out"
    args = ["run", str(write_config()), "-o", str(out), "-e", "Corr2"]
    runner.invoke(app, args)
    assert (out / "Corr2_corr2.csv").exists()
    assert json.loads((out / "report.json").read_text())["experiment"] == "Corr2"


def test_export_ensemble(tmp_path, write_config):
    target = tmp_path / "vacuum.bin"
    args = ["export-ensemble", str(write_config()), str(target), "--stage", "vacuum", "-n", "10"]
    result = runner.invoke(app, args)
    assert result.exit_code == 0, result.output
    header = json.loads((tmp_path / "vacuum.bin.json").read_text())
    assert header["stage"] == "vacuum"
    assert header["n_realizations"] == 10
    data = np.fromfile(target, dtype="<c16")
    assert data.size == 10 * header["n_points"]


def test_export_unknown_stage(tmp_path, write_config):
    args = ["export-ensemble", str(write_config()), str(tmp_path / "x.bin"), "--stage", "raw"]
    assert runner.invoke(app, args).exit_code == 1


def test_experiments_lists_names():
    result = runner.invoke(app, ["experiments"])
    assert result.exit_code == 0
    for name in ("Spectrum", "TpaScaling", "ValidateAll"):
        assert name in result.output


def test_usage_error_exits_one(monkeypatch):
    monkeypatch.setattr(sys, "argv", ["sqzsim", "run"])
    with pytest.raises(SystemExit) as exc_info:
        main()
    assert exc_info.value.code == 1


def test_abort_exits_one(monkeypatch):
    """Ctrl-C at a prompt is a usage outcome, not a crash."""

    def aborted(**_):
        raise typer.Abort()

    monkeypatch.setattr("src.main.app", aborted)
    with pytest.raises(SystemExit) as exc_info:
        main()
    assert exc_info.value.code == 1


def test_cli_dependencies_declared():
    """Every CLI import is a declared runtime dependency."""
    manifest = tomllib.loads((ROOT / "pyproject.toml").read_text())
    dependencies = manifest["project"]["dependencies"]
    declared = {re.split(r"[<>=\[ ]", dep, maxsplit=1)[0] for dep in dependencies}
    assert {"click", "typer", "rich"} <= declared


def test_main_propagates_exit_code(monkeypatch, write_config):
    monkeypatch.setattr(sys, "argv", ["sqzsim", "run", str(write_config(n_points=50))])
    with pytest.raises(SystemExit) as exc_info:
        main()
    assert exc_info.value.code == 2
