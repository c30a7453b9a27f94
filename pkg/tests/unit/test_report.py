"""
Unit tests for result files.
"""

import json
import math

import numpy as np
import pytest

from src.experiments.base import ExperimentResult, Table
from src.runner.parser import config_hash, parse_config
from src.runner.report import (
    REPORT_JSON,
    REPORT_TEXT,
    ReportError,
    _inside,
    emit_report,
    format_value,
    to_jsonable,
    write_csv,
)


@pytest.fixture
def result() -> ExperimentResult:
    table = Table(["omega", "value"])
    table.add(99.5, 0.25)
    table.add(100.0, float("nan"))
    out = ExperimentResult(name="Spectrum", tables={"spectrum": table}, report={"N": 1.5})
    out.check("closed_form", True, 1e-15, 1e-12)
    return out


class TestFormatValue:
    """Tests for CSV cell text."""

    def test_float_digits(self):
        assert format_value(0.1, 17) == "1.0000000000000001e-01"
        assert format_value(2.0, 15) == "2.00000000000000e+00"

    def test_nan_is_empty(self):
        assert format_value(float("nan"), 17) == ""

    def test_infinities(self):
        assert format_value(math.inf, 17) == "inf"
        assert format_value(-math.inf, 17) == "-inf"

    def test_integers_and_bools(self):
        assert format_value(np.int64(7), 17) == "7"
        assert format_value(True, 17) == "true"
        assert format_value("HG0", 17) == "HG0"


class TestToJsonable:
    """Tests for JSON conversion."""

    def test_complex(self):
        assert to_jsonable(1 + 2j) == {"re": 1.0, "im": 2.0}

    def test_non_finite_become_null(self):
        assert to_jsonable([float("nan"), np.inf]) == [None, None]

    def test_numpy(self):
        payload = to_jsonable({"a": np.arange(3), "b": np.bool_(True), 4: np.float32(0.5)})
        assert payload == {"a": [0, 1, 2], "b": True, "4": 0.5}


class TestWriteCsv:
    """Tests for the CSV layout."""

    def test_metadata_then_header(self, tmp_path, result):
        path = write_csv(tmp_path / "x.csv", result.tables["spectrum"], {"seed": 3}, 17)
        lines = path.read_text().splitlines()
        assert lines[0] == "# seed: 3"
        assert lines[1] == "omega,value"
        assert lines[3].endswith(",")


class TestEmitReport:
    """Tests for the full set of result files."""

    def test_files(self, tmp_path, write_config, result):
        config = parse_config(write_config())
        files = emit_report(result, config, tmp_path / "out")
        assert [p.name for p in files.csv] == ["Spectrum_spectrum.csv"]
        assert files.json.name == REPORT_JSON
        assert files.text.name == REPORT_TEXT

    def test_json_payload(self, tmp_path, write_config, result):
        config = parse_config(write_config())
        files = emit_report(result, config, tmp_path / "out")
        payload = json.loads(files.json.read_text())
        assert payload["config_hash"] == config_hash(config)
        assert payload["verdict"] == "PASS"
        assert payload["seed"] == 3
        assert "output_dir" not in payload["config"]
        assert payload["result"]["checks"][0]["verdict"] == "PASS"

    def test_text_report(self, tmp_path, write_config, result):
        config = parse_config(write_config())
        files = emit_report(result, config, tmp_path / "out")
        text = files.text.read_text()
        assert config_hash(config) in text
        assert "PASS" in text

    def test_independent_of_directory(self, tmp_path, write_config, result):
        config = parse_config(write_config())
        first = emit_report(result, config, tmp_path / "a")
        second = emit_report(result, config, tmp_path / "b")
        for a, b in zip(first.all(), second.all(), strict=True):
            assert a.read_bytes() == b.read_bytes()

    def test_unwritable_directory(self, tmp_path, write_config, result):
        blocker = tmp_path / "blocker"
        blocker.write_text("")
        config = parse_config(write_config())
        with pytest.raises(ReportError):
            emit_report(result, config, blocker)

    def test_refuses_paths_outside_root(self, tmp_path):
        with pytest.raises(ReportError):
            _inside(tmp_path / "out", tmp_path / "out" / ".." / "escape.csv")
