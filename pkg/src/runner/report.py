"""
Result files: one CSV per table, report.json and a plain-text report.

CSVs open with `#` metadata lines (version, config hash, experiment,
seed) followed by an RFC-4180 header row. Floats are written in
scientific notation with the configured number of significant digits;
missing values (NaN) are written as empty fields. Nothing time-dependent
is written, so a fixed config reproduces every file byte for byte.
"""

import csv
import io
import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np
from rich.console import Console
from rich.table import Table as RichTable

from src import __version__
from src.config import get_settings
from src.experiments.base import ExperimentResult, Table
from src.runner.parser import ExperimentConfig, canonical_json, config_hash

logger = logging.getLogger(__name__)

REPORT_JSON = "report.json"
REPORT_TEXT = "report.txt"


class ReportError(Exception):
    """An output file could not be written."""

    pass


@dataclass
class ReportFiles:
    csv: list[Path] = field(default_factory=list)
    json: Path | None = None
    text: Path | None = None

    def all(self) -> list[Path]:
        return [*self.csv, *[p for p in (self.json, self.text) if p is not None]]


def format_value(value: Any, digits: int) -> str:
    """CSV cell text: scientific floats, integers as is, NaN as empty."""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        x = float(value)
        if math.isnan(x):
            return ""
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return f"{x:.{digits - 1}e}"
    return str(value)


def to_jsonable(value: Any) -> Any:
    """Plain JSON types; non-finite floats become null."""
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return to_jsonable(value.tolist())
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (complex, np.complexfloating)):
        return {"re": to_jsonable(float(value.real)), "im": to_jsonable(float(value.imag))}
    if isinstance(value, (float, np.floating)):
        x = float(value)
        return x if math.isfinite(x) else None
    return value


def _inside(root: Path, path: Path) -> Path:
    resolved = path.resolve()
    if not resolved.is_relative_to(root.resolve()):
        raise ReportError(f"refusing to write outside the output directory: {path}")
    return resolved


def _collect_tables(result: ExperimentResult) -> list[tuple[str, str, Table]]:
    """(experiment, table name, table) for a result and all its children."""
    found = [(result.name, name, table) for name, table in result.tables.items()]
    for child in result.children:
        found.extend(_collect_tables(child))
    return found


def write_csv(
    path: Path,
    table: Table,
    metadata: dict[str, Any],
    digits: int,
) -> Path:
    with path.open("w", newline="", encoding="utf-8") as handle:
        for key, value in metadata.items():
            handle.write(f"# {key}: {value}\n")
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(table.columns)
        for row in table.rows:
            writer.writerow([format_value(v, digits) for v in row])
    return path


def _render_text(
    result: ExperimentResult,
    metadata: dict[str, Any],
    width: int,
) -> str:
    console = Console(record=True, width=width, file=io.StringIO(), color_system=None)
    console.print(f"squeezed-vacuum-sim {metadata['version']}")
    console.print(f"config hash: {metadata['config_hash']}")
    console.print(f"experiment:  {metadata['experiment']}   seed: {metadata['seed']}")
    console.print()

    results = result.children or [result]
    summary = RichTable(title="Summary")
    summary.add_column("Experiment")
    summary.add_column("Verdict")
    summary.add_column("Checks", justify="right")
    for r in results:
        verdict = "ERROR" if not r.success else "PASS" if r.passed else "FAIL"
        summary.add_row(r.name, verdict, f"{sum(c.passed for c in r.checks)}/{len(r.checks)}")
    console.print(summary)

    for r in results:
        console.print()
        if r.error:
            console.print(f"{r.name}: ERROR {r.error}")
            continue
        checks = RichTable(title=r.name)
        checks.add_column("Check")
        checks.add_column("Verdict")
        checks.add_column("Value", justify="right")
        checks.add_column("Bound", justify="right")
        checks.add_column("Detail")
        for c in r.checks:
            checks.add_row(
                c.name,
                "PASS" if c.passed else "FAIL",
                "" if c.value is None else f"{c.value:.6g}",
                "" if c.bound is None else f"{c.bound:.6g}",
                c.detail,
            )
        console.print(checks)
        if r.report.get("factor_of_two_flag"):
            console.print(
                "note: the mode-energy reduction chain gives P_SF/2 while its stated limit is 1/2"
            )
        coherence = r.report.get("gate_coherence")
        if coherence and not coherence["long_gate"]:
            console.print(
                f"note: gate duration x spectral width = {coherence['duration_x_width']:.3g} "
                f"is below {coherence['threshold']:g}; T is not long against the coherence time"
            )
    return console.export_text()


def emit_report(
    result: ExperimentResult,
    config: ExperimentConfig,
    output_dir: Path | str,
) -> ReportFiles:
    """
    Write every table as CSV plus report.json and report.txt under output_dir.

    Table files are named `<experiment>_<table>.csv`. The JSON report
    carries the canonical config, its hash, the seed, every check with
    its verdict and each experiment's report payload.
    """
    settings = get_settings()
    digits = settings.output.csv_digits
    root = Path(output_dir)
    try:
        root.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise ReportError(f"cannot create output directory {root}: {e}") from e

    metadata = {
        "version": __version__,
        "config_hash": config_hash(config),
        "experiment": config.experiment.value,
        "seed": config.noise.seed,
    }
    # output_dir is left out so reruns into another directory match byte for byte
    embedded = json.loads(canonical_json(config))
    embedded.pop("output_dir", None)
    files = ReportFiles()
    try:
        for experiment, name, table in _collect_tables(result):
            path = _inside(root, root / f"{experiment}_{name}.csv")
            files.csv.append(write_csv(path, table, metadata, digits))

        payload = {
            **metadata,
            "verdict": "PASS" if result.passed else "FAIL",
            "config": embedded,
            "result": result.to_dict(),
            "files": [p.name for p in files.csv],
        }
        json_path = _inside(root, root / REPORT_JSON)
        json_path.write_text(
            json.dumps(to_jsonable(payload), indent=2, sort_keys=True, allow_nan=False) + "\n",
            encoding="utf-8",
        )
        files.json = json_path

        text_path = _inside(root, root / REPORT_TEXT)
        text_path.write_text(
            _render_text(result, metadata, settings.output.report_width), encoding="utf-8"
        )
        files.text = text_path
    except OSError as e:
        raise ReportError(f"cannot write results to {root}: {e}") from e

    logger.info(f"Wrote {len(files.all())} files to {root}")
    return files


__all__ = [
    "REPORT_JSON",
    "REPORT_TEXT",
    "ReportError",
    "ReportFiles",
    "emit_report",
    "format_value",
    "to_jsonable",
    "write_csv",
]
