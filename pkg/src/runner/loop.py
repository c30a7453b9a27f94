"""
Runner Loop - parse a config, execute one experiment, write the results.

Simple loop that:
1. Parses and validates the config (ConfigError on anything invalid)
2. Builds the shared run context
3. Executes the requested experiment through the registry
4. Emits CSV/JSON/text outputs and maps the outcome to an exit code

Exit codes: 0 all checks PASS, 1 usage or unwritable output, 2 invalid
configuration or parameters, 3 internal assertion or any FAIL verdict.
"""

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from src.config import get_settings
from src.experiments import registry
from src.experiments.base import ExperimentResult, RunContext
from src.physics.errors import (
    InsufficientRealizationsError,
    LatticeError,
    ModeLeakError,
    ParameterError,
    UnderResolvedError,
)
from src.physics.sampling import Backend
from src.runner.parser import ConfigError, build_setup, config_hash, parse_config
from src.runner.report import ReportError, emit_report

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INVALID = 2
EXIT_FAILED = 3

INVALID_INPUT_ERRORS: tuple[type[BaseException], ...] = (
    ConfigError,
    ParameterError,
    LatticeError,
    UnderResolvedError,
    InsufficientRealizationsError,
    ModeLeakError,
)


@dataclass
class RunOutcome:
    """What a run produced and how it ended."""

    exit_code: int
    config_hash: str | None = None
    files: list[Path] = field(default_factory=list)
    result: ExperimentResult | None = None
    error_record: dict[str, Any] | None = None

    @property
    def ok(self) -> bool:
        return self.exit_code == EXIT_OK


def exit_code_for(exc: BaseException) -> int:
    if isinstance(exc, ReportError):
        return EXIT_USAGE
    if isinstance(exc, INVALID_INPUT_ERRORS):
        return EXIT_INVALID
    return EXIT_FAILED


def error_record(exc: BaseException, exit_code: int | None = None) -> dict[str, Any]:
    """Machine-parsable description of an error, one JSON object."""
    code = exit_code_for(exc) if exit_code is None else exit_code
    return {
        "error": type(exc).__name__,
        "message": getattr(exc, "message", str(exc)),
        "field": getattr(exc, "field", None),
        "line": getattr(exc, "line", None),
        "exit_code": code,
    }


def _errors(result: ExperimentResult) -> list[tuple[str, BaseException]]:
    found: list[tuple[str, BaseException]] = []
    if result.exception is not None:
        found.append((result.name, result.exception))
    elif result.error is not None:
        found.append((result.name, RuntimeError(result.error)))
    for child in result.children:
        found.extend(_errors(child))
    return found


def _failed_checks(result: ExperimentResult) -> list[str]:
    names = [f"{result.name}.{c.name}" for c in result.checks if not c.passed]
    for child in result.children:
        names.extend(_failed_checks(child))
    return names


def run(
    config_path: Path | str,
    overrides: dict[str, Any] | None = None,
    workers: int | None = None,
    block_size: int | None = None,
    backend: Backend | None = None,
) -> RunOutcome:
    """
    Run the configured experiment and write its outputs.

    Args:
        config_path: TOML (or canonical JSON) experiment config
        overrides: optional `seed`, `output_dir`, `experiment`
        workers: worker processes for ensemble sampling; never changes the numbers

    Returns:
        RunOutcome with the exit code, written files and error record
    """
    settings = get_settings()
    mc = settings.monte_carlo

    try:
        config = parse_config(config_path, overrides)
        setup = build_setup(config)
    except ConfigError as e:
        logger.error(f"Invalid config: {e}")
        return RunOutcome(exit_code=EXIT_INVALID, error_record=error_record(e, EXIT_INVALID))

    digest = config_hash(config)
    context = RunContext(
        config=config,
        setup=setup,
        workers=workers or mc.workers,
        block_size=block_size or mc.block_size,
        backend=backend or mc.backend,
    )

    name = config.experiment.value
    logger.info(f"Running {name} (hash {digest[:12]}, workers={context.workers})")
    result = registry.execute(name, context)

    files: list[Path] = []
    try:
        target = config.output_dir or settings.output.dir
        files = emit_report(result, config, target).all()
    except ReportError as e:
        logger.error(str(e))
        return RunOutcome(
            exit_code=EXIT_USAGE,
            config_hash=digest,
            result=result,
            error_record=error_record(e, EXIT_USAGE),
        )

    errors = _errors(result)
    if errors:
        code = max(exit_code_for(exc) for _, exc in errors)
        where, exc = next((n, x) for n, x in errors if exit_code_for(x) == code)
        logger.error(f"{where} raised {type(exc).__name__}: {exc}")
        return RunOutcome(
            exit_code=code,
            config_hash=digest,
            files=files,
            result=result,
            error_record=error_record(exc, code),
        )

    failed = _failed_checks(result)
    if failed:
        logger.warning(f"{len(failed)} check(s) failed: {', '.join(failed)}")
        return RunOutcome(
            exit_code=EXIT_FAILED,
            config_hash=digest,
            files=files,
            result=result,
            error_record={
                "error": "ValidationFailure",
                "message": f"{len(failed)} check(s) failed: {', '.join(failed)}",
                "field": None,
                "line": None,
                "exit_code": EXIT_FAILED,
            },
        )

    logger.info(f"{name} PASS")
    return RunOutcome(exit_code=EXIT_OK, config_hash=digest, files=files, result=result)


__all__ = [
    "EXIT_FAILED",
    "EXIT_INVALID",
    "EXIT_OK",
    "EXIT_USAGE",
    "RunOutcome",
    "error_record",
    "exit_code_for",
    "run",
]
