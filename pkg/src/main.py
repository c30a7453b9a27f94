"""
Squeezed-vacuum simulator CLI.

Runs config-driven experiments that compare the quantum closed forms
with the classical stochastic-field model, and exports sampled ensembles.
"""

import json
import sys
from dataclasses import replace
from pathlib import Path
from typing import Literal

import click
import typer
from rich.console import Console
from rich.panel import Panel
from rich.table import Table

try:  # typer >= 0.26 raises exceptions from its vendored copy of click
    from typer._click.exceptions import ClickException as _TyperClickException
except ImportError:
    _TyperClickException = click.ClickException

from src import __version__
from src.config import get_settings, setup_logging
from src.experiments import registry
from src.physics.errors import SimulationError
from src.physics.gain import gain_profile
from src.physics.sf_engine import export_ensemble, gate, sample_vacuum, squeeze
from src.runner.loop import EXIT_OK, EXIT_USAGE, RunOutcome, error_record, exit_code_for, run
from src.runner.parser import ConfigError, Experiment, build_setup, parse_config

app = typer.Typer(
    name="sqzsim",
    help="Squeezed-vacuum simulator - quantum vs stochastic-field models",
    add_completion=False,
)
console = Console()

ConfigArgument = typer.Argument(..., help="Experiment config (TOML or canonical JSON)")


def _emit_error(record: dict) -> None:
    """One JSON line on stderr for machines, a short line on the console for people."""
    typer.echo(json.dumps(record, sort_keys=True), err=True)


def _finish(outcome: RunOutcome) -> None:
    if outcome.result is not None:
        results = outcome.result.children or [outcome.result]
        table = Table(title=f"Results ({outcome.config_hash[:12] if outcome.config_hash else '-'})")
        table.add_column("Experiment", style="cyan", no_wrap=True)
        table.add_column("Verdict")
        table.add_column("Checks", justify="right")
        for r in results:
            if not r.success:
                verdict = "[red]ERROR[/red]"
            elif r.passed:
                verdict = "[green]PASS[/green]"
            else:
                verdict = "[yellow]FAIL[/yellow]"
            table.add_row(r.name, verdict, f"{sum(c.passed for c in r.checks)}/{len(r.checks)}")
        console.print(table)
    if outcome.files:
        console.print(f"[dim]Wrote {len(outcome.files)} files to {outcome.files[0].parent}[/dim]")
    if outcome.error_record is not None:
        _emit_error(outcome.error_record)
    if outcome.exit_code != EXIT_OK:
        raise typer.Exit(code=outcome.exit_code)


@app.command("run")
def run_command(
    config_path: Path = ConfigArgument,
    output_dir: Path | None = typer.Option(None, "--output-dir", "-o", help="Override output_dir"),
    seed: int | None = typer.Option(None, "--seed", help="Override noise.seed"),
    workers: int | None = typer.Option(None, "--workers", "-w", min=1, help="Sampling workers"),
    experiment: Experiment | None = typer.Option(
        None, "--experiment", "-e", help="Override the configured experiment"
    ),
    log_level: str | None = typer.Option(None, "--log-level", help="DEBUG, INFO, WARNING, ERROR"),
) -> None:
    """
    Run the experiment named in the config and write CSV/JSON/text results.
    """
    setup_logging(log_level)
    overrides = {
        "output_dir": None if output_dir is None else str(output_dir),
        "seed": seed,
        "experiment": None if experiment is None else experiment.value,
    }
    with console.status("[bold green]Running...", spinner="dots"):
        outcome = run(config_path, overrides, workers=workers)
    _finish(outcome)


@app.command()
def validate(
    config_path: Path = ConfigArgument,
    output_dir: Path | None = typer.Option(None, "--output-dir", "-o", help="Override output_dir"),
    seed: int | None = typer.Option(None, "--seed", help="Override noise.seed"),
    workers: int | None = typer.Option(None, "--workers", "-w", min=1, help="Sampling workers"),
) -> None:
    """
    Run every validation suite (ValidateAll) on the config's lattice and gain.
    """
    setup_logging()
    overrides = {
        "output_dir": None if output_dir is None else str(output_dir),
        "seed": seed,
        "experiment": Experiment.VALIDATE_ALL.value,
    }
    with console.status("[bold green]Validating...", spinner="dots"):
        outcome = run(config_path, overrides, workers=workers)
    _finish(outcome)


@app.command("export-ensemble")
def export_ensemble_command(
    config_path: Path = ConfigArgument,
    output: Path = typer.Argument(..., help="Data file to write"),
    stage: str = typer.Option("gated", "--stage", help="vacuum, filtered, squeezed or gated"),
    fmt: str = typer.Option("binary", "--format", help="binary or csv"),
    realizations: int | None = typer.Option(
        None, "--realizations", "-n", min=1, help="Override noise.n_realizations"
    ),
    seed: int | None = typer.Option(None, "--seed", help="Override noise.seed"),
    workers: int | None = typer.Option(None, "--workers", "-w", min=1, help="Sampling workers"),
) -> None:
    """
    Sample one ensemble stage and dump it with a JSON sidecar header.
    """
    setup_logging()
    if stage not in ("vacuum", "filtered", "squeezed", "gated") or fmt not in ("binary", "csv"):
        console.print(f"[bold red]Error:[/bold red] unknown stage '{stage}' or format '{fmt}'")
        raise typer.Exit(code=EXIT_USAGE)

    settings = get_settings()
    try:
        config = parse_config(config_path, {"seed": seed})
        setup = build_setup(config)
        noise = setup.noise
        if realizations is not None:
            noise = replace(noise, n_realizations=realizations)
        ensemble = sample_vacuum(
            setup.lattice,
            noise,
            workers or settings.monte_carlo.workers,
            settings.monte_carlo.block_size,
            settings.monte_carlo.backend,
        )
        if stage in ("filtered", "gated"):
            ensemble = gate(ensemble, setup.kernel)
        if stage in ("squeezed", "gated"):
            ensemble = squeeze(ensemble, gain_profile(setup.lattice, setup.gain_params))
        fmt_value: Literal["binary", "csv"] = "csv" if fmt == "csv" else "binary"
        data_path, header_path = export_ensemble(
            ensemble, output, fmt=fmt_value, digits=settings.output.csv_digits
        )
    except (ConfigError, SimulationError) as e:
        console.print(f"[bold red]Error:[/bold red] {e}")
        _emit_error(error_record(e))
        raise typer.Exit(code=exit_code_for(e)) from e
    except OSError as e:
        console.print(f"[bold red]Error:[/bold red] {e}")
        _emit_error(error_record(e, EXIT_USAGE))
        raise typer.Exit(code=EXIT_USAGE) from e

    console.print(f"[green]Wrote[/green] {data_path} and {header_path}")


@app.command()
def experiments() -> None:
    """
    List all registered experiments and their CSV tables.
    """
    table = Table(title="Available Experiments")
    table.add_column("Name", style="cyan", no_wrap=True)
    table.add_column("Description", style="green")
    table.add_column("Tables", style="yellow")
    table.add_column("Monte Carlo")

    for schema in registry.list_experiments():
        tables = ", ".join(schema["columns"].keys()) if schema["columns"] else "-"
        table.add_row(
            schema["name"], schema["description"], tables, "yes" if schema["monte_carlo"] else "no"
        )

    console.print(table)


@app.command()
def config() -> None:
    """
    Display current process settings.
    """
    settings = get_settings()

    table = Table(title="Current Configuration")
    table.add_column("Setting", style="cyan")
    table.add_column("Value", style="green")

    table.add_row("Log Level", settings.log_level)
    table.add_row("Workers", str(settings.monte_carlo.workers))
    table.add_row("Block Size", str(settings.monte_carlo.block_size))
    table.add_row("Backend", settings.monte_carlo.backend)
    table.add_row("Output Dir", str(settings.output.dir))
    table.add_row("CSV Digits", str(settings.output.csv_digits))
    table.add_row("Default Config", str(settings.default_config_path))

    console.print(table)


@app.command()
def version() -> None:
    """
    Show version information.
    """
    console.print(
        Panel(
            "[bold]squeezed-vacuum-sim[/bold]\n"
            "Quantum vs stochastic-field broadband squeezed vacuum\n\n"
            f"Version: {__version__}\n"
            "Python: 3.11+",
            title="Version Info",
            border_style="blue",
        )
    )


def main() -> None:
    """Entry point for the CLI; usage errors exit with 1."""
    try:
        code = app(standalone_mode=False)
    except (click.ClickException, _TyperClickException) as e:
        e.show()
        sys.exit(EXIT_USAGE)
    except typer.Abort:
        sys.exit(EXIT_USAGE)
    sys.exit(code if isinstance(code, int) else EXIT_OK)


if __name__ == "__main__":
    main()
