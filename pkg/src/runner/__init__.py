"""
Batch front end: config parsing, the run loop and result files.

Only the parser is imported here; import src.runner.loop for run().
"""

from src.runner.parser import (
    ConfigError,
    Experiment,
    ExperimentConfig,
    Setup,
    build_setup,
    canonical_json,
    config_hash,
    parse_config,
    parse_text,
)

__all__ = [
    "ConfigError",
    "Experiment",
    "ExperimentConfig",
    "Setup",
    "build_setup",
    "canonical_json",
    "config_hash",
    "parse_config",
    "parse_text",
]
