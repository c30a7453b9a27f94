"""
Configuration management for the squeezed-vacuum simulator.

Uses pydantic-settings for type-safe environment variable loading.
Experiment files (TOML) are handled separately by src.runner.parser;
this module only carries process-level knobs that must never change
the numbers a run produces.
"""

import logging
from functools import lru_cache
from pathlib import Path
from typing import Literal

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict
from rich.logging import RichHandler


class MonteCarloSettings(BaseSettings):
    """Worker-pool settings for ensemble generation."""

    model_config = SettingsConfigDict(env_prefix="SQZ_MC_", env_file=".env", extra="ignore")

    workers: int = Field(
        default=1,
        ge=1,
        description="Number of joblib workers used for ensemble blocks",
    )
    block_size: int = Field(
        default=512,
        ge=1,
        description="Realizations per work block (fixed, independent of workers)",
    )
    backend: Literal["loky", "threading", "sequential"] = Field(
        default="loky",
        description="joblib backend for the worker pool",
    )


class OutputSettings(BaseSettings):
    """Result-file settings."""

    model_config = SettingsConfigDict(env_prefix="SQZ_OUTPUT_", env_file=".env", extra="ignore")

    dir: Path = Field(
        default=Path("results"),
        description="Default output directory when the config gives none",
    )
    csv_digits: int = Field(
        default=17,
        ge=15,
        le=17,
        description="Significant digits written for CSV floats",
    )
    report_width: int = Field(
        default=110,
        description="Console width used for the plain-text report",
    )


class Settings(BaseSettings):
    """Main application settings."""

    model_config = SettingsConfigDict(
        env_prefix="SQZ_",
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
    )

    # Logging
    log_level: Literal["DEBUG", "INFO", "WARNING", "ERROR"] = Field(
        default="INFO",
        description="Logging level",
    )

    # Sub-settings
    monte_carlo: MonteCarloSettings = Field(default_factory=MonteCarloSettings)
    output: OutputSettings = Field(default_factory=OutputSettings)

    @property
    def project_root(self) -> Path:
        """Get project root directory."""
        return Path(__file__).parent.parent

    @property
    def configs_dir(self) -> Path:
        """Get directory holding the shipped experiment configs."""
        return self.project_root / "configs"

    @property
    def default_config_path(self) -> Path:
        """Get the shipped ValidateAll config."""
        return self.configs_dir / "default.toml"


@lru_cache
def get_settings() -> Settings:
    """
    Get cached settings instance.

    Uses lru_cache to ensure settings are only loaded once.
    """
    return Settings()


def setup_logging(level: str | None = None) -> None:
    """Route library logging through rich; safe to call more than once."""
    cfg = get_settings()
    root = logging.getLogger()
    if not any(isinstance(h, RichHandler) for h in root.handlers):
        root.addHandler(RichHandler(rich_tracebacks=True, show_path=False))
    root.setLevel(level or cfg.log_level)


if __name__ == "__main__":
    cfg = get_settings()
    print("Current Configuration:")
    print("-" * 40)
    print(f"Log Level: {cfg.log_level}")
    print(f"Workers: {cfg.monte_carlo.workers}")
    print(f"Block Size: {cfg.monte_carlo.block_size}")
    print(f"Backend: {cfg.monte_carlo.backend}")
    print(f"Output Dir: {cfg.output.dir}")
