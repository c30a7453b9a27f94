"""
Experiment config parsing.

A config is a TOML file (or the canonical JSON a previous run wrote)
validated by frozen pydantic section models. Every physical invariant of
the engines is re-checked here by building the engine objects, and any
failure is raised as ConfigError naming the field and its source line.

Frequencies are given in units of `units.reference_bandwidth` B (rad/s):
half_width, sigma_f, final_detuning and mode widths scale with B, the
gate duration with 1/B, kappa and k2prime with 1/B². omega0 is in rad/s.
"""

import hashlib
import json
import logging
import re
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Any, Literal

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from src.physics.errors import SimulationError
from src.physics.gain import Convention, GainParams
from src.physics.gate import GateKernel, make_gate
from src.physics.lattice import FrequencyLattice, make_lattice
from src.physics.observables.sfg import SfgParams
from src.physics.observables.tpa import TpaKernel
from src.physics.sampling import MAX_SEED
from src.physics.sf_engine import NoiseSpec

logger = logging.getLogger(__name__)


class ConfigError(Exception):
    """Raised when an experiment config cannot be parsed or validated."""

    def __init__(self, message: str, field: str | None = None, line: int | None = None):
        self.message = message
        self.field = field
        self.line = line
        where = f" ({field}" + (f", line {line}" if line else "") + ")" if field else ""
        super().__init__(f"{message}{where}")


class Experiment(str, Enum):
    SPECTRUM = "Spectrum"
    CORR2 = "Corr2"
    CORR4_IDENTITY = "Corr4Identity"
    TPA_SCALING = "TpaScaling"
    SFG_SPECTRUM = "SfgSpectrum"
    MODE_ENERGY = "ModeEnergy"
    VALIDATE_ALL = "ValidateAll"


class _Section(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")


class UnitsSection(_Section):
    reference_bandwidth: float = Field(default=1.0, gt=0, description="B in rad/s")


class LatticeSection(_Section):
    omega0: float = Field(gt=0, description="Carrier frequency in rad/s")
    half_width: float = Field(gt=0, description="Band half-width in units of B")
    n_points: int = Field(ge=3)

    @field_validator("n_points")
    @classmethod
    def _odd(cls, value: int) -> int:
        if value % 2 == 0:
            raise ValueError(f"n_points must be odd so that omega0 is a grid point (got {value})")
        return value


class GainSection(_Section):
    gamma: float = Field(default=1.0, ge=0)
    kappa: float = Field(default=1.0, description="k''/2 in units of 1/B^2 per length")
    z: float = Field(default=1.0, gt=0)
    convention: Literal["unitary", "literal"] = "unitary"
    compensate_dispersion: bool = True


class GateSection(_Section):
    duration: float = Field(gt=0, description="Gate length T in units of 1/B")


class NoiseSection(_Section):
    p_sf: float = Field(default=0.5, gt=0)
    seed: int = Field(default=0, ge=0, le=MAX_SEED)
    n_realizations: int = Field(default=1000, ge=2)


class ProbeSection(_Section):
    families: tuple[Literal["degenerate", "ridge", "coincident", "random"], ...] = (
        "degenerate",
        "ridge",
        "random",
    )
    count: int = Field(default=32, ge=1)
    half_span: float = Field(default=0.5, gt=0, le=1)
    seed: int = Field(default=0, ge=0)
    pair_family: Literal["diagonal", "mirror", "random"] = "random"
    pair_count: int = Field(default=16, ge=1)


class TpaSection(_Section):
    sigma_f: float = Field(default=0.5, gt=0)
    final_detuning: float = 0.0
    amplitude: float = Field(default=1.0, gt=0)
    lineshape: Literal["lorentzian_area", "lorentzian_peak"] = "lorentzian_area"
    sigma_sweep: tuple[float, ...] = ()


class SfgSection(_Section):
    k2prime: float = 0.1
    length: float = Field(default=1.0, gt=0)
    xi_c: float = 1.0
    half_window: int | None = Field(default=None, ge=0)
    method: Literal["direct", "lowrank"] = "lowrank"
    n_realizations: int | None = Field(default=None, ge=2)


class ScalingSection(_Section):
    gammas: tuple[float, ...] = (1e-4, 3e-4, 1e-3, 3e-3, 1e-2)
    z: float | None = Field(default=None, gt=0)


class ModeSection(_Section):
    width: float = Field(default=0.5, gt=0)
    orders: tuple[int, ...] = (0, 1)
    center_detuning: float = 0.0
    n_realizations: int | None = Field(default=None, ge=2)


class ValidationSection(_Section):
    tolerance: float = Field(default=1e-12, gt=0)
    sigma: float = Field(default=5.0, gt=0)
    high_gain_gz: float = Field(default=5.0, gt=0)
    include_monte_carlo: bool = True


class ExperimentConfig(_Section):
    experiment: Experiment = Experiment.VALIDATE_ALL
    output_dir: str | None = None  # falls back to SQZ_OUTPUT_DIR
    units: UnitsSection = UnitsSection()
    lattice: LatticeSection
    gain: GainSection = GainSection()
    gate: GateSection
    noise: NoiseSection = NoiseSection()
    probes: ProbeSection = ProbeSection()
    tpa: TpaSection = TpaSection()
    sfg: SfgSection = SfgSection()
    scaling: ScalingSection = ScalingSection()
    mode: ModeSection = ModeSection()
    validation: ValidationSection = ValidationSection()


@dataclass(frozen=True)
class Setup:
    """Engine objects in rad/s built from a validated config."""

    lattice: FrequencyLattice
    gain_params: GainParams
    kernel: GateKernel
    noise: NoiseSpec
    tpa_kernel: TpaKernel
    sfg_params: SfgParams
    bandwidth: float


# ---------------------------------------------------------------------------
# Canonical form and hashing
# ---------------------------------------------------------------------------


def canonical_json(config: ExperimentConfig) -> str:
    """Sorted-key compact JSON; re-parsing it yields an equal config."""
    return json.dumps(config.model_dump(mode="json"), sort_keys=True, separators=(",", ":"))


def config_hash(config: ExperimentConfig) -> str:
    """SHA-256 of the canonical form, excluding where the outputs go."""
    payload = config.model_dump(mode="json")
    payload.pop("output_dir", None)
    text = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------


def find_line(text: str, location: tuple[str | int, ...]) -> int | None:
    """Best-effort source line of a dotted field in TOML or JSON text."""
    keys = [str(part) for part in location if isinstance(part, str)]
    if not keys:
        return None
    key = keys[-1]
    section = ".".join(keys[:-1]) or None
    current: str | None = None
    section_line: int | None = None
    key_pattern = re.compile(rf'^\s*"?{re.escape(key)}"?\s*[=:]')
    for lineno, raw in enumerate(text.splitlines(), start=1):
        header = re.match(r"^\s*\[([^\[\]]+)\]\s*$", raw)
        if header:
            current = header.group(1).strip()
            if current == section:
                section_line = lineno
            continue
        if key_pattern.match(raw) and (current == section or raw.lstrip().startswith('"')):
            return lineno
    return section_line


def _from_validation_error(exc: ValidationError, text: str) -> ConfigError:
    first = exc.errors()[0]
    location = tuple(first.get("loc", ()))
    name = ".".join(str(p) for p in location) or None
    message = first.get("msg", "invalid value")
    return ConfigError(message, field=name, line=find_line(text, location))


def parse_text(text: str, fmt: Literal["toml", "json"] = "toml") -> ExperimentConfig:
    try:
        data: dict[str, Any] = json.loads(text) if fmt == "json" else tomllib.loads(text)
    except (tomllib.TOMLDecodeError, json.JSONDecodeError) as e:
        match = re.search(r"line (\d+)", str(e))
        line = int(match.group(1)) if match else None
        raise ConfigError(f"malformed config: {e}", line=line) from e
    try:
        config = ExperimentConfig.model_validate(data)
    except ValidationError as e:
        raise _from_validation_error(e, text) from e
    build_setup(config, text)
    return config


def parse_config(
    path: Path | str,
    overrides: dict[str, Any] | None = None,
) -> ExperimentConfig:
    """
    Read and validate a config file.

    overrides may set `output_dir`, `seed` or `experiment`; they are
    applied before validation so the hash reflects them.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"cannot read config: {e}") from e
    fmt: Literal["toml", "json"] = "json" if path.suffix == ".json" else "toml"
    config = parse_text(text, fmt)
    if overrides:
        config = apply_overrides(config, overrides, text)
    logger.info(
        f"Loaded config {path} ({config.experiment.value}, hash {config_hash(config)[:12]})"
    )
    return config


def apply_overrides(
    config: ExperimentConfig, overrides: dict[str, Any], text: str = ""
) -> ExperimentConfig:
    data = config.model_dump(mode="json")
    for key, value in overrides.items():
        if value is None:
            continue
        if key == "seed":
            data["noise"]["seed"] = value
        elif key in ("output_dir", "experiment"):
            data[key] = str(value)
        else:
            raise ConfigError(f"unknown override '{key}'")
    try:
        updated = ExperimentConfig.model_validate(data)
    except ValidationError as e:
        raise _from_validation_error(e, text) from e
    build_setup(updated, text)
    return updated


def build_setup(config: ExperimentConfig, text: str = "") -> Setup:
    """Scale to rad/s and build the engine objects, mapping engine errors to ConfigError."""
    b = config.units.reference_bandwidth
    stage = "lattice"
    try:
        lattice = make_lattice(
            config.lattice.omega0, config.lattice.half_width * b, config.lattice.n_points
        )
        stage = "gain"
        gain_params = GainParams(
            gamma=config.gain.gamma,
            kappa=config.gain.kappa / b**2,
            z=config.gain.z,
            convention=Convention(config.gain.convention),
            compensate_dispersion=config.gain.compensate_dispersion,
        )
        stage = "gate"
        kernel = make_gate(lattice, config.gate.duration / b)
        stage = "noise"
        noise = NoiseSpec(
            p_sf=config.noise.p_sf,
            seed=config.noise.seed,
            n_realizations=config.noise.n_realizations,
        )
        stage = "tpa"
        tpa_kernel = TpaKernel(
            sigma_f=config.tpa.sigma_f * b,
            omega_f=2.0 * lattice.omega0 + config.tpa.final_detuning * b,
            amplitude=config.tpa.amplitude,
            lineshape=config.tpa.lineshape,
        )
        tpa_kernel.check_resolution(lattice)
        stage = "sfg"
        sfg_params = SfgParams(
            k2prime=config.sfg.k2prime / b**2, length=config.sfg.length, xi_c=config.sfg.xi_c
        )
        sfg_params.check_sampling(lattice)
    except SimulationError as e:
        raise ConfigError(str(e), field=stage, line=find_line(text, (stage, ""))) from e
    return Setup(
        lattice=lattice,
        gain_params=gain_params,
        kernel=kernel,
        noise=noise,
        tpa_kernel=tpa_kernel,
        sfg_params=sfg_params,
        bandwidth=b,
    )


__all__ = [
    "ConfigError",
    "Experiment",
    "ExperimentConfig",
    "Setup",
    "apply_overrides",
    "build_setup",
    "canonical_json",
    "config_hash",
    "find_line",
    "parse_config",
    "parse_text",
]
