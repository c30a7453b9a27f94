"""
Pytest configuration and shared fixtures.
"""

from pathlib import Path

import pytest

from src.physics.gain import GainParams, GainProfile, gain_profile
from src.physics.gate import GateKernel, make_gate
from src.physics.lattice import FrequencyLattice, make_lattice
from src.physics.sf_engine import NoiseSpec

SMALL_CONFIG = """\
experiment = "{experiment}"
output_dir = "{output_dir}"

[lattice]
omega0 = 100.0
half_width = 4.0
n_points = {n_points}

[gain]
gamma = 1.0

[gate]
duration = 30.0

[noise]
seed = 3
n_realizations = {n_realizations}

[probes]
count = 4
pair_count = 4

[tpa]
sigma_f = 0.5

[sfg]
half_window = 4

[mode]
orders = [0, 1]
"""


@pytest.fixture
def lattice() -> FrequencyLattice:
    """51-point lattice, ω₀ = 100, half-width 4."""
    return make_lattice(100.0, 4.0, 51)


@pytest.fixture
def gain_params() -> GainParams:
    return GainParams(gamma=1.0, kappa=1.0, z=1.0)


@pytest.fixture
def gain(lattice, gain_params) -> GainProfile:
    return gain_profile(lattice, gain_params)


@pytest.fixture
def kernel(lattice) -> GateKernel:
    return make_gate(lattice, 30.0)


@pytest.fixture
def noise_spec() -> NoiseSpec:
    return NoiseSpec(p_sf=0.5, seed=7, n_realizations=400)


@pytest.fixture
def write_config(tmp_path):
    """Write a small experiment config and return its path."""

    def _write(
        experiment: str = "Spectrum",
        n_points: int = 51,
        n_realizations: int = 1200,
        output_dir: Path | None = None,
        text: str | None = None,
    ) -> Path:
        path = tmp_path / "experiment.toml"
        if text is None:
            text = SMALL_CONFIG.format(
                experiment=experiment,
                output_dir=(output_dir or tmp_path / "results").as_posix(),
                n_points=n_points,
                n_realizations=n_realizations,
            )
        path.write_text(text, encoding="utf-8")
        return path

    return _write
