"""
Unit tests for experiment config parsing.
"""

import json

import pytest

from src.runner.parser import (
    ConfigError,
    Experiment,
    apply_overrides,
    build_setup,
    canonical_json,
    config_hash,
    find_line,
    parse_config,
    parse_text,
)

MINIMAL = """\
[lattice]
omega0 = 100.0
half_width = 4.0
n_points = 51

[gate]
duration = 30.0
"""


class TestParseText:
    """Tests for TOML parsing and validation."""

    def test_minimal_defaults(self):
        config = parse_text(MINIMAL)
        assert config.experiment is Experiment.VALIDATE_ALL
        assert config.noise.p_sf == 0.5
        assert config.gain.convention == "unitary"

    def test_even_points_name_field_and_line(self):
        with pytest.raises(ConfigError) as exc_info:
            parse_text(MINIMAL.replace("n_points = 51", "n_points = 50"))
        assert exc_info.value.field == "lattice.n_points"
        assert exc_info.value.line == 4
        assert "odd" in exc_info.value.message

    def test_unknown_key_rejected(self):
        with pytest.raises(ConfigError) as exc_info:
            parse_text(MINIMAL + "\n[noise]\nrealizations = 10\n")
        assert exc_info.value.field == "noise.realizations"

    def test_malformed_toml(self):
        with pytest.raises(ConfigError, match="malformed"):
            parse_text("[lattice\nomega0 = 1")

    def test_engine_error_becomes_config_error(self):
        """A gate long enough to alias the lattice is rejected at load time."""
        with pytest.raises(ConfigError) as exc_info:
            parse_text(MINIMAL.replace("duration = 30.0", "duration = 60.0"))
        assert exc_info.value.field == "gate"
        assert exc_info.value.line == 6

    def test_band_reaching_zero(self):
        with pytest.raises(ConfigError) as exc_info:
            parse_text(MINIMAL.replace("omega0 = 100.0", "omega0 = 3.0"))
        assert exc_info.value.field == "lattice"

    def test_json_round_trip(self):
        config = parse_text(MINIMAL)
        assert parse_text(canonical_json(config), fmt="json") == config


class TestHashing:
    """Tests for the config hash."""

    def test_ignores_output_dir(self):
        config = parse_text(MINIMAL)
        moved = apply_overrides(config, {"output_dir": "/tmp/elsewhere"})
        assert config_hash(moved) == config_hash(config)

    def test_tracks_seed(self):
        config = parse_text(MINIMAL)
        assert config_hash(apply_overrides(config, {"seed": 9})) != config_hash(config)

    def test_canonical_json_sorted(self):
        payload = json.loads(canonical_json(parse_text(MINIMAL)))
        assert list(payload) == sorted(payload)


class TestOverrides:
    """Tests for command-line overrides."""

    def test_experiment(self):
        config = apply_overrides(parse_text(MINIMAL), {"experiment": "Spectrum"})
        assert config.experiment is Experiment.SPECTRUM

    def test_none_values_skipped(self):
        config = parse_text(MINIMAL)
        assert apply_overrides(config, {"seed": None}) == config

    def test_unknown_override(self):
        with pytest.raises(ConfigError, match="unknown override"):
            apply_overrides(parse_text(MINIMAL), {"gamma": 2.0})

    def test_invalid_experiment(self):
        with pytest.raises(ConfigError) as exc_info:
            apply_overrides(parse_text(MINIMAL), {"experiment": "Nope"})
        assert exc_info.value.field == "experiment"

    def test_parse_config_applies_overrides(self, write_config):
        config = parse_config(write_config(), {"seed": 11})
        assert config.noise.seed == 11
        assert config.experiment is Experiment.SPECTRUM

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError, match="cannot read"):
            parse_config(tmp_path / "missing.toml")


class TestSetup:
    """Tests for unit scaling into engine objects."""

    def test_reference_bandwidth_scales(self):
        text = MINIMAL + "\n[units]\nreference_bandwidth = 2.0\n"
        text = text.replace("omega0 = 100.0", "omega0 = 200.0").replace("30.0", "15.0")
        setup = build_setup(parse_text(text))
        assert setup.lattice.half_width == 8.0
        assert setup.kernel.duration == 7.5
        assert setup.tpa_kernel.sigma_f == 1.0
        assert setup.bandwidth == 2.0


class TestFindLine:
    """Tests for source-line lookup."""

    def test_section_key(self):
        assert find_line(MINIMAL, ("gate", "duration")) == 7

    def test_top_level_key(self):
        assert find_line('experiment = "Spectrum"\n', ("experiment",)) == 1

    def test_missing(self):
        assert find_line(MINIMAL, ("noise", "seed")) is None
