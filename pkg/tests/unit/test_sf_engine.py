"""
Unit tests for the stochastic-field engine.
"""

import json
from dataclasses import replace

import numpy as np
import pytest

from src.physics.correlators import ProbePairs, ProbeQuads, Provenance
from src.physics.errors import (
    ConfigurationMismatchError,
    InsufficientRealizationsError,
    LatticeError,
    ParameterError,
)
from src.physics.gate import make_gate
from src.physics.lattice import integrate
from src.physics.probes import make_quads
from src.physics.qt_engine import corr4_qt, spectrum_qt
from src.physics.sf_engine import (
    NoiseSpec,
    PairingCorr4,
    Stage,
    corr2_sf_closed,
    corr2_sf_mc,
    corr4_sf_closed,
    corr4_sf_mc,
    corr4_sf_model,
    crn_pair,
    energy_sf,
    export_ensemble,
    gate,
    isserlis_from_ensemble,
    load_ensemble_binary,
    pseudo_corr2_mc,
    renormalize,
    sample_vacuum,
    simulate_gated,
    spectrum_sf,
    spectrum_sf_closed,
    squeeze,
)


@pytest.fixture
def vacuum(lattice, noise_spec):
    return sample_vacuum(lattice, noise_spec, backend="sequential")


class TestNoiseSpec:
    """Tests for zero-point noise settings."""

    def test_defaults(self):
        spec = NoiseSpec()
        assert spec.p_sf == 0.5
        assert spec.n_realizations == 10_000

    @pytest.mark.parametrize("p_sf", [0.0, -0.5])
    def test_non_positive_density(self, p_sf):
        with pytest.raises(ParameterError):
            NoiseSpec(p_sf=p_sf)

    def test_seed_range(self):
        with pytest.raises(ParameterError, match="seed"):
            NoiseSpec(seed=-1)

    def test_tabulated_density(self, lattice):
        density = np.linspace(0.4, 0.6, lattice.n_points)
        np.testing.assert_array_equal(
            NoiseSpec(spectral_density=density).density(lattice), density
        )

    def test_tabulated_density_wrong_lattice(self, lattice):
        with pytest.raises(LatticeError):
            NoiseSpec(spectral_density=np.ones(3)).density(lattice)


class TestPipeline:
    """Tests for sampling, gating and squeezing."""

    def test_vacuum_shape_and_stage(self, lattice, vacuum, noise_spec):
        assert vacuum.stage is Stage.VACUUM
        assert vacuum.data.shape == (noise_spec.n_realizations, lattice.n_points)

    def test_reproducible(self, lattice, noise_spec, vacuum):
        again = sample_vacuum(lattice, noise_spec, block_size=64, backend="sequential")
        np.testing.assert_array_equal(vacuum.data, again.data)

    def test_workers_do_not_change_numbers(self, lattice, noise_spec, vacuum):
        threaded = sample_vacuum(
            lattice, noise_spec, workers=3, block_size=50, backend="threading"
        )
        np.testing.assert_array_equal(vacuum.data, threaded.data)

    def test_vacuum_variance(self, lattice, vacuum, noise_spec):
        """Per-sample variance is P_SF·delta_peak."""
        estimate = spectrum_sf(vacuum)
        z = np.abs(estimate.values - noise_spec.p_sf) / estimate.stderr
        assert np.all(z <= 5.0)

    def test_stages(self, vacuum, kernel, gain):
        filtered = gate(vacuum, kernel)
        assert filtered.stage is Stage.FILTERED
        assert filtered.duration == kernel.duration
        assert squeeze(filtered, gain).stage is Stage.GATED
        assert squeeze(vacuum, gain).stage is Stage.SQUEEZED

    def test_cannot_gate_twice(self, vacuum, kernel):
        with pytest.raises(ConfigurationMismatchError):
            gate(gate(vacuum, kernel), kernel)

    def test_cannot_squeeze_twice(self, vacuum, gain):
        with pytest.raises(ConfigurationMismatchError):
            squeeze(squeeze(vacuum, gain), gain)

    def test_crn_pair_shares_noise(self, vacuum, gain):
        """The baseline of a CRN pair is f·a with the same a."""
        squeezed, baseline = crn_pair(vacuum, gain)
        np.testing.assert_allclose(baseline.data, gain.baseline().f * vacuum.data)
        assert squeezed.lineage() == baseline.lineage()

    def test_simulate_gated(self, gain, kernel, noise_spec):
        gated, baseline = simulate_gated(gain, kernel, noise_spec, backend="sequential")
        assert gated.stage is Stage.GATED
        assert baseline.gain_tag.gamma == 0.0


class TestSecondMoments:
    """Tests for spectra, corr2 and energies."""

    def test_closed_spectrum_vacuum(self, gain):
        np.testing.assert_array_equal(spectrum_sf_closed(gain.baseline()), 0.5)

    def test_renormalized_closed_spectrum_is_qt(self, gain):
        """P_SF(2|g|² + 1) − P_SF = |g|² at P_SF = ½."""
        renorm = renormalize(spectrum_sf_closed(gain), spectrum_sf_closed(gain.baseline()))
        np.testing.assert_allclose(renorm, spectrum_qt(gain), rtol=1e-12, atol=1e-15)

    def test_renormalized_mc_spectrum(self, vacuum, gain):
        """Paired differences agree with P_SF(|f|² + |g|² − 1) within five errors."""
        squeezed, baseline = crn_pair(vacuum, gain)
        estimate = renormalize(spectrum_sf(squeezed), spectrum_sf(baseline))
        assert estimate.provenance is Provenance.SF_RENORMALIZED
        expected = 0.5 * (np.abs(gain.f) ** 2 + gain.g_intensity - 1.0)
        z = np.abs(estimate.values - expected) / estimate.stderr
        assert np.all(z <= 5.0)

    def test_corr2_closed_diagonal(self, lattice, gain, kernel):
        k = np.arange(lattice.n_points)
        values = corr2_sf_closed(gain, kernel, ProbePairs(k, k)).values
        expected = 0.5 * (np.abs(gain.f) ** 2 + gain.g_intensity) * kernel.duration
        np.testing.assert_allclose(values, expected, rtol=1e-12)

    def test_corr2_mc_needs_no_normalization_when_gated(self, lattice, vacuum, kernel):
        filtered = gate(vacuum, kernel)
        pairs = ProbePairs([lattice.center], [lattice.center])
        estimate = corr2_sf_mc(filtered, pairs)
        reference = 0.5 * kernel.lattice_overlap[lattice.center, lattice.center]
        assert abs(estimate.values[0] - reference) <= 5.0 * estimate.stderr[0]

    def test_vacuum_pseudo_moment_vanishes(self, lattice, vacuum):
        k = np.arange(0, lattice.n_points, 5)
        estimate = pseudo_corr2_mc(vacuum, ProbePairs(k, k))
        assert np.all(np.abs(estimate.values) <= 5.0 * estimate.stderr)

    def test_energy_closed_vacuum(self, lattice, gain, kernel):
        """T·∫đω P_SF for the vacuum."""
        expected = kernel.duration * integrate(lattice, np.full(lattice.n_points, 0.5))
        assert energy_sf(gain.baseline(), kernel) == pytest.approx(expected)

    def test_energy_gated_duration_mismatch(self, vacuum, kernel, lattice):
        filtered = gate(vacuum, kernel)
        with pytest.raises(ConfigurationMismatchError):
            energy_sf(filtered, make_gate(lattice, 20.0))


class TestFourthMoments:
    """Tests for the four-frequency SF correlators."""

    def test_renormalized_correlated_equals_qt_coherent(self, lattice, gain, kernel):
        quads = make_quads(lattice, "ridge", 8, seed=1)
        sf = renormalize(corr4_sf_model(gain, kernel), corr4_sf_model(gain.baseline(), kernel))
        tensor = sf.evaluate(quads)
        qt = corr4_qt(gain, kernel, quads)
        np.testing.assert_allclose(
            tensor.term("correlated"), qt.term("coherent"), rtol=1e-12, atol=1e-12
        )

    def test_shell_form_matches_pairing_on_degenerate_quads(self, lattice, gain, kernel):
        """The shell and moment-theorem forms coincide at (ω₀, ω₀, ω₀, ω₀)."""
        c = lattice.center
        quad = ProbeQuads([c], [c], [c], [c])
        shell = corr4_sf_closed(gain, kernel, quad).values[0]
        pairing = corr4_sf_closed(gain, kernel, quad, form="pairing").values[0]
        assert shell == pytest.approx(pairing, rel=1e-12)

    def test_pairing_terms(self, lattice, gain, kernel):
        quads = make_quads(lattice, "random", 5, seed=2)
        tensor = PairingCorr4(gain, kernel).evaluate(quads)
        assert set(tensor.terms) == {"anomalous", "direct", "exchange"}

    def test_mc_needs_enough_realizations(self, vacuum, lattice):
        quads = make_quads(lattice, "degenerate", 2)
        with pytest.raises(InsufficientRealizationsError):
            corr4_sf_mc(vacuum, quads)

    def test_mc_matches_lattice_pairing(self, lattice, gain, kernel):
        """Gated Monte Carlo against the exact lattice moment theorem."""
        spec = NoiseSpec(seed=5, n_realizations=2000)
        gated, _ = simulate_gated(gain, kernel, spec, backend="sequential")
        quads = make_quads(lattice, "degenerate", 3)
        estimate = corr4_sf_mc(gated, quads)
        exact = PairingCorr4(gain, kernel, overlap="lattice").evaluate(quads).values
        assert np.all(np.abs(estimate.values - exact) <= 5.0 * estimate.stderr)

    def test_isserlis_closure_matches_lattice_pairing(self, lattice, gain, kernel):
        """The closure from measured second moments tracks the exact value."""
        spec = NoiseSpec(seed=5, n_realizations=2000)
        gated, _ = simulate_gated(gain, kernel, spec, backend="sequential")
        quads = make_quads(lattice, "degenerate", 3)
        closure = isserlis_from_ensemble(gated, quads)
        assert closure.provenance is Provenance.SF_MONTE_CARLO
        assert set(closure.terms) == {"anomalous", "direct", "exchange"}
        exact = PairingCorr4(gain, kernel, overlap="lattice").evaluate(quads).values
        stderr = corr4_sf_mc(gated, quads).stderr
        assert np.all(np.abs(closure.values - exact) <= 5.0 * stderr)


class TestRenormalize:
    """Tests for g = 0 subtraction."""

    def test_scalars(self):
        assert renormalize(3.0, 1.0) == 2.0

    def test_type_mismatch(self, gain):
        with pytest.raises(ConfigurationMismatchError):
            renormalize(spectrum_sf_closed(gain), 1.0)

    def test_unsupported_type(self):
        with pytest.raises(TypeError):
            renormalize("a", "b")

    def test_lineage_mismatch(self, lattice, gain, noise_spec, vacuum):
        other = sample_vacuum(lattice, replace(noise_spec, seed=8), backend="sequential")
        first = spectrum_sf(squeeze(vacuum, gain))
        second = spectrum_sf(squeeze(other, gain.baseline()))
        with pytest.raises(ConfigurationMismatchError, match="seed"):
            renormalize(first, second)

    def test_corr2_probe_mismatch(self, gain, kernel):
        first = corr2_sf_closed(gain, kernel, ProbePairs([1], [2]))
        second = corr2_sf_closed(gain.baseline(), kernel, ProbePairs([2], [1]))
        with pytest.raises(ConfigurationMismatchError):
            renormalize(first, second)


class TestExport:
    """Tests for ensemble export."""

    def test_binary(self, tmp_path, vacuum):
        data_path, header_path = export_ensemble(vacuum, tmp_path / "vacuum.bin")
        np.testing.assert_array_equal(load_ensemble_binary(data_path), vacuum.data)
        header = json.loads(header_path.read_text())
        assert header["stage"] == "vacuum"
        assert header["n_realizations"] == vacuum.n_realizations
        assert header["gain"] is None

    def test_csv_layout(self, tmp_path, lattice, vacuum, gain):
        squeezed = squeeze(vacuum, gain)
        data_path, header_path = export_ensemble(squeezed, tmp_path / "sq.csv", fmt="csv")
        lines = data_path.read_text().splitlines()
        assert lines[0].split(",")[:3] == ["re_0", "im_0", "re_1"]
        assert len(lines) == vacuum.n_realizations + 1
        assert len(lines[1].split(",")) == 2 * lattice.n_points
        assert json.loads(header_path.read_text())["gain"]["gamma"] == 1.0

    def test_unknown_format(self, tmp_path, vacuum):
        with pytest.raises(ParameterError):
            export_ensemble(vacuum, tmp_path / "x", fmt="hdf5")
