"""
Unit tests for the quantum-theory closed forms.
"""

from dataclasses import replace

import numpy as np
import pytest

from src.physics.correlators import ProbePairs, ProbeQuads, Provenance
from src.physics.errors import ConfigurationMismatchError, LatticeError, ParameterError
from src.physics.gain import gain_profile
from src.physics.gate import make_gate
from src.physics.lattice import integrate, make_lattice
from src.physics.probes import random_quads, ridge_quads
from src.physics.qt_engine import (
    coherent_to_incoherent_ratio,
    corr2_qt,
    corr4_qt,
    corr4_qt_model,
    photon_number_qt,
    spectrum_qt,
)


def _center_quad(lattice):
    c = lattice.center
    return ProbeQuads([c], [c], [c], [c], family="degenerate")


class TestSecondOrder:
    """Tests for the spectrum, corr2 and photon number."""

    def test_spectrum_is_g_intensity(self, gain):
        np.testing.assert_array_equal(spectrum_qt(gain), np.abs(gain.g) ** 2)

    def test_corr2_diagonal(self, lattice, gain, kernel):
        """⟨c†(ω)c(ω)⟩ = |g|²·T."""
        k = np.arange(lattice.n_points)
        result = corr2_qt(gain, kernel, ProbePairs(k, k))
        np.testing.assert_allclose(result.values, gain.g_intensity * kernel.duration, rtol=1e-14)
        assert result.provenance is Provenance.QT_CLOSED_FORM

    def test_corr2_hermitian(self, gain, kernel):
        pairs = ProbePairs([3, 10, 20], [30, 12, 25])
        forward = corr2_qt(gain, kernel, pairs).values
        backward = corr2_qt(gain, kernel, pairs.swapped()).values
        np.testing.assert_allclose(forward, np.conj(backward), rtol=1e-14)

    def test_photon_number(self, lattice, gain, kernel):
        expected = kernel.duration * integrate(lattice, gain.g_intensity)
        assert photon_number_qt(gain, kernel) == pytest.approx(expected)

    def test_vacuum_has_no_photons(self, gain, kernel):
        assert photon_number_qt(gain.baseline(), kernel) == 0.0

    def test_lattice_mismatch(self, gain):
        other = make_gate(make_lattice(100.0, 4.0, 31), 30.0)
        with pytest.raises(ConfigurationMismatchError):
            corr2_qt(gain, other, ProbePairs([0], [0]))


class TestFourthOrder:
    """Tests for the coherent + incoherent correlator."""

    def test_degenerate_center(self, lattice, gain, kernel):
        """At ω₀ the terms are |fg|²T² and (1 + ξ)|g|⁴T²."""
        tensor = corr4_qt(gain, kernel, _center_quad(lattice))
        c = lattice.center
        t2 = kernel.duration**2
        f2, g2 = abs(gain.f[c]) ** 2, gain.g_intensity[c]
        assert tensor.term("coherent")[0] == pytest.approx(f2 * g2 * t2, rel=1e-12)
        assert tensor.term("incoherent")[0] == pytest.approx(2 * g2**2 * t2, rel=1e-12)
        assert tensor.xi == 1

    def test_distinguishable_photons(self, lattice, gain, kernel):
        """ξ = 0 drops the exchange pairing."""
        quad = _center_quad(lattice)
        one = corr4_qt(gain, kernel, quad, xi=1).term("incoherent")[0]
        zero = corr4_qt(gain, kernel, quad, xi=0).term("incoherent")[0]
        assert one == pytest.approx(2 * zero)

    def test_ratio_at_center(self, lattice, gain, kernel):
        tensor = corr4_qt(gain, kernel, _center_quad(lattice))
        ratio = tensor.term("coherent")[0].real / tensor.term("incoherent")[0].real
        assert ratio == pytest.approx(coherent_to_incoherent_ratio(1.0), rel=1e-12)

    def test_ratio_diverges_without_gain(self):
        assert coherent_to_incoherent_ratio(0.0) == float("inf")

    def test_vanishes_without_gain(self, gain, kernel):
        quads = ProbeQuads([20, 22], [30, 28], [21, 25], [29, 25])
        np.testing.assert_array_equal(corr4_qt(gain.baseline(), kernel, quads).values, 0.0)

    def test_invalid_xi(self, gain, kernel):
        with pytest.raises(ParameterError, match="xi"):
            corr4_qt_model(gain, kernel, xi=2)

    def test_ridge_coherent_term_survives(self, lattice, gain, kernel):
        """Photon pairs on the anticorrelated ridge carry the coherent term at full D(0)²."""
        a, c = 20, 27
        quads = ProbeQuads([a], [lattice.mirror[a]], [c], [lattice.mirror[c]])
        coherent = corr4_qt(gain, kernel, quads).term("coherent")[0]
        h = gain.f * gain.g
        assert coherent == pytest.approx(np.conj(h[a]) * h[c] * kernel.duration**2, rel=1e-12)

    @pytest.mark.parametrize("swap", ["swap_ab", "swap_cd"])
    def test_exchange_symmetric_on_ridge(self, lattice, gain, kernel, swap):
        """Swapping the photons of a pair leaves the full value unchanged on the ridge."""
        quads = ridge_quads(lattice, 12, seed=3)
        tensor = corr4_qt(gain, kernel, quads)
        swapped = corr4_qt(gain, kernel, getattr(quads, swap)())
        np.testing.assert_allclose(swapped.values, tensor.values, rtol=1e-12, atol=0)

    @pytest.mark.parametrize("swap", ["swap_ab", "swap_cd"])
    def test_incoherent_exchange_symmetric_anywhere(self, lattice, gain, kernel, swap):
        """With ξ = 1 the incoherent term is symmetric on arbitrary quads."""
        quads = random_quads(lattice, 24, seed=11)
        tensor = corr4_qt(gain, kernel, quads)
        swapped = corr4_qt(gain, kernel, getattr(quads, swap)())
        np.testing.assert_allclose(
            swapped.term("incoherent"), tensor.term("incoherent"), rtol=1e-12, atol=0
        )

    def test_out_of_lattice_quad(self, lattice, gain, kernel):
        with pytest.raises(LatticeError):
            corr4_qt(gain, kernel, ProbeQuads([lattice.n_points], [0], [0], [0]))


class TestGainDependence:
    """Tests tying the correlators back to the gain profile."""

    def test_photon_number_grows_with_gain(self, lattice, kernel, gain_params):
        low = gain_profile(lattice, replace(gain_params, gamma=0.1))
        high = gain_profile(lattice, replace(gain_params, gamma=1.0))
        assert photon_number_qt(high, kernel) > photon_number_qt(low, kernel)
