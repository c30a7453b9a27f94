"""
Unit tests for the Bogoliubov gain functions.
"""

import numpy as np
import pytest

from src.physics.errors import ParameterError
from src.physics.gain import (
    Convention,
    GainParams,
    gain_profile,
    high_gain_asymptote,
    high_gain_deviation,
    low_gain_g,
    phase_mismatch,
    s_of_omega,
    synthetic_profile,
)
from src.physics.lattice import make_lattice


@pytest.fixture
def dense_lattice():
    """4097 points over ω₀ ± 4; detuning 2 is the grid point center + 1024."""
    return make_lattice(100.0, 4.0, 4097)


class TestGainParams:
    """Tests for parameter validation."""

    def test_negative_gamma(self):
        with pytest.raises(ParameterError, match="gamma"):
            GainParams(gamma=-1.0, kappa=1.0, z=1.0)

    def test_zero_length(self):
        with pytest.raises(ParameterError, match="z"):
            GainParams(gamma=1.0, kappa=1.0, z=0.0)

    def test_infinite_kappa(self):
        with pytest.raises(ParameterError, match="kappa"):
            GainParams(gamma=1.0, kappa=float("inf"), z=1.0)

    def test_convention_from_string(self):
        """Plain strings are coerced to the enum."""
        params = GainParams(gamma=1.0, kappa=1.0, z=1.0, convention="literal")
        assert params.convention is Convention.LITERAL

    def test_without_gain(self, gain_params):
        """The baseline keeps the crystal and drops the pump."""
        base = gain_params.without_gain()
        assert base.gamma == 0.0
        assert base.kappa == gain_params.kappa
        assert base.z == gain_params.z


class TestGainProfile:
    """Tests for f and g on the lattice."""

    @pytest.mark.parametrize(
        "gamma, kappa, z",
        [
            (1e-3, 1.0, 1.0),
            (1.0, 1.0, 1.0),
            (5.0, 1.0, 1.0),
            (2.0, 1.0, 1.0),
            (2.0, 0.5, 10.0),
        ],
    )
    def test_unitary_convention_is_bogoliubov(self, dense_lattice, gamma, kappa, z):
        """|f|² − |g|² = 1 under the unitary radicand on a 4097-point grid."""
        profile = gain_profile(dense_lattice, GainParams(gamma=gamma, kappa=kappa, z=z))
        assert profile.unitarity_deviation() <= 1e-12

    def test_threshold_point_on_grid(self, dense_lattice):
        """γ = 2, κ = 1 puts s = 0 exactly at |ω − ω₀| = 2, where the series branch runs."""
        s = s_of_omega(2.0, phase_mismatch(dense_lattice, 1.0), Convention.UNITARY)
        assert np.min(np.abs(s)) == 0.0
        profile = gain_profile(dense_lattice, GainParams(gamma=2.0, kappa=1.0, z=1.0))
        k = dense_lattice.center + 1024
        assert abs(profile.f[k]) ** 2 == pytest.approx(5.0, rel=1e-14)
        assert profile.g_intensity[k] == pytest.approx(4.0, rel=1e-14)

    def test_literal_breaks_unitarity(self, lattice):
        """The literal radicand is not Bogoliubov away from ω₀."""
        params = GainParams(gamma=1.0, kappa=1.0, z=1.0, convention=Convention.LITERAL)
        assert gain_profile(lattice, params).unitarity_deviation() > 1e-3

    def test_mirror_symmetric(self, gain):
        """f and g depend on (ω − ω₀)² only."""
        assert gain.mirror_asymmetry() == 0.0

    def test_center_values(self, lattice, gain):
        """At Δk = 0, f = cosh(γz) and g = i·sinh(γz)."""
        c = lattice.center
        assert gain.g[c] == pytest.approx(1j * np.sinh(1.0))
        assert gain.f[c] == pytest.approx(np.cosh(1.0))

    def test_baseline_is_vacuum(self, gain):
        """g = 0 and |f| = 1 without pump."""
        base = gain.baseline()
        assert base.is_vacuum
        np.testing.assert_allclose(np.abs(base.f), 1.0, rtol=1e-12)

    def test_compensated_baseline_is_real(self, gain):
        """Dispersion compensation removes the low-gain phase of f."""
        np.testing.assert_allclose(gain.baseline().f.imag, 0.0, atol=1e-12)

    def test_series_branch(self, lattice):
        """Tiny gain without dispersion uses the series forms."""
        profile = gain_profile(lattice, GainParams(gamma=1e-9, kappa=0.0, z=1.0))
        np.testing.assert_allclose(profile.g, 1j * 1e-9, rtol=1e-9)
        np.testing.assert_allclose(profile.f, 1.0, rtol=1e-12)

    def test_arrays_are_read_only(self, gain):
        with pytest.raises(ValueError):
            gain.g[0] = 0.0

    def test_s_of_omega_is_principal_root(self):
        """Negative radicands give a positive imaginary root."""
        s = s_of_omega(1.0, np.array([4.0]), Convention.UNITARY)
        assert s[0] == pytest.approx(1j * np.sqrt(3.0))


class TestLimits:
    """Tests for the low- and high-gain asymptotes."""

    def test_low_gain_matches_literal(self, lattice):
        """g ≈ iγz·sinc(κ(ω − ω₀)²z) to second order in γz."""
        params = GainParams(gamma=1e-3, kappa=1.0, z=1.0, convention=Convention.LITERAL)
        g = gain_profile(lattice, params).g
        reference = low_gain_g(lattice, params)
        error = np.max(np.abs(g - reference)) / abs(reference[lattice.center])
        assert error <= 1e-4

    def test_high_gain_deviation_small(self, lattice):
        """|f| approaches the quartic Gaussian on its core."""
        params = GainParams(gamma=10.0, kappa=1.0, z=1.0, convention=Convention.LITERAL)
        assert high_gain_deviation(lattice, params) <= 0.01

    def test_high_gain_asymptote_g_is_i_f(self, lattice, gain_params):
        f_hg, g_hg = high_gain_asymptote(lattice, gain_params)
        np.testing.assert_allclose(g_hg, 1j * f_hg)

    def test_high_gain_needs_pump(self, lattice, gain_params):
        with pytest.raises(ParameterError):
            high_gain_asymptote(lattice, gain_params.without_gain())


class TestSyntheticProfile:
    """Tests for prescribed-intensity profiles."""

    def test_flat_band(self, lattice):
        profile = synthetic_profile(lattice, np.full(lattice.n_points, 2.0))
        np.testing.assert_allclose(profile.g_intensity, 2.0)
        assert profile.unitarity_deviation() <= 1e-14

    def test_negative_intensity(self, lattice):
        with pytest.raises(ParameterError):
            synthetic_profile(lattice, -np.ones(lattice.n_points))
