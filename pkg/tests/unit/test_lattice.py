"""
Unit tests for the frequency lattice.
"""

import logging

import numpy as np
import pytest

from src.physics.errors import LatticeError
from src.physics.lattice import (
    check_band_edges,
    edge_leak,
    integrate,
    make_lattice,
)


class TestFrequencyLattice:
    """Tests for grid construction and its symmetries."""

    def test_center_is_omega0(self, lattice):
        """The center index sits exactly on omega0."""
        assert lattice.center == 25
        assert lattice.omegas[lattice.center] == lattice.omega0

    def test_spacing(self, lattice):
        """Spacing is 2·half_width/(M − 1)."""
        assert lattice.d_omega == pytest.approx(8.0 / 50)

    def test_even_size_rejected(self):
        """Even grids have no center point."""
        with pytest.raises(LatticeError, match="odd"):
            make_lattice(100.0, 4.0, 50)

    def test_too_small_rejected(self):
        """A single point cannot carry a band."""
        with pytest.raises(LatticeError):
            make_lattice(100.0, 4.0, 1)

    def test_band_must_stay_positive(self):
        """half_width >= omega0 would reach zero frequency."""
        with pytest.raises(LatticeError, match="half_width"):
            make_lattice(1.0, 2.0, 11)

    def test_mirror_is_involution(self, lattice):
        """Applying the mirror twice is the identity."""
        np.testing.assert_array_equal(lattice.mirror[lattice.mirror], np.arange(lattice.n_points))

    def test_mirror_negates_offsets(self, lattice):
        """2ω₀ − ω maps offset k − c to c − k exactly."""
        np.testing.assert_array_equal(lattice.offsets[lattice.mirror], -lattice.offsets)

    def test_mirror_index_matches_array(self, lattice):
        """The scalar and array forms agree."""
        assert lattice.mirror_index(3) == lattice.mirror[3]

    def test_discretization_identity(self, lattice):
        """delta_peak · measure = 1."""
        assert lattice.rules.identity_error < 1e-15

    def test_delta_column_integrates_to_one(self, lattice):
        """The discrete 2πδ integrates to one."""
        assert integrate(lattice, lattice.delta_column(7)) == pytest.approx(1.0, rel=1e-14)

    def test_cell_bounds_span(self, lattice):
        """The quadrature cells cover 2·half_width + d_omega."""
        lo, hi = lattice.cell_bounds()
        assert hi - lo == pytest.approx(2 * lattice.half_width + lattice.d_omega)

    def test_sum_detunings_center(self, lattice):
        """Sum index M − 1 is ω + ω̃ = 2ω₀."""
        sums = lattice.sum_detunings()
        assert len(sums) == 2 * lattice.n_points - 1
        assert sums[lattice.n_points - 1] == 0.0


class TestIntegrate:
    """Tests for lattice quadrature."""

    def test_constant(self, lattice):
        """∫đω 1 over the lattice is M·d_omega/2π."""
        expected = lattice.n_points * lattice.d_omega / (2 * np.pi)
        assert integrate(lattice, np.ones(lattice.n_points)) == pytest.approx(expected)

    def test_complex_stays_complex(self, lattice):
        """Complex samples give a complex integral."""
        value = integrate(lattice, 1j * np.ones(lattice.n_points))
        assert isinstance(value, complex)

    def test_batched(self, lattice):
        """Leading axes are kept."""
        values = integrate(lattice, np.ones((3, lattice.n_points)))
        assert values.shape == (3,)

    def test_wrong_length(self, lattice):
        """Samples must live on the lattice."""
        with pytest.raises(LatticeError):
            integrate(lattice, np.ones(lattice.n_points + 1))


class TestBandEdges:
    """Tests for the band-edge leak diagnostic."""

    def test_gaussian_is_clean(self, lattice):
        """A narrow Gaussian has decayed at the edges."""
        intensity = np.exp(-(lattice.detunings**2) / 0.5)
        assert edge_leak(lattice, intensity) < 1e-6
        assert check_band_edges(lattice, intensity)

    def test_flat_band_warns(self, lattice, caplog):
        """A flat spectrum leaks and is reported."""
        with caplog.at_level(logging.WARNING):
            assert not check_band_edges(lattice, np.ones(lattice.n_points), label="flat")
        assert "flat" in caplog.text

    def test_zero_spectrum(self, lattice):
        """Nothing to leak."""
        assert edge_leak(lattice, np.zeros(lattice.n_points)) == 0.0
