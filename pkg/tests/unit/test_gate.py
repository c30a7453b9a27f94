"""
Unit tests for the temporal gate and its overlap kernel.
"""

import numpy as np
import pytest

from src.physics.errors import LatticeError, ParameterError
from src.physics.gate import GateKernel, gate_field, make_gate, overlap_kernel, window_transform
from src.physics.lattice import make_lattice


class TestOverlapKernel:
    """Tests for D(Δ) and the window transform."""

    def test_zero_is_duration(self):
        """D(0) = T exactly."""
        assert overlap_kernel(12.5, 0.0) == 12.5

    def test_matches_window_transform(self):
        """Two independent closed forms agree."""
        delta = np.linspace(-3.0, 3.0, 41)
        np.testing.assert_allclose(
            overlap_kernel(7.0, delta), window_transform(7.0, delta), rtol=1e-12, atol=1e-12
        )

    def test_first_zero(self):
        """D vanishes at Δ = 2π/T."""
        assert abs(overlap_kernel(4.0, 2 * np.pi / 4.0)) < 1e-12

    @pytest.mark.parametrize("duration", [0.0, -1.0])
    def test_non_positive_duration(self, duration):
        with pytest.raises(ParameterError):
            overlap_kernel(duration, 0.0)


class TestGateKernel:
    """Tests for the tabulated kernel."""

    def test_table_length(self, lattice, kernel):
        assert len(kernel.table) == 2 * lattice.n_points - 1

    def test_at_zero_offset(self, kernel):
        assert kernel.at_offset(0) == kernel.duration

    def test_even(self, kernel):
        """D(Δ) = D(−Δ)."""
        np.testing.assert_allclose(kernel.table, kernel.table[::-1], rtol=1e-14, atol=1e-12)

    def test_sum_frequency_on_mirror(self, lattice, kernel):
        """D(2ω₀ − ω − (2ω₀ − ω)) = D(0) for mirrored pairs."""
        k = np.arange(lattice.n_points)
        np.testing.assert_array_equal(kernel.sum_frequency(k, lattice.mirror[k]), kernel.duration)

    def test_sum_index_center(self, lattice, kernel):
        assert kernel.sum_index(lattice.n_points - 1) == kernel.duration

    def test_matrix_is_toeplitz(self, lattice, kernel):
        m = kernel.matrix
        assert m.shape == (lattice.n_points, lattice.n_points)
        assert m[3, 7] == pytest.approx(kernel.between(3, 7), rel=1e-14)
        np.testing.assert_array_equal(m, m.T)

    def test_lattice_overlap_diagonal(self, lattice, kernel):
        """The self-overlap on the diagonal is positive and near T."""
        diag = np.diag(kernel.lattice_overlap)
        assert np.all(diag > 0)
        assert diag[lattice.center] == pytest.approx(kernel.duration, rel=0.1)

    def test_aliasing_guard(self, lattice):
        assert make_gate(lattice, 30.0).aliasing_free
        assert not GateKernel(duration=60.0, lattice=lattice).aliasing_free

    def test_aliasing_warns(self, lattice, caplog):
        make_gate(lattice, 60.0)
        assert "alias" in caplog.text

    def test_normalizations_within_tail_bounds(self):
        """Band-limited ∫đΔ D and ∫đΔ D² miss 1 and T by at most twice the tail bounds."""
        wide = make_lattice(100.0, 8.0, 401)
        kernel = make_gate(wide, 60.0)
        int_d, int_d2 = kernel.normalization_sums()
        bound_d, bound_d2 = kernel.truncation_bounds()
        assert abs(int_d - 1.0) <= 2 * bound_d
        assert abs(int_d2 - kernel.duration) <= 2 * bound_d2

    def test_coherence_vacuum(self, lattice, kernel):
        """No light, nothing to warn about."""
        assert kernel.check_coherence(np.zeros(lattice.n_points))

    def test_coherence_short_gate(self, lattice, caplog):
        """A short gate against a narrow spectrum is flagged."""
        narrow = np.exp(-(lattice.detunings**2) / 0.01)
        assert not GateKernel(duration=1.0, lattice=lattice).check_coherence(narrow)
        assert "coherence" in caplog.text

    def test_coherence_product_flat_band(self, lattice, kernel):
        """A flat band over ±4 has rms width 4/√3, so T = 30 is long enough."""
        product = kernel.coherence_product(np.ones(lattice.n_points))
        rms = np.sqrt(np.mean(lattice.detunings**2))
        assert product == pytest.approx(30.0 * 2.0 * rms, rel=1e-12)
        assert kernel.check_coherence(np.ones(lattice.n_points))

    def test_coherence_product_without_light(self, lattice, kernel):
        assert kernel.coherence_product(np.zeros(lattice.n_points)) == float("inf")


class TestGateField:
    """Tests for gating a field realization."""

    def test_fft_matches_direct(self, lattice, kernel):
        rng = np.random.default_rng(0)
        field = rng.standard_normal((3, lattice.n_points)) + 1j * rng.standard_normal(
            (3, lattice.n_points)
        )
        np.testing.assert_allclose(
            gate_field(field, kernel, "fft"), gate_field(field, kernel, "direct"), atol=1e-10
        )

    def test_single_realization(self, lattice, kernel):
        out = gate_field(np.ones(lattice.n_points, dtype=complex), kernel)
        assert out.shape == (lattice.n_points,)

    def test_wrong_lattice(self, lattice, kernel):
        with pytest.raises(LatticeError):
            gate_field(np.ones(lattice.n_points + 2), kernel)

    def test_unknown_method(self, lattice, kernel):
        with pytest.raises(ValueError, match="method"):
            gate_field(np.ones(lattice.n_points), kernel, method="bogus")
