"""
Temporal gate: a rectangular shutter open on [−T/2, T/2].

In the frequency domain the shutter convolves the field with
W(Δ) = T·sinc(ΔT/2), and two gated fields overlap through the kernel
D(Δ), which has the same functional form. D is tabulated once per
integer lattice offset; everything downstream indexes that table.
"""

import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Literal

import numpy as np
from scipy.linalg import toeplitz
from scipy.signal import fftconvolve

from src.physics.errors import LatticeError, ParameterError
from src.physics.lattice import FrequencyLattice

logger = logging.getLogger(__name__)

# duration · spectral width of the light below this triggers a warning
COHERENCE_THRESHOLD = 50.0


def window_transform(duration: float, delta_omega: np.ndarray | float) -> np.ndarray:
    """W(Δ) = T·sin(ΔT/2)/(ΔT/2)."""
    if duration <= 0:
        raise ParameterError(f"gate duration must be > 0 (got {duration})")
    return duration * np.sinc(np.asarray(delta_omega) * duration / (2.0 * np.pi))


def overlap_kernel(duration: float, delta_omega: np.ndarray | float) -> np.ndarray:
    """
    D(Δ) = ∫_{−T/2}^{T/2} dt e^{iΔt}, evaluated in closed form as 2·sin(ΔT/2)/Δ.

    Written independently of window_transform so the two can be compared.
    """
    if duration <= 0:
        raise ParameterError(f"gate duration must be > 0 (got {duration})")
    delta = np.asarray(delta_omega, dtype=float)
    zero = delta == 0.0
    safe = np.where(zero, 1.0, delta)
    return np.where(zero, duration, 2.0 * np.sin(safe * duration / 2.0) / safe)


@dataclass(frozen=True, eq=False)
class GateKernel:
    """D(Δ) tabulated on the 2M − 1 lattice offsets −(M−1) … (M−1)."""

    duration: float
    lattice: FrequencyLattice

    def __post_init__(self) -> None:
        if self.duration <= 0:
            raise ParameterError(f"gate duration must be > 0 (got {self.duration})")

    @cached_property
    def table(self) -> np.ndarray:
        m = self.lattice.n_points
        offsets = np.arange(-(m - 1), m)
        table = overlap_kernel(self.duration, offsets * self.lattice.d_omega)
        table.setflags(write=False)
        return table

    @property
    def zero_offset(self) -> int:
        """Position of Δ = 0 in the table."""
        return self.lattice.n_points - 1

    def at_offset(self, offset: int | np.ndarray) -> np.ndarray:
        """D at integer lattice offset(s) (ω_j − ω_k)/d_omega."""
        return self.table[np.asarray(offset) + self.zero_offset]

    def between(self, j: int | np.ndarray, k: int | np.ndarray) -> np.ndarray:
        """D(ω_j − ω_k)."""
        return self.at_offset(np.asarray(j) - np.asarray(k))

    def sum_frequency(self, a: int | np.ndarray, b: int | np.ndarray) -> np.ndarray:
        """D(2ω₀ − ω_a − ω_b)."""
        return self.at_offset(self.zero_offset - np.asarray(a) - np.asarray(b))

    def sum_index(self, s: int | np.ndarray) -> np.ndarray:
        """D(2ω₀ − ω_k − ω_l) for sum index s = k + l."""
        return self.at_offset(self.zero_offset - np.asarray(s))

    @cached_property
    def matrix(self) -> np.ndarray:
        """Dense Toeplitz D(ω_j − ω_k); symmetric because D is even."""
        return toeplitz(self.table[self.zero_offset :])

    @cached_property
    def lattice_overlap(self) -> np.ndarray:
        """∫đω′ W(ω_j − ω′)W(ω_k − ω′) computed on the lattice."""
        w = self.matrix
        return self.lattice.measure * (w @ w)

    def normalization_sums(self) -> tuple[float, float]:
        """Lattice values of ∫đΔ D and ∫đΔ D² over the band detunings."""
        values = self.at_offset(self.lattice.offsets)
        measure = self.lattice.measure
        return float(np.sum(values) * measure), float(np.sum(values**2) * measure)

    def truncation_bounds(self) -> tuple[float, float]:
        """
        Analytic tail bounds for the two band-limited integrals.

        With X = half_width·T/2 the sinc tails beyond the band are at most
        4/(πX) for ∫D and 2T/(πX) for ∫D².
        """
        x = self.lattice.half_width * self.duration / 2.0
        return 4.0 / (np.pi * x), 2.0 * self.duration / (np.pi * x)

    @property
    def aliasing_free(self) -> bool:
        """d_omega·T/2 < π keeps the sampled D and D² free of aliasing."""
        return self.lattice.d_omega * self.duration / 2.0 < np.pi

    def coherence_product(self, g_intensity: np.ndarray) -> float:
        """T times the rms spectral width (2σ) of |g|²; infinite without light."""
        weights = np.asarray(g_intensity, dtype=float)
        total = weights.sum()
        if total == 0.0:
            return float("inf")
        rms = np.sqrt(np.sum(weights * self.lattice.detunings**2) / total)
        return float(self.duration * 2.0 * rms)

    def check_coherence(self, g_intensity: np.ndarray) -> bool:
        """Warn when T is not long against the light's coherence time."""
        product = self.coherence_product(g_intensity)
        if product < COHERENCE_THRESHOLD:
            logger.warning(
                f"gate duration x spectral width = {product:.3g} < {COHERENCE_THRESHOLD:g}; "
                "T is not long compared to the coherence time"
            )
            return False
        return True

    def __repr__(self) -> str:
        return f"GateKernel(T={self.duration}, M={self.lattice.n_points})"


def make_gate(lattice: FrequencyLattice, duration: float) -> GateKernel:
    kernel = GateKernel(duration=float(duration), lattice=lattice)
    if not kernel.aliasing_free:
        logger.warning(
            f"d_omega*T/2 = {lattice.d_omega * duration / 2:.3g} >= pi; "
            "lattice sums of D will alias"
        )
    return kernel


def gate_field(
    realization: np.ndarray,
    kernel: GateKernel,
    method: Literal["fft", "direct"] = "fft",
) -> np.ndarray:
    """
    A[k] = Σ_j measure·W(ω_k − ω_j)·a[j].

    Accepts one realization (M,) or a stack (R, M). The FFT path is a
    full linear convolution against the offset table, so it matches the
    direct Toeplitz product up to rounding.
    """
    field_ = np.asarray(realization)
    m = kernel.lattice.n_points
    if field_.shape[-1] != m:
        raise LatticeError(
            f"realization has {field_.shape[-1]} points, gate lattice has {m}"
        )
    measure = kernel.lattice.measure
    if method == "direct":
        return measure * (field_ @ kernel.matrix.T)
    if method != "fft":
        raise ValueError(f"unknown gating method: {method}")
    table = kernel.table if field_.ndim == 1 else kernel.table[None, :]
    full = fftconvolve(field_, table, mode="full", axes=-1)
    return measure * full[..., m - 1 : 2 * m - 1]


__all__ = [
    "COHERENCE_THRESHOLD",
    "GateKernel",
    "gate_field",
    "make_gate",
    "overlap_kernel",
    "window_transform",
]
