"""
Frequency lattice - the discrete stand-in for the continuum ω axis.

Every integral ∫đω = ∫dω/2π in the engines is the uniform sum
Σ_k samples[k]·d_omega/2π, and every 2πδ(ω−ω′) is the column that
holds 2π/d_omega at one point. The two constants multiply to one, so
the discrete delta integrates to exactly one.
"""

import logging
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from src.physics.errors import LatticeError

logger = logging.getLogger(__name__)

# |g(edge)|² / |g(ω₀)|² above this leaks spectral weight out of the band.
EDGE_LEAK_TOLERANCE = 1e-6


@dataclass(frozen=True)
class DiscretizationRules:
    """Discrete replacements for 2πδ(0) and the measure đω."""

    delta_peak: float  # 2π / d_omega
    measure: float  # d_omega / 2π

    @property
    def identity_error(self) -> float:
        """|delta_peak·measure − 1|; zero up to one rounding."""
        return abs(self.delta_peak * self.measure - 1.0)


@dataclass(frozen=True)
class FrequencyLattice:
    """
    Uniform odd-sized grid symmetric about omega0.

    Point k sits at ω_k = omega0 + (k − c)·d_omega with c = (M−1)/2,
    so ω₀ is a grid point and ω → 2ω₀ − ω is the permutation k → M−1−k.
    """

    omega0: float
    half_width: float
    n_points: int
    d_omega: float = field(init=False)

    def __post_init__(self) -> None:
        if self.n_points < 3 or self.n_points % 2 == 0:
            raise LatticeError(
                f"n_points must be odd and >= 3 (got {self.n_points}); "
                "mirror symmetry about omega0 needs a center point"
            )
        if not 0.0 < self.half_width < self.omega0:
            raise LatticeError(
                f"half_width must satisfy 0 < half_width < omega0 "
                f"(got half_width={self.half_width}, omega0={self.omega0})"
            )
        object.__setattr__(self, "d_omega", 2.0 * self.half_width / (self.n_points - 1))

    @property
    def center(self) -> int:
        """Index of ω₀."""
        return (self.n_points - 1) // 2

    @cached_property
    def offsets(self) -> np.ndarray:
        """Integer offsets k − c; exactly antisymmetric under the mirror."""
        return np.arange(self.n_points) - self.center

    @cached_property
    def detunings(self) -> np.ndarray:
        """ω_k − ω₀ per grid point."""
        return self.offsets * self.d_omega

    @cached_property
    def omegas(self) -> np.ndarray:
        """Absolute angular frequencies ω_k."""
        return self.omega0 + self.detunings

    @cached_property
    def rules(self) -> DiscretizationRules:
        return DiscretizationRules(
            delta_peak=2.0 * np.pi / self.d_omega,
            measure=self.d_omega / (2.0 * np.pi),
        )

    @property
    def measure(self) -> float:
        return self.rules.measure

    @property
    def delta_peak(self) -> float:
        return self.rules.delta_peak

    def mirror_index(self, k: int | np.ndarray) -> int | np.ndarray:
        """Index of 2ω₀ − ω_k."""
        return self.n_points - 1 - k

    @cached_property
    def mirror(self) -> np.ndarray:
        """The mirror permutation as an index array."""
        return np.arange(self.n_points)[::-1].copy()

    def delta_column(self, k: int) -> np.ndarray:
        """Discrete 2πδ(ω − ω_k)."""
        column = np.zeros(self.n_points)
        column[k] = self.delta_peak
        return column

    def cell_bounds(self) -> tuple[float, float]:
        """Outer edges of the quadrature cells; the sum is the midpoint rule on this span."""
        half = 0.5 * self.d_omega
        return float(self.omegas[0] - half), float(self.omegas[-1] + half)

    def sum_detunings(self) -> np.ndarray:
        """Detunings (ω + ω̃) − 2ω₀ for the 2M−1 sum indices s = k + l."""
        return (np.arange(2 * self.n_points - 1) - 2 * self.center) * self.d_omega

    def __repr__(self) -> str:
        return (
            f"FrequencyLattice(omega0={self.omega0}, half_width={self.half_width}, "
            f"n_points={self.n_points})"
        )


def make_lattice(omega0: float, half_width: float, n_points: int) -> FrequencyLattice:
    """Build a lattice; rejects even sizes and bands reaching zero frequency."""
    return FrequencyLattice(
        omega0=float(omega0), half_width=float(half_width), n_points=int(n_points)
    )


def integrate(lattice: FrequencyLattice, samples: np.ndarray) -> complex | float:
    """
    ∫đω of per-point samples.

    Uniform weight d_omega/2π at every point, end points included, so the
    discrete delta column integrates to exactly one.
    """
    values = np.asarray(samples)
    if values.shape[-1] != lattice.n_points:
        raise LatticeError(
            f"samples have length {values.shape[-1]}, lattice has {lattice.n_points} points"
        )
    total = values.sum(axis=-1) * lattice.measure
    if np.ndim(total) == 0:
        return complex(total) if np.iscomplexobj(total) else float(total)
    return total


def edge_leak(lattice: FrequencyLattice, intensity: np.ndarray) -> float:
    """Ratio of the larger band-edge value of a spectrum to its center value."""
    values = np.abs(np.asarray(intensity, dtype=complex))
    if values.shape[-1] != lattice.n_points:
        raise LatticeError("intensity is not sampled on this lattice")
    peak = values[lattice.center]
    edge = max(values[0], values[-1])
    if peak == 0.0:
        return 0.0 if edge == 0.0 else float("inf")
    return float(edge / peak)


def check_band_edges(
    lattice: FrequencyLattice,
    intensity: np.ndarray,
    tolerance: float = EDGE_LEAK_TOLERANCE,
    label: str = "spectrum",
) -> bool:
    """Warn when a spectrum has not decayed at the band edges. Returns True when clean."""
    leak = edge_leak(lattice, intensity)
    if leak > tolerance:
        logger.warning(
            f"{label}: band-edge leak {leak:.3e} exceeds {tolerance:.0e}; "
            "widen half_width"
        )
        return False
    return True


__all__ = [
    "EDGE_LEAK_TOLERANCE",
    "DiscretizationRules",
    "FrequencyLattice",
    "check_band_edges",
    "edge_leak",
    "integrate",
    "make_lattice",
]
