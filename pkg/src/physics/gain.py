"""
Two-mode squeezing gain functions f(ω), g(ω).

The crystal maps the input field a onto b = f·a + g·a*(2ω₀ − ω). Two
algebraic conventions are shipped for the square-root argument s:

- Literal: s² = γ² − Δk²
- Unitary: s² = γ² − (Δk/2)²   (satisfies |f|² − |g|² = 1)

Only Unitary keeps the Bogoliubov condition, which the photon-number and
four-frequency identities lean on, so it is the default.
"""

import logging
from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np

from src.physics.errors import LatticeError, ParameterError
from src.physics.lattice import FrequencyLattice, check_band_edges

logger = logging.getLogger(__name__)

# Below this |s·z| the series forms replace cosh and sinh(sz)/s.
SERIES_CROSSOVER = 1e-6


class Convention(str, Enum):
    """Which radicand s² is used in the gain functions."""

    LITERAL = "literal"
    UNITARY = "unitary"


@dataclass(frozen=True)
class GainParams:
    """
    Crystal parameters.

    gamma: gain coefficient (1/length), kappa: half the group-delay
    dispersion k″/2, z: crystal length.
    """

    gamma: float
    kappa: float
    z: float
    convention: Convention = Convention.UNITARY
    compensate_dispersion: bool = True

    def __post_init__(self) -> None:
        if self.gamma < 0:
            raise ParameterError(f"gamma must be >= 0 (got {self.gamma})")
        if self.z <= 0:
            raise ParameterError(f"z must be > 0 (got {self.z})")
        if not np.isfinite(self.kappa):
            raise ParameterError(f"kappa must be finite (got {self.kappa})")
        object.__setattr__(self, "convention", Convention(self.convention))

    @property
    def gain(self) -> float:
        """Dimensionless single-pass gain γz."""
        return self.gamma * self.z

    def without_gain(self) -> "GainParams":
        """Same crystal with the pump switched off (the g = 0 baseline)."""
        return replace(self, gamma=0.0)


@dataclass(frozen=True, eq=False)
class GainProfile:
    """Tabulated f and g on a lattice."""

    lattice: FrequencyLattice
    f: np.ndarray
    g: np.ndarray
    params: GainParams
    label: str = field(default="eq12")

    def __post_init__(self) -> None:
        m = self.lattice.n_points
        if self.f.shape != (m,) or self.g.shape != (m,):
            raise LatticeError(
                f"gain arrays must have shape ({m},); got f{self.f.shape}, g{self.g.shape}"
            )
        self.f.setflags(write=False)
        self.g.setflags(write=False)

    @property
    def g_intensity(self) -> np.ndarray:
        """|g|² per grid point."""
        return np.abs(self.g) ** 2

    @property
    def is_vacuum(self) -> bool:
        return bool(np.all(self.g == 0))

    def unitarity_deviation(self) -> float:
        """max_k ||f|² − |g|² − 1| relative to |f|²."""
        f2 = np.abs(self.f) ** 2
        g2 = np.abs(self.g) ** 2
        return float(np.max(np.abs(f2 - g2 - 1.0) / np.maximum(f2, 1.0)))

    def mirror_asymmetry(self) -> float:
        """Largest |f[k] − f[mirror k]|, |g[k] − g[mirror k]|; zero on a valid lattice."""
        mirror = self.lattice.mirror
        return float(
            max(np.max(np.abs(self.f - self.f[mirror])), np.max(np.abs(self.g - self.g[mirror])))
        )

    def check_band_edges(self) -> bool:
        if self.is_vacuum:
            return True
        return check_band_edges(self.lattice, self.g_intensity, label="|g|^2")

    def baseline(self) -> "GainProfile":
        """The g = 0 profile on the same lattice with the same crystal."""
        return gain_profile(self.lattice, self.params.without_gain())

    def __repr__(self) -> str:
        p = self.params
        return (
            f"GainProfile(gamma={p.gamma}, kappa={p.kappa}, z={p.z}, "
            f"convention={p.convention.value}, M={self.lattice.n_points})"
        )


def phase_mismatch(lattice: FrequencyLattice, kappa: float) -> np.ndarray:
    """Δk(ω) = −κ(ω − ω₀)²."""
    return -kappa * lattice.detunings**2


def s_of_omega(
    gamma: float, delta_k: np.ndarray | float, convention: Convention | str
) -> np.ndarray:
    """Principal complex square root of the convention's radicand."""
    convention = Convention(convention)
    dk = np.asarray(delta_k, dtype=float)
    if convention is Convention.LITERAL:
        radicand = gamma**2 - dk**2
    else:
        radicand = gamma**2 - (dk / 2.0) ** 2
    return np.sqrt(radicand.astype(complex))


def _cosh_and_sinhc(s: np.ndarray, z: float) -> tuple[np.ndarray, np.ndarray]:
    """cosh(sz) and sinh(sz)/s with the series fallback near s = 0."""
    sz = s * z
    small = np.abs(sz) < SERIES_CROSSOVER
    safe_s = np.where(small, 1.0, s)
    cosh = np.where(small, 1.0 + sz**2 / 2.0, np.cosh(sz))
    sinhc = np.where(small, z * (1.0 + sz**2 / 6.0), np.sinh(safe_s * z) / safe_s)
    return cosh, sinhc


def _compensation_phase(lattice: FrequencyLattice, params: GainParams) -> np.ndarray:
    """Low-gain phase of f; removing it leaves f real-positive at γ → 0."""
    dk_z = phase_mismatch(lattice, params.kappa) * params.z
    if params.convention is Convention.UNITARY:
        # low-gain f = exp(−iΔk z/2)
        return -dk_z / 2.0
    # low-gain f = cos(Δk z) − ½i sin(Δk z)
    return np.angle(np.cos(dk_z) - 0.5j * np.sin(dk_z))


def gain_profile(lattice: FrequencyLattice, params: GainParams) -> GainProfile:
    """Evaluate f and g on every grid point."""
    dk = phase_mismatch(lattice, params.kappa)
    s = s_of_omega(params.gamma, dk, params.convention)
    cosh, sinhc = _cosh_and_sinhc(s, params.z)

    f = cosh - 0.5j * dk * sinhc
    g = 1j * params.gamma * sinhc
    on_center = dk == 0.0
    g = np.where(on_center, 1j * np.sinh(params.gamma * params.z), g)

    if params.compensate_dispersion:
        f = f * np.exp(-1j * _compensation_phase(lattice, params))

    profile = GainProfile(
        lattice=lattice,
        f=np.ascontiguousarray(f, dtype=complex),
        g=np.ascontiguousarray(g, dtype=complex),
        params=params,
    )
    logger.debug(f"Built {profile!r}")
    return profile


def low_gain_g(lattice: FrequencyLattice, params: GainParams) -> np.ndarray:
    """g ≈ iγz·sinc(κ(ω − ω₀)²z), valid for γz ≪ 1."""
    x = params.kappa * lattice.detunings**2 * params.z
    return 1j * params.gain * np.sinc(x / np.pi)


def high_gain_asymptote(
    lattice: FrequencyLattice, params: GainParams
) -> tuple[np.ndarray, np.ndarray]:
    """f_hg = ½e^{γz}·exp[−(κ²z/2γ)(ω − ω₀)⁴] and g_hg = i·f_hg."""
    if params.gamma <= 0:
        raise ParameterError("high-gain asymptote needs gamma > 0")
    if params.gain < 3.0:
        logger.info(f"high-gain asymptote evaluated at gamma*z={params.gain:.3g}")
    exponent = (params.kappa**2 * params.z / (2.0 * params.gamma)) * lattice.detunings**4
    f_hg = (0.5 * np.exp(params.gain) * np.exp(-exponent)).astype(complex)
    return f_hg, 1j * f_hg


def high_gain_region(lattice: FrequencyLattice, params: GainParams) -> np.ndarray:
    """Mask of points where the quartic exponent is at most one."""
    exponent = (params.kappa**2 * params.z / (2.0 * params.gamma)) * lattice.detunings**4
    return exponent <= 1.0


def high_gain_deviation(lattice: FrequencyLattice, params: GainParams) -> float:
    """max ||f| − f_hg| / |f(ω₀)| over the high-gain region."""
    profile = gain_profile(lattice, params)
    f_hg, _ = high_gain_asymptote(lattice, params)
    mask = high_gain_region(lattice, params)
    scale = abs(profile.f[lattice.center])
    return float(np.max(np.abs(np.abs(profile.f[mask]) - f_hg[mask].real)) / scale)


def synthetic_profile(
    lattice: FrequencyLattice,
    g_intensity: np.ndarray,
    params: GainParams | None = None,
) -> GainProfile:
    """
    Profile with a prescribed |g|² and Bogoliubov-consistent f.

    g is taken as i·√|g|², f as √(1 + |g|²). Used to inject test shapes
    such as a flat band.
    """
    intensity = np.asarray(g_intensity, dtype=float)
    if np.any(intensity < 0):
        raise ParameterError("g intensity must be non-negative")
    g = 1j * np.sqrt(intensity)
    f = np.sqrt(1.0 + intensity).astype(complex)
    params = params or GainParams(gamma=0.0, kappa=0.0, z=1.0)
    return GainProfile(lattice=lattice, f=f, g=g, params=params, label="synthetic")


__all__ = [
    "SERIES_CROSSOVER",
    "Convention",
    "GainParams",
    "GainProfile",
    "gain_profile",
    "high_gain_asymptote",
    "high_gain_deviation",
    "high_gain_region",
    "low_gain_g",
    "phase_mismatch",
    "s_of_omega",
    "synthetic_profile",
]
