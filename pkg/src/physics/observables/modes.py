"""
Energy carried by one temporal mode of the classical zero-point field.

A mode is a normalized frequency-domain wave packet ψ(ω). Projecting the
field onto it, X = ∫đω a(ω)ψ(ω), gives the mode energy ½⟨|X|²⟩ in units
of ħω₀. The reduction ends with P_SF·½ħω₀ and then states the
limit ħω₀/2; the two disagree by a factor of two at P_SF = ½, so both
values are reported and the mismatch is flagged.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np
from scipy.integrate import quad
from scipy.special import eval_hermite, factorial

from src.physics.correlators import MonteCarloEstimate, Provenance
from src.physics.errors import ConfigurationMismatchError, ModeLeakError, ParameterError
from src.physics.gain import GainProfile
from src.physics.lattice import FrequencyLattice, integrate
from src.physics.sampling import jackknife_mean
from src.physics.sf_engine import FieldEnsemble, NoiseSpec, Stage

logger = logging.getLogger(__name__)

MODE_LEAK_TOLERANCE = 1e-6
NORM_TOLERANCE = 1e-10
# limit stated after the P_SF·½ chain, in units of ħω₀
STATED_LIMIT = 0.5


def _hermite_function(order: int, x: np.ndarray) -> np.ndarray:
    norm = 1.0 / math.sqrt(2.0**order * float(factorial(order, exact=True)) * math.sqrt(math.pi))
    return norm * eval_hermite(order, x) * np.exp(-0.5 * x**2)


@dataclass(frozen=True, eq=False)
class TemporalMode:
    """ψ sampled on the lattice, normalized so that ∫đω |ψ|² = 1."""

    lattice: FrequencyLattice
    psi: np.ndarray
    label: str = "mode"
    leak: float = 0.0

    def __post_init__(self) -> None:
        if self.psi.shape != (self.lattice.n_points,):
            raise ConfigurationMismatchError("mode function is not sampled on this lattice")
        if abs(self.norm() - 1.0) > NORM_TOLERANCE:
            raise ParameterError(f"mode '{self.label}' is not normalized (norm {self.norm():.12g})")

    def norm(self) -> float:
        return float(integrate(self.lattice, np.abs(self.psi) ** 2))

    def overlap(self, other: "TemporalMode") -> complex:
        """∫đω ψ ψ̃*."""
        if other.lattice != self.lattice:
            raise ConfigurationMismatchError("modes live on different lattices")
        return complex(integrate(self.lattice, self.psi * np.conj(other.psi)))

    def time_profile(self, times: np.ndarray) -> np.ndarray:
        """Slowly varying envelope ψ̃(t) = ∫đω ψ(ω)e^{−i(ω−ω₀)t}."""
        phases = np.exp(-1j * np.outer(np.asarray(times, dtype=float), self.lattice.detunings))
        return self.lattice.measure * (phases @ self.psi)


def hermite_gaussian_mode(
    lattice: FrequencyLattice,
    width: float,
    order: int = 0,
    center_detuning: float = 0.0,
    leak_tolerance: float = MODE_LEAK_TOLERANCE,
) -> TemporalMode:
    """
    ψ(ω) = sqrt(2π/w)·φ_n((ω − ω₀ − δ_c)/w), φ_n the normalized Hermite function.

    Modes of different order with the same width and center are
    orthogonal. The out-of-band share of the continuum norm must stay
    below leak_tolerance.
    """
    if not width > 0:
        raise ParameterError(f"mode width must be > 0 (got {width})")
    if order < 0:
        raise ParameterError(f"mode order must be >= 0 (got {order})")

    x_lo = (-lattice.half_width - center_detuning) / width
    x_hi = (lattice.half_width - center_detuning) / width
    inside, _ = quad(lambda x: _hermite_function(order, np.asarray(x)) ** 2, x_lo, x_hi, limit=200)
    leak = abs(1.0 - inside)
    if leak > leak_tolerance:
        raise ModeLeakError(
            f"Hermite-Gaussian mode n={order} leaks {leak:.3e} of its norm outside the band "
            f"(limit {leak_tolerance:.0e})"
        )

    x = (lattice.detunings - center_detuning) / width
    psi = np.sqrt(2.0 * np.pi / width) * _hermite_function(order, x).astype(complex)
    psi /= np.sqrt(integrate(lattice, np.abs(psi) ** 2))
    logger.debug(f"HG{order} mode: width={width}, out-of-band share {leak:.2e}")
    return TemporalMode(lattice=lattice, psi=psi, label=f"HG{order}", leak=leak)


@dataclass
class ModeEnergyResult:
    """Mode energy in units of ħω₀."""

    value: float
    provenance: Provenance
    p_sf: float
    stderr: float | None = None
    estimate: MonteCarloEstimate | None = None
    flags: list[str] = field(default_factory=list)

    @property
    def chain_value(self) -> float:
        return 0.5 * self.p_sf

    @property
    def stated_limit(self) -> float:
        return STATED_LIMIT

    @property
    def factor_of_two_flag(self) -> bool:
        return not math.isclose(self.chain_value, self.stated_limit)

    def to_dict(self) -> dict[str, Any]:
        return {
            "value": self.value,
            "stderr": self.stderr,
            "provenance": self.provenance.value,
            "chain_value": self.chain_value,
            "stated_limit": self.stated_limit,
            "factor_of_two_flag": self.factor_of_two_flag,
            "flags": list(self.flags),
        }


def _mode_flags(p_sf: float) -> list[str]:
    chain = 0.5 * p_sf
    if math.isclose(chain, STATED_LIMIT):
        return []
    return [
        f"reduction chain gives P_SF/2 = {chain:g} hbar*omega0 but its final limit states "
        f"{STATED_LIMIT:g} hbar*omega0"
    ]


def _projections(ensemble: FieldEnsemble, modes: list[TemporalMode]) -> np.ndarray:
    if ensemble.stage not in (Stage.VACUUM, Stage.SQUEEZED):
        raise ConfigurationMismatchError(
            f"mode projection needs an ungated ensemble (got {ensemble.stage.value})"
        )
    for mode in modes:
        if mode.lattice != ensemble.lattice:
            raise ConfigurationMismatchError("mode and ensemble live on different lattices")
    psi = np.stack([m.psi for m in modes], axis=1)
    return ensemble.lattice.measure * (ensemble.data @ psi)


def temporal_mode_energy(
    source: FieldEnsemble | NoiseSpec,
    mode: TemporalMode,
    gain: GainProfile | None = None,
) -> ModeEnergyResult:
    """
    ½⟨|∫đω a(ω)ψ(ω)|²⟩ in units of ħω₀.

    From a NoiseSpec this is the closed form ½·∫đω P_SF(ω)(|f|² + |g|²)|ψ|²,
    which is P_SF/2 for the vacuum (gain=None). From a Vacuum or Squeezed
    ensemble it is the Monte Carlo estimate with a jackknife error.
    """
    if isinstance(source, NoiseSpec):
        density = source.density(mode.lattice)
        if gain is not None:
            if gain.lattice != mode.lattice:
                raise ConfigurationMismatchError("gain profile and mode live on different lattices")
            density = density * (np.abs(gain.f) ** 2 + gain.g_intensity)
        value = 0.5 * float(integrate(mode.lattice, density * np.abs(mode.psi) ** 2))
        result = ModeEnergyResult(
            value=value,
            provenance=Provenance.SF_CLOSED_FORM,
            p_sf=source.p_sf,
            flags=_mode_flags(source.p_sf),
        )
    else:
        samples = 0.5 * np.abs(_projections(source, [mode])[:, 0]) ** 2
        mean, stderr = jackknife_mean(samples)
        estimate = MonteCarloEstimate(
            values=np.asarray(mean),
            stderr=np.asarray(stderr),
            samples=samples,
            lineage=source.lineage(f"mode:{mode.label}"),
            label="mode_energy",
        )
        result = ModeEnergyResult(
            value=float(mean),
            stderr=float(stderr),
            provenance=Provenance.SF_MONTE_CARLO,
            p_sf=source.noise_spec.p_sf,
            estimate=estimate,
            flags=_mode_flags(source.noise_spec.p_sf),
        )
    for flag in result.flags:
        logger.warning(flag)
    return result


def projection_covariance(
    ensemble: FieldEnsemble, modes: list[TemporalMode]
) -> MonteCarloEstimate:
    """⟨X_i X_j*⟩ over realizations for the projections onto each mode."""
    if not modes:
        raise ParameterError("projection_covariance needs at least one mode")
    x = _projections(ensemble, modes)
    samples = x[:, :, None] * np.conj(x[:, None, :])
    mean, stderr = jackknife_mean(samples)
    return MonteCarloEstimate(
        values=mean,
        stderr=stderr,
        samples=samples,
        lineage=ensemble.lineage("modes:" + ",".join(m.label for m in modes)),
        label="projection_covariance",
    )


__all__ = [
    "MODE_LEAK_TOLERANCE",
    "ModeEnergyResult",
    "TemporalMode",
    "hermite_gaussian_mode",
    "projection_covariance",
    "temporal_mode_energy",
]
