"""Low-flux scaling of the two-photon rates with the incident photon number."""

import logging
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from src.physics.errors import ParameterError
from src.physics.gain import Convention, GainParams, gain_profile
from src.physics.gate import GateKernel
from src.physics.lattice import FrequencyLattice
from src.physics.observables.sfg import SfgParams, sfg_spectrum
from src.physics.observables.tpa import TpaKernel, tpa_probability
from src.physics.qt_engine import corr4_qt_model, photon_number_qt

logger = logging.getLogger(__name__)

MIN_DECADES = 2.0
MAX_LOW_GAIN_PHOTONS = 1e-2
COHERENT_SLOPE = 1.0
INCOHERENT_SLOPE = 2.0
SLOPE_TOLERANCE = 0.05


def _slope(x: np.ndarray, y: np.ndarray) -> float:
    """Least-squares slope of log y against log x."""
    return float(np.polyfit(np.log(x), np.log(y), 1)[0])


@dataclass
class FluxScalingTable:
    gamma: np.ndarray
    photon_number: np.ndarray
    p_coherent: np.ndarray
    p_incoherent: np.ndarray
    sfg_coherent: np.ndarray | None = None
    sfg_incoherent: np.ndarray | None = None
    slopes: dict[str, float] = field(default_factory=dict)

    @property
    def ratio(self) -> np.ndarray:
        return self.p_coherent / self.p_incoherent

    @property
    def ratio_monotone(self) -> bool:
        """P_coh/P_incoh falls as the flux rises."""
        order = np.argsort(self.photon_number)
        return bool(np.all(np.diff(self.ratio[order]) < 0))

    def slope_passed(self, name: str) -> bool:
        target = INCOHERENT_SLOPE if name.endswith("incoherent") else COHERENT_SLOPE
        return abs(self.slopes[name] - target) <= SLOPE_TOLERANCE

    @property
    def passed(self) -> bool:
        return self.ratio_monotone and all(self.slope_passed(name) for name in self.slopes)

    def rows(self) -> list[dict[str, float]]:
        out = []
        for i in range(len(self.gamma)):
            row = {
                "gamma": float(self.gamma[i]),
                "N_qt": float(self.photon_number[i]),
                "P_coh": float(self.p_coherent[i]),
                "P_incoh": float(self.p_incoherent[i]),
            }
            if self.sfg_coherent is not None and self.sfg_incoherent is not None:
                row["S_coh"] = float(self.sfg_coherent[i])
                row["S_incoh"] = float(self.sfg_incoherent[i])
            out.append(row)
        return out

    def to_dict(self) -> dict[str, Any]:
        return {
            "slopes": dict(self.slopes),
            "ratio_monotone": self.ratio_monotone,
            "passed": self.passed,
            "rows": self.rows(),
        }


def check_low_gain_sweep(gamma_values: np.ndarray, z: float) -> None:
    gammas = np.asarray(gamma_values, dtype=float)
    if len(gammas) < 3:
        raise ParameterError("a flux sweep needs at least three gain values")
    if np.any(gammas <= 0):
        raise ParameterError("flux sweep gain values must be > 0")
    decades = np.log10(gammas.max() / gammas.min())
    if decades < MIN_DECADES:
        raise ParameterError(
            f"flux sweep spans {decades:.2f} decades of gamma; needs >= {MIN_DECADES:g}"
        )
    occupation = np.sinh(gammas.max() * z) ** 2
    if occupation > MAX_LOW_GAIN_PHOTONS:
        raise ParameterError(
            f"sinh^2(gamma*z) = {occupation:.3g} at the top of the sweep; low-gain regime "
            f"requires <= {MAX_LOW_GAIN_PHOTONS:g}"
        )


def flux_scaling_sweep(
    gamma_values: np.ndarray | list[float],
    lattice: FrequencyLattice,
    kappa: float,
    z: float,
    duration: float,
    kernel_tpa: TpaKernel,
    convention: Convention = Convention.UNITARY,
    sfg_params: SfgParams | None = None,
) -> FluxScalingTable:
    """
    Photon number and per-term TPA probability for each γ, with log-log slopes.

    With sfg_params the SFG spectrum at ω₃ = 2ω₀ is swept as well.
    """
    gammas = np.sort(np.asarray(gamma_values, dtype=float))
    check_low_gain_sweep(gammas, z)
    kernel = GateKernel(duration=duration, lattice=lattice)

    photons = np.empty_like(gammas)
    p_coh = np.empty_like(gammas)
    p_incoh = np.empty_like(gammas)
    s_coh = np.empty_like(gammas) if sfg_params is not None else None
    s_incoh = np.empty_like(gammas) if sfg_params is not None else None
    peak = np.array([lattice.n_points - 1])

    for i, gamma in enumerate(gammas):
        params = GainParams(gamma=gamma, kappa=kappa, z=z, convention=convention)
        gain = gain_profile(lattice, params)
        model = corr4_qt_model(gain, kernel)
        photons[i] = photon_number_qt(gain, kernel)
        tpa = tpa_probability(model, kernel_tpa)
        p_coh[i] = tpa.coherent
        p_incoh[i] = tpa.incoherent
        if sfg_params is not None and s_coh is not None and s_incoh is not None:
            spectrum = sfg_spectrum(model, sfg_params, peak)
            s_coh[i] = spectrum.coherent[0]
            s_incoh[i] = spectrum.incoherent[0]

    slopes = {
        "tpa_coherent": _slope(photons, p_coh),
        "tpa_incoherent": _slope(photons, p_incoh),
    }
    if s_coh is not None and s_incoh is not None:
        slopes["sfg_coherent"] = _slope(photons, s_coh)
        slopes["sfg_incoherent"] = _slope(photons, s_incoh)
    logger.info(
        "Flux sweep slopes: " + ", ".join(f"{k}={v:.4f}" for k, v in slopes.items())
    )
    return FluxScalingTable(
        gamma=gammas,
        photon_number=photons,
        p_coherent=p_coh,
        p_incoherent=p_incoh,
        sfg_coherent=s_coh,
        sfg_incoherent=s_incoh,
        slopes=slopes,
    )


__all__ = ["FluxScalingTable", "check_low_gain_sweep", "flux_scaling_sweep"]
