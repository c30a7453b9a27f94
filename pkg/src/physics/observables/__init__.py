"""Physical predictions built on the correlators: TPA, SFG, temporal modes, flux scaling."""

from src.physics.observables.modes import (
    ModeEnergyResult,
    TemporalMode,
    hermite_gaussian_mode,
    projection_covariance,
    temporal_mode_energy,
)
from src.physics.observables.scaling import FluxScalingTable, flux_scaling_sweep
from src.physics.observables.sfg import (
    SfgParams,
    SfgSpectrum,
    sfg_phase_matching,
    sfg_spectrum,
    sfg_spectrum_qt,
    sfg_spectrum_sf,
)
from src.physics.observables.tpa import (
    TpaKernel,
    TpaResult,
    linewidth_sweep,
    tpa_probability,
)

__all__ = [
    "FluxScalingTable",
    "ModeEnergyResult",
    "SfgParams",
    "SfgSpectrum",
    "TemporalMode",
    "TpaKernel",
    "TpaResult",
    "flux_scaling_sweep",
    "hermite_gaussian_mode",
    "linewidth_sweep",
    "projection_covariance",
    "sfg_phase_matching",
    "sfg_spectrum",
    "sfg_spectrum_qt",
    "sfg_spectrum_sf",
    "temporal_mode_energy",
    "tpa_probability",
]
