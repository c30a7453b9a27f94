"""
Experiment registry.

Every runnable experiment and validation suite is registered here and
executed through the same interface.
"""

from src.experiments.base import (
    BaseExperiment,
    Check,
    ExperimentInfo,
    ExperimentResult,
    RunContext,
    Table,
)
from src.experiments.corr2 import Corr2Experiment
from src.experiments.corr4_identity import Corr4IdentityExperiment
from src.experiments.engine_checks import GainChecks, GateChecks, SamplerCalibration
from src.experiments.mode_energy import ModeEnergyExperiment
from src.experiments.registry import ExperimentRegistry, registry
from src.experiments.sfg_spectrum import SfgSpectrumExperiment
from src.experiments.spectrum import SpectrumExperiment
from src.experiments.tpa_scaling import TpaScalingExperiment
from src.experiments.validate_all import ValidateAllExperiment


def register_default_experiments() -> None:
    """
    Register all default experiments in the global registry.

    This includes:
    - Building-block suites: GainChecks, GateChecks, SamplerCalibration
    - Cross-engine experiments: Spectrum, Corr2, Corr4Identity, TpaScaling,
      SfgSpectrum, ModeEnergy
    - The composite ValidateAll
    """
    registry.register(GainChecks())
    registry.register(GateChecks())
    registry.register(SamplerCalibration())

    registry.register(SpectrumExperiment())
    registry.register(Corr2Experiment())
    registry.register(Corr4IdentityExperiment())
    registry.register(TpaScalingExperiment())
    registry.register(SfgSpectrumExperiment())
    registry.register(ModeEnergyExperiment())

    registry.register(ValidateAllExperiment(registry))


# Auto-register on import
register_default_experiments()


__all__ = [
    # Base classes
    "BaseExperiment",
    "Check",
    "ExperimentInfo",
    "ExperimentResult",
    "RunContext",
    "Table",
    # Registry
    "ExperimentRegistry",
    "registry",
    # Suites
    "GainChecks",
    "GateChecks",
    "SamplerCalibration",
    # Experiments
    "Corr2Experiment",
    "Corr4IdentityExperiment",
    "ModeEnergyExperiment",
    "SfgSpectrumExperiment",
    "SpectrumExperiment",
    "TpaScalingExperiment",
    "ValidateAllExperiment",
    # Registration
    "register_default_experiments",
]
