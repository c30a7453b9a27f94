"""
Numerical engines: frequency lattice, gain, gate, the quantum closed forms
and the stochastic-field model, plus the observables built on them.
"""

from src.physics.errors import (
    ConfigurationMismatchError,
    InsufficientRealizationsError,
    InternalAssertionError,
    LatticeError,
    ModeLeakError,
    ParameterError,
    SimulationError,
    UnderResolvedError,
)
from src.physics.gain import Convention, GainParams, GainProfile, gain_profile
from src.physics.gate import GateKernel, make_gate
from src.physics.lattice import FrequencyLattice, make_lattice

__all__ = [
    "ConfigurationMismatchError",
    "Convention",
    "FrequencyLattice",
    "GainParams",
    "GainProfile",
    "GateKernel",
    "InsufficientRealizationsError",
    "InternalAssertionError",
    "LatticeError",
    "ModeLeakError",
    "ParameterError",
    "SimulationError",
    "UnderResolvedError",
    "gain_profile",
    "make_gate",
    "make_lattice",
]
