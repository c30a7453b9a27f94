"""
Quantum-theory closed forms.

Everything here is a direct evaluation of the Bogoliubov-transformed
vacuum expectation values; no state vector is ever built.
"""

import logging

import numpy as np

from src.physics.correlators import (
    Corr2Result,
    Corr4Model,
    Corr4Tensor,
    ProbePairs,
    ProbeQuads,
    ProductWeight,
    Provenance,
)
from src.physics.errors import ConfigurationMismatchError, ParameterError
from src.physics.gain import GainProfile
from src.physics.gate import GateKernel
from src.physics.lattice import integrate

logger = logging.getLogger(__name__)


def _require_same_lattice(gain: GainProfile, kernel: GateKernel) -> None:
    if gain.lattice != kernel.lattice:
        raise ConfigurationMismatchError("gain profile and gate kernel live on different lattices")


def spectrum_qt(gain: GainProfile) -> np.ndarray:
    """Spectral photon rate |g(ω)|²."""
    return gain.g_intensity


def corr2_qt(gain: GainProfile, kernel: GateKernel, probes: ProbePairs) -> Corr2Result:
    """⟨c†(ω)c(ω̃)⟩ = g*(ω)·g(ω̃)·D(ω − ω̃)."""
    _require_same_lattice(gain, kernel)
    probes.validate(gain.lattice)
    g = gain.g
    values = np.conj(g[probes.j]) * g[probes.k] * kernel.between(probes.j, probes.k)
    return Corr2Result(
        lattice=gain.lattice,
        pairs=probes,
        values=values,
        provenance=Provenance.QT_CLOSED_FORM,
    )


def photon_number_qt(gain: GainProfile, kernel: GateKernel) -> float:
    """Mean photons in the gate, N = T·∫đω |g|²."""
    _require_same_lattice(gain, kernel)
    gain.check_band_edges()
    return float(kernel.duration * integrate(gain.lattice, gain.g_intensity))


def corr4_qt_model(gain: GainProfile, kernel: GateKernel, xi: int = 1) -> Corr4Model:
    """Structured coherent + incoherent correlator; ξ = 1 for indistinguishable photons."""
    _require_same_lattice(gain, kernel)
    if xi not in (0, 1):
        raise ParameterError(f"xi must be 0 or 1 (got {xi})")
    return Corr4Model(
        kernel=kernel,
        coherent_amplitude=gain.f * gain.g,
        pair_weight=ProductWeight(gain.g_intensity),
        exchange=float(xi),
        provenance=Provenance.QT_CLOSED_FORM,
        term_names=("coherent", "incoherent"),
    )


def corr4_qt(
    gain: GainProfile, kernel: GateKernel, probe_quads: ProbeQuads, xi: int = 1
) -> Corr4Tensor:
    """
    ⟨c†_a c†_b c_c c_d⟩ as coherent plus incoherent terms.

    coherent:   g*_a f*_a f_c g_c · D(2ω₀−ω_a−ω_b) · D(2ω₀−ω_d−ω_c)
    incoherent: |g_a|²|g_b|² · [D(ω_b−ω_c)D(ω_a−ω_d) + ξ·D(ω_a−ω_c)D(ω_b−ω_d)]
    """
    tensor = corr4_qt_model(gain, kernel, xi).evaluate(probe_quads)
    tensor.xi = xi
    return tensor


def coherent_to_incoherent_ratio(gain_z: float) -> float:
    """C_coh/C_incoh at the degenerate quad with Δk = 0: cosh²/(2 sinh²)."""
    if gain_z <= 0:
        return float("inf")
    return float(np.cosh(gain_z) ** 2 / (2.0 * np.sinh(gain_z) ** 2))


__all__ = [
    "coherent_to_incoherent_ratio",
    "corr2_qt",
    "corr4_qt",
    "corr4_qt_model",
    "photon_number_qt",
    "spectrum_qt",
]
