"""
Sum-frequency generation driven by squeezed light.

To lowest order the up-converted amplitude at ω₃ is

    a₃(ω₃) = ξ_c ∫đω₁ Φ(ω₁, ω₃ − ω₁)·c(ω₁)·c(ω₃ − ω₁),
    Φ(ω₁, ω₂) = sinc[(k″L/2)(ω₁ − ω₀)(ω₂ − ω₀)],

so the output spectrum is a weighted double integral of the incident
four-frequency correlator along the quads (ω, ω₃−ω, ω̃, ω₃−ω̃). On the
lattice ω₃ is a sum index s = k + l and Φ becomes the symmetric matrix
Φ_kl = sinc(α·δ_k·δ_l) with α = k″L/2.
"""

import logging
from dataclasses import dataclass
from typing import Any, Literal

import numpy as np
from scipy.linalg import eigh
from scipy.signal import fftconvolve

from src.physics.correlators import (
    CompositeCorr4Model,
    Corr4Model,
    MonteCarloEstimate,
    ProbeQuads,
    Provenance,
)
from src.physics.errors import (
    ConfigurationMismatchError,
    InternalAssertionError,
    ParameterError,
    UnderResolvedError,
)
from src.physics.gain import GainProfile
from src.physics.gate import GateKernel
from src.physics.lattice import FrequencyLattice
from src.physics.observables.tpa import sum_index_bounds
from src.physics.qt_engine import corr4_qt_model
from src.physics.sampling import jackknife_mean
from src.physics.sf_engine import FieldEnsemble, PairingCorr4, Stage

logger = logging.getLogger(__name__)

IMAGINARY_TOLERANCE = 1e-8
# phase advance of Φ per grid step must stay below this
MAX_PHASE_STEP = np.pi / 4
LOWRANK_TOLERANCE = 1e-12
ROW_BLOCK = 16


@dataclass(frozen=True)
class SfgParams:
    """k2prime: GVD k″ of the SFG crystal; length: crystal length L; xi_c: coupling."""

    k2prime: float
    length: float
    xi_c: float = 1.0

    def __post_init__(self) -> None:
        if not self.length > 0:
            raise ParameterError(f"SFG crystal length must be > 0 (got {self.length})")

    @property
    def alpha(self) -> float:
        return self.k2prime * self.length / 2.0

    def check_sampling(self, lattice: FrequencyLattice) -> None:
        step = lattice.d_omega * abs(self.alpha) * lattice.half_width
        if step > MAX_PHASE_STEP:
            raise UnderResolvedError(
                f"phase matching advances {step:.3g} rad per grid step at the band edge; "
                f"limit is pi/4 (refine the lattice or shorten the crystal)"
            )


def sfg_phase_matching(
    lattice: FrequencyLattice, params: SfgParams, omega1: float, omega3: float
) -> float:
    """Φ(ω₁, ω₃ − ω₁) with sinc(x) = sin(x)/x."""
    x = params.alpha * (omega1 - lattice.omega0) * (omega3 - omega1 - lattice.omega0)
    return float(np.sinc(x / np.pi))


def phase_matching_matrix(lattice: FrequencyLattice, params: SfgParams) -> np.ndarray:
    """Φ_kl = sinc(α·δ_k·δ_l)."""
    delta = lattice.detunings
    return np.sinc(params.alpha * np.outer(delta, delta) / np.pi)


def omega3_indices(lattice: FrequencyLattice, half_window: int | None = None) -> np.ndarray:
    """Sum indices centered on s = M − 1 (ω₃ = 2ω₀)."""
    center = lattice.n_points - 1
    reach = center if half_window is None else min(int(half_window), center)
    return np.arange(center - reach, center + reach + 1)


def omega3_values(lattice: FrequencyLattice, s: np.ndarray) -> np.ndarray:
    return 2.0 * lattice.omega0 + lattice.sum_detunings()[s]


@dataclass
class SfgSpectrum:
    s: np.ndarray
    omega3: np.ndarray
    values: np.ndarray
    provenance: Provenance
    coherent: np.ndarray | None = None
    incoherent: np.ndarray | None = None
    imaginary_residual: float = 0.0

    def to_dict(self) -> dict[str, Any]:
        return {
            "provenance": self.provenance.value,
            "omega3": self.omega3.tolist(),
            "values": self.values.tolist(),
        }


def _structured_terms(
    model: Corr4Model, phi: np.ndarray, s_indices: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    m = model.lattice.n_points
    lo, hi = sum_index_bounds(m)
    h = model.coherent_amplitude
    table_sq = model.kernel.table**2
    zero = model.kernel.zero_offset
    coherent = np.empty(len(s_indices))
    incoherent = np.empty(len(s_indices))
    for i, s in enumerate(s_indices):
        k = np.arange(lo[s], hi[s] + 1)
        weight = phi[k, s - k]
        amp = np.sum(weight * h[k])
        coherent[i] = model.kernel.sum_index(s) ** 2 * np.real(np.conj(amp) * amp)
        pair = np.real(model.pair_weight(k, s - k))
        spread = table_sq[k[:, None] + k[None, :] - s + zero] + model.exchange * table_sq[
            k[:, None] - k[None, :] + zero
        ]
        incoherent[i] = (weight * pair) @ spread @ weight
    return coherent, incoherent


def sfg_spectrum(
    source: Corr4Model | CompositeCorr4Model | PairingCorr4,
    params: SfgParams,
    s_indices: np.ndarray | None = None,
    method: Literal["structured", "direct"] = "structured",
) -> SfgSpectrum:
    """ξ_c²·measure²·Σ_{k,l} Φ_{k,s−k}Φ_{l,s−l}·C⁽⁴⁾(k, s−k, l, s−l) per sum index s."""
    lattice = source.lattice
    params.check_sampling(lattice)
    s_idx = omega3_indices(lattice) if s_indices is None else np.asarray(s_indices)
    phi = phase_matching_matrix(lattice, params)
    scale = params.xi_c**2 * lattice.measure**2
    provenance = getattr(source, "provenance", Provenance.SF_CLOSED_FORM)

    if method == "structured" and not isinstance(source, PairingCorr4):
        coherent = np.zeros(len(s_idx))
        incoherent = np.zeros(len(s_idx))
        for coef, part in source.components():
            first, second = _structured_terms(part, phi, s_idx)
            coherent += coef * first
            incoherent += coef * second
        return SfgSpectrum(
            s=s_idx,
            omega3=omega3_values(lattice, s_idx),
            values=scale * (coherent + incoherent),
            provenance=provenance,
            coherent=scale * coherent,
            incoherent=scale * incoherent,
        )

    lo, hi = sum_index_bounds(lattice.n_points)
    values = np.empty(len(s_idx))
    worst = 0.0
    for i, s in enumerate(s_idx):
        k = np.arange(lo[s], hi[s] + 1)
        kk, ll = np.meshgrid(k, k, indexing="ij")
        kk, ll = kk.ravel(), ll.ravel()
        quads = ProbeQuads(kk, s - kk, ll, s - ll, family="sfg")
        c4 = source.evaluate(quads).values
        total = scale * np.sum(phi[kk, s - kk] * phi[ll, s - ll] * c4)
        residual = abs(total.imag) / max(abs(total), 1e-300)
        worst = max(worst, residual)
        values[i] = total.real
    if worst > IMAGINARY_TOLERANCE:
        raise InternalAssertionError(f"SFG imaginary residual {worst:.3e}")
    return SfgSpectrum(
        s=s_idx,
        omega3=omega3_values(lattice, s_idx),
        values=values,
        provenance=provenance,
        imaginary_residual=worst,
    )


def sfg_spectrum_qt(
    gain: GainProfile,
    kernel: GateKernel,
    params: SfgParams,
    s_indices: np.ndarray | None = None,
    xi: int = 1,
    method: Literal["structured", "direct"] = "structured",
) -> SfgSpectrum:
    """SFG spectrum driven by the quantum correlator."""
    return sfg_spectrum(corr4_qt_model(gain, kernel, xi), params, s_indices, method)


# ---------------------------------------------------------------------------
# Monte Carlo
# ---------------------------------------------------------------------------


def _amplitudes_direct(data: np.ndarray, phi: np.ndarray) -> np.ndarray:
    r, m = data.shape
    out = np.zeros((r, 2 * m - 1), dtype=complex)
    for k in range(m):
        out[:, k : k + m] += (phi[k] * data[:, k : k + 1]) * data
    return out


def _amplitudes_lowrank(data: np.ndarray, phi: np.ndarray) -> np.ndarray:
    eigenvalues, vectors = eigh(phi)
    keep = np.abs(eigenvalues) > LOWRANK_TOLERANCE * np.max(np.abs(eigenvalues))
    eigenvalues, vectors = eigenvalues[keep], vectors[:, keep]
    logger.debug(f"SFG low-rank expansion keeps {keep.sum()} of {len(keep)} modes")
    r, m = data.shape
    out = np.empty((r, 2 * m - 1), dtype=complex)
    for start in range(0, r, ROW_BLOCK):
        rows = data[start : start + ROW_BLOCK]
        weighted = rows[:, :, None] * vectors[None, :, :]
        conv = fftconvolve(weighted, weighted, mode="full", axes=1)
        out[start : start + ROW_BLOCK] = conv @ eigenvalues
    return out


def sfg_amplitudes(
    ensemble: FieldEnsemble,
    params: SfgParams,
    s_indices: np.ndarray | None = None,
    method: Literal["direct", "lowrank"] = "lowrank",
) -> np.ndarray:
    """a₃ per realization and sum index, shape (R, len(s))."""
    if not ensemble.stage.is_gated:
        raise ConfigurationMismatchError("SFG from an ensemble needs gated fields")
    lattice = ensemble.lattice
    params.check_sampling(lattice)
    s_idx = omega3_indices(lattice) if s_indices is None else np.asarray(s_indices)
    phi = phase_matching_matrix(lattice, params)
    if method == "direct":
        full = _amplitudes_direct(ensemble.data, phi)
    elif method == "lowrank":
        full = _amplitudes_lowrank(ensemble.data, phi)
    else:
        raise ParameterError(f"unknown SFG method: {method}")
    return params.xi_c * lattice.measure * full[:, s_idx]


def sfg_spectrum_sf(
    ensemble: FieldEnsemble,
    params: SfgParams,
    s_indices: np.ndarray | None = None,
    method: Literal["direct", "lowrank"] = "lowrank",
) -> MonteCarloEstimate:
    """⟨|a₃(ω₃)|²⟩ with jackknife errors; renormalize against the g = 0 ensemble."""
    if ensemble.stage not in (Stage.GATED, Stage.FILTERED):
        raise ConfigurationMismatchError("SFG from an ensemble needs gated fields")
    s_idx = omega3_indices(ensemble.lattice) if s_indices is None else np.asarray(s_indices)
    amplitudes = sfg_amplitudes(ensemble, params, s_idx, method)
    samples = np.abs(amplitudes) ** 2
    mean, stderr = jackknife_mean(samples)
    return MonteCarloEstimate(
        values=mean,
        stderr=stderr,
        samples=samples,
        lineage=ensemble.lineage(f"sfg:{s_idx[0]}-{s_idx[-1]}"),
        label="sfg",
    )


def symmetry_defect(spectrum: np.ndarray, s_indices: np.ndarray, n_points: int) -> float:
    """max |S(2ω₀+δ) − S(2ω₀−δ)| over a window symmetric about s = M − 1."""
    center = n_points - 1
    lookup = {int(s): i for i, s in enumerate(s_indices)}
    worst = 0.0
    for s, i in lookup.items():
        j = lookup.get(2 * center - s)
        if j is not None:
            worst = max(worst, float(abs(spectrum[i] - spectrum[j])))
    return worst


__all__ = [
    "SfgParams",
    "SfgSpectrum",
    "omega3_indices",
    "omega3_values",
    "phase_matching_matrix",
    "sfg_amplitudes",
    "sfg_phase_matching",
    "sfg_spectrum",
    "sfg_spectrum_qt",
    "sfg_spectrum_sf",
    "symmetry_defect",
]
