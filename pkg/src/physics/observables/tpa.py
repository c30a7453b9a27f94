"""
Two-photon absorption probability.

P = ∫đω′∫đω∫đω̃ K(ω′, ω, ω̃)·C⁽⁴⁾(ω′, ω+ω̃−ω′, ω, ω̃)

On the lattice the four indices are (p, s−p, k, s−k) with s = k + l the
sum index, and the kernel depends on s only. For structured correlators
both terms collapse to O(M²) sums:

    coherent   = measure³ Σ_s K_s·D_s²·|Σ_{k∈S_s} h_k|²
    incoherent = (1+ξ)·measure³ Σ_s K_s Σ_{p∈S_s} w(p, s−p)·Σ_{l∈S_s} D²(l − p)

where S_s is the set of k with both k and s − k on the lattice.
"""

import logging
from collections.abc import Callable
from dataclasses import dataclass, field
from typing import Any, Literal

import numpy as np
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
from src.physics.lattice import FrequencyLattice
from src.physics.sampling import jackknife_mean
from src.physics.sf_engine import FieldEnsemble, PairingCorr4, Stage

logger = logging.getLogger(__name__)

IMAGINARY_TOLERANCE = 1e-8
MIN_POINTS_PER_LINEWIDTH = 3.0
# K at the edges of the two-photon band, relative to its peak
KERNEL_EDGE_TOLERANCE = 1e-2

Lineshape = Literal["lorentzian_area", "lorentzian_peak"]


@dataclass(frozen=True)
class TpaKernel:
    """
    Final-state response as a function of the absorbed sum frequency.

    K = amplitude·L(ω + ω̃ − ω_f), with L an area-normalized Lorentzian
    (σ/π)/(x² + σ²) or a peak-normalized one σ²/(x² + σ²). A custom
    `profile(x)` replaces the Lorentzian. omega_f=None means 2ω₀.
    """

    sigma_f: float
    omega_f: float | None = None
    amplitude: float = 1.0
    lineshape: Lineshape = "lorentzian_area"
    profile: Callable[[np.ndarray], np.ndarray] | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        if not self.sigma_f > 0:
            raise ParameterError(f"sigma_f must be > 0 (got {self.sigma_f})")
        if self.lineshape not in ("lorentzian_area", "lorentzian_peak"):
            raise ParameterError(f"unknown TPA lineshape: {self.lineshape}")

    def resolved_omega_f(self, lattice: FrequencyLattice) -> float:
        return 2.0 * lattice.omega0 if self.omega_f is None else self.omega_f

    def check_resolution(self, lattice: FrequencyLattice) -> None:
        ratio = self.sigma_f / lattice.d_omega
        if ratio < MIN_POINTS_PER_LINEWIDTH:
            raise UnderResolvedError(
                f"sigma_f = {ratio:.3g} d_omega; the kernel needs sigma_f >= "
                f"{MIN_POINTS_PER_LINEWIDTH:g} d_omega"
            )
        if ratio < 2 * MIN_POINTS_PER_LINEWIDTH:
            logger.warning(f"TPA kernel barely resolved: sigma_f = {ratio:.3g} d_omega")

    def sum_values(self, lattice: FrequencyLattice) -> np.ndarray:
        """K_s for the 2M − 1 sum indices."""
        self.check_resolution(lattice)
        x = 2.0 * lattice.omega0 + lattice.sum_detunings() - self.resolved_omega_f(lattice)
        if self.profile is not None:
            shape = np.asarray(self.profile(x), dtype=float)
        elif self.lineshape == "lorentzian_area":
            shape = (self.sigma_f / np.pi) / (x**2 + self.sigma_f**2)
        else:
            shape = self.sigma_f**2 / (x**2 + self.sigma_f**2)
        if np.any(shape < 0):
            raise ParameterError("TPA kernel must be non-negative")
        return self.amplitude * shape

    def edge_leak(self, lattice: FrequencyLattice) -> float:
        """Larger of K at the two sum-band edges over the peak of K."""
        values = self.sum_values(lattice)
        peak = float(np.max(values))
        if peak == 0.0:
            return 0.0
        return float(max(values[0], values[-1]) / peak)

    def check_band_edges(self, lattice: FrequencyLattice) -> bool:
        """Warn when the final-state line is cut off by the band. Returns True when clean."""
        leak = self.edge_leak(lattice)
        if leak > KERNEL_EDGE_TOLERANCE:
            logger.warning(
                f"TPA kernel: band-edge leak {leak:.3e} exceeds {KERNEL_EDGE_TOLERANCE:.0e}; "
                "the final-state line is truncated by the lattice"
            )
            return False
        return True


@dataclass
class TpaResult:
    """TPA probability with its coherent/incoherent split (closed forms only)."""

    total: float
    provenance: Provenance
    coherent: float | None = None
    incoherent: float | None = None
    stderr: float | None = None
    imaginary_residual: float = 0.0
    estimate: MonteCarloEstimate | None = None
    edges_clean: bool = True

    def to_dict(self) -> dict[str, Any]:
        return {
            "total": self.total,
            "coherent": self.coherent,
            "incoherent": self.incoherent,
            "stderr": self.stderr,
            "provenance": self.provenance.value,
            "edges_clean": self.edges_clean,
        }


def sum_index_bounds(n_points: int) -> tuple[np.ndarray, np.ndarray]:
    """lo_s, hi_s such that S_s = {lo_s, …, hi_s}."""
    s = np.arange(2 * n_points - 1)
    return np.maximum(0, s - (n_points - 1)), np.minimum(n_points - 1, s)


def _coherent_part(model: Corr4Model, k_sum: np.ndarray) -> complex:
    lattice = model.lattice
    lo, hi = sum_index_bounds(lattice.n_points)
    h = model.coherent_amplitude
    inner = np.array([h[lo_s : hi_s + 1].sum() for lo_s, hi_s in zip(lo, hi, strict=True)])
    d_s = model.kernel.sum_index(np.arange(2 * lattice.n_points - 1))
    return complex(lattice.measure**3 * np.sum(k_sum * d_s**2 * np.conj(inner) * inner))


def _incoherent_part(model: Corr4Model, k_sum: np.ndarray) -> float:
    lattice = model.lattice
    m = lattice.n_points
    lo, hi = sum_index_bounds(m)
    s = np.arange(2 * m - 1)[:, None]
    p = np.arange(m)[None, :]
    valid = (p >= lo[:, None]) & (p <= hi[:, None])
    partner = np.clip(s - p, 0, m - 1)
    weights = np.where(valid, model.pair_weight(np.broadcast_to(p, valid.shape), partner), 0.0)

    # prefix sums of D² over offsets -(M-1)..(M-1)
    cumulative = np.concatenate([[0.0], np.cumsum(model.kernel.table**2)])
    zero = model.kernel.zero_offset
    upper = np.clip(hi[:, None] - p + zero + 1, 0, len(cumulative) - 1)
    lower = np.clip(lo[:, None] - p + zero, 0, len(cumulative) - 1)
    window = np.where(valid, cumulative[upper] - cumulative[lower], 0.0)

    total = np.sum(k_sum[:, None] * np.real(weights) * window)
    return float((1.0 + model.exchange) * lattice.measure**3 * total)


def _structured(model: Corr4Model | CompositeCorr4Model, kernel_tpa: TpaKernel) -> TpaResult:
    k_sum = kernel_tpa.sum_values(model.lattice)
    coherent = 0.0 + 0.0j
    incoherent = 0.0
    for coef, part in model.components():
        coherent += coef * _coherent_part(part, k_sum)
        incoherent += coef * _incoherent_part(part, k_sum)
    total = coherent.real + incoherent
    residual = abs(coherent.imag) / max(abs(total), 1e-300)
    if residual > IMAGINARY_TOLERANCE:
        raise InternalAssertionError(f"TPA imaginary residual {residual:.3e}")
    return TpaResult(
        total=float(total),
        coherent=float(coherent.real),
        incoherent=float(incoherent),
        provenance=model.provenance,
        imaginary_residual=residual,
    )


def tpa_triples(lattice: FrequencyLattice) -> ProbeQuads:
    """Every in-band (p, k+l−p, k, l) index quad; O(M³), for small lattices."""
    m = lattice.n_points
    p, k, l = np.meshgrid(np.arange(m), np.arange(m), np.arange(m), indexing="ij")
    b = k + l - p
    keep = (b >= 0) & (b < m)
    return ProbeQuads(p[keep], b[keep], k[keep], l[keep], family="tpa")


def _direct(
    source: Corr4Model | CompositeCorr4Model | PairingCorr4, kernel_tpa: TpaKernel
) -> TpaResult:
    lattice = source.lattice
    k_sum = kernel_tpa.sum_values(lattice)
    quads = tpa_triples(lattice)
    tensor = source.evaluate(quads)
    weights = k_sum[quads.c + quads.d]
    total = complex(lattice.measure**3 * np.sum(weights * tensor.values))
    residual = abs(total.imag) / max(abs(total), 1e-300)
    if residual > IMAGINARY_TOLERANCE:
        raise InternalAssertionError(f"TPA imaginary residual {residual:.3e}")
    parts = list(tensor.terms.values())
    coherent = incoherent = None
    if len(parts) == 2:
        coherent = float(np.real(lattice.measure**3 * np.sum(weights * parts[0])))
        incoherent = float(np.real(lattice.measure**3 * np.sum(weights * parts[1])))
    provenance = getattr(source, "provenance", Provenance.SF_CLOSED_FORM)
    return TpaResult(
        total=total.real,
        coherent=coherent,
        incoherent=incoherent,
        provenance=provenance,
        imaginary_residual=residual,
    )


def tpa_samples(ensemble: FieldEnsemble, kernel_tpa: TpaKernel) -> np.ndarray:
    """Per-realization measure³ Σ_s K_s·|Σ_{k∈S_s} c_k c_{s−k}|²."""
    if ensemble.stage is not Stage.GATED and ensemble.stage is not Stage.FILTERED:
        raise ConfigurationMismatchError("TPA from an ensemble needs gated fields")
    lattice = ensemble.lattice
    k_sum = kernel_tpa.sum_values(lattice)
    pair_sums = fftconvolve(ensemble.data, ensemble.data, mode="full", axes=1)
    return lattice.measure**3 * np.sum(k_sum[None, :] * np.abs(pair_sums) ** 2, axis=1)


def tpa_probability(
    source: Corr4Model | CompositeCorr4Model | PairingCorr4 | FieldEnsemble,
    kernel_tpa: TpaKernel,
    lattice: FrequencyLattice | None = None,
    method: Literal["structured", "direct"] = "structured",
) -> TpaResult:
    """
    TPA probability from a closed-form correlator or a gated ensemble.

    Closed forms are real and non-negative up to the asserted imaginary
    residual. Ensembles return a Monte Carlo estimate; renormalize it
    against the g = 0 estimate of the same noise.
    """
    if lattice is not None and lattice != source.lattice:
        raise ConfigurationMismatchError("TPA lattice does not match the correlator source")
    edges_clean = kernel_tpa.check_band_edges(source.lattice)

    if isinstance(source, FieldEnsemble):
        samples = tpa_samples(source, kernel_tpa)
        mean, stderr = jackknife_mean(samples)
        estimate = MonteCarloEstimate(
            values=np.asarray(mean),
            stderr=np.asarray(stderr),
            samples=samples,
            lineage=source.lineage(),
            label="tpa",
        )
        return TpaResult(
            total=float(mean),
            stderr=float(stderr),
            provenance=Provenance.SF_MONTE_CARLO,
            estimate=estimate,
            edges_clean=edges_clean,
        )

    if method == "direct" or isinstance(source, PairingCorr4):
        result = _direct(source, kernel_tpa)
    else:
        result = _structured(source, kernel_tpa)
    result.edges_clean = edges_clean
    return result


def linewidth_sweep(
    source: Corr4Model | CompositeCorr4Model,
    sigma_values: np.ndarray | list[float],
    kernel_tpa: TpaKernel,
) -> dict[str, np.ndarray]:
    """TPA terms as the final-state linewidth varies, other kernel settings fixed."""
    sigmas = np.asarray(sigma_values, dtype=float)
    coherent = np.empty_like(sigmas)
    incoherent = np.empty_like(sigmas)
    for i, sigma in enumerate(sigmas):
        kernel = TpaKernel(
            sigma_f=float(sigma),
            omega_f=kernel_tpa.omega_f,
            amplitude=kernel_tpa.amplitude,
            lineshape=kernel_tpa.lineshape,
        )
        result = _structured(source, kernel)
        coherent[i] = result.coherent
        incoherent[i] = result.incoherent
    return {"sigma_f": sigmas, "coherent": coherent, "incoherent": incoherent}


__all__ = [
    "IMAGINARY_TOLERANCE",
    "KERNEL_EDGE_TOLERANCE",
    "TpaKernel",
    "TpaResult",
    "linewidth_sweep",
    "sum_index_bounds",
    "tpa_probability",
    "tpa_samples",
    "tpa_triples",
]
