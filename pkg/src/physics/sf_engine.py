"""
Classical stochastic-field (SF) model of squeezed vacuum.

Zero-point noise is a white complex Gaussian field with
⟨a(ω)a*(ω′)⟩ = P_SF·2πδ(ω − ω′). On the lattice the delta becomes the
column value delta_peak = 2π/d_omega, so every grid sample has variance
P_SF·delta_peak and lattice sums with the measure d_omega/2π reproduce
the continuum integrals.

Pipeline stages:

    Vacuum ──gate──▶ Filtered ──squeeze──▶ Gated
    Vacuum ──squeeze──▶ Squeezed

Gated moments already carry the D kernel and are compared to closed
forms as they are. Ungated second moments are divided by delta_peak once
per 2πδ they contain.
"""

import csv
import json
import logging
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Literal, overload

import numpy as np

from src import __version__
from src.physics.correlators import (
    CompositeCorr4Model,
    Corr2Result,
    Corr4Model,
    Corr4Tensor,
    Lineage,
    MonteCarloEstimate,
    ProbePairs,
    ProbeQuads,
    ProductWeight,
    Provenance,
)
from src.physics.errors import (
    ConfigurationMismatchError,
    LatticeError,
    ParameterError,
)
from src.physics.gain import GainParams, GainProfile
from src.physics.gate import GateKernel, gate_field
from src.physics.lattice import FrequencyLattice, integrate
from src.physics.sampling import (
    MAX_SEED,
    Backend,
    complex_normal_block,
    jackknife_mean,
    require_realizations,
    run_blocks,
)

logger = logging.getLogger(__name__)

MIN_REALIZATIONS_CORR4 = 1000
DEFAULT_P_SF = 0.5


class Stage(str, Enum):
    VACUUM = "vacuum"
    FILTERED = "filtered"
    SQUEEZED = "squeezed"
    GATED = "gated"

    @property
    def is_gated(self) -> bool:
        return self in (Stage.FILTERED, Stage.GATED)


@dataclass(frozen=True, eq=False)
class NoiseSpec:
    """
    Zero-point noise settings.

    p_sf is the white spectral density (½ mimics ħω/2 per mode);
    spectral_density optionally tabulates P_SF(ω) per grid point instead.
    """

    p_sf: float = DEFAULT_P_SF
    seed: int = 0
    n_realizations: int = 10_000
    spectral_density: np.ndarray | None = None

    def __post_init__(self) -> None:
        if not self.p_sf > 0:
            raise ParameterError(f"p_sf must be > 0 (got {self.p_sf})")
        if not 0 <= self.seed <= MAX_SEED:
            raise ParameterError(f"seed must be a 64-bit unsigned integer (got {self.seed})")
        if self.n_realizations < 1:
            raise ParameterError(f"n_realizations must be >= 1 (got {self.n_realizations})")
        if self.spectral_density is not None and np.any(np.asarray(self.spectral_density) <= 0):
            raise ParameterError("tabulated spectral density must be positive")

    def density(self, lattice: FrequencyLattice) -> np.ndarray:
        if self.spectral_density is None:
            return np.full(lattice.n_points, self.p_sf)
        density = np.asarray(self.spectral_density, dtype=float)
        if density.shape != (lattice.n_points,):
            raise LatticeError("tabulated spectral density is not sampled on this lattice")
        return density


@dataclass(eq=False)
class FieldEnsemble:
    """R field realizations (rows) over the lattice (columns)."""

    lattice: FrequencyLattice
    stage: Stage
    data: np.ndarray
    noise_spec: NoiseSpec
    gain_tag: GainParams | None = None
    duration: float | None = None
    metadata: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.data.ndim != 2 or self.data.shape[1] != self.lattice.n_points:
            raise LatticeError(
                f"ensemble data must be (R, {self.lattice.n_points}); got {self.data.shape}"
            )

    @property
    def n_realizations(self) -> int:
        return self.data.shape[0]

    @property
    def normalization(self) -> float:
        """Divisor turning a raw second moment into continuum units."""
        return 1.0 if self.stage.is_gated else self.lattice.delta_peak

    def lineage(self, probes: str | None = None) -> Lineage:
        return Lineage(
            seed=self.noise_spec.seed,
            n_realizations=self.n_realizations,
            p_sf=self.noise_spec.p_sf,
            lattice=self.lattice,
            duration=self.duration,
            probes=probes,
        )

    def __repr__(self) -> str:
        return (
            f"FieldEnsemble(stage={self.stage.value}, R={self.n_realizations}, "
            f"M={self.lattice.n_points}, seed={self.noise_spec.seed})"
        )


def _require_stage(ensemble: FieldEnsemble, allowed: tuple[Stage, ...], what: str) -> None:
    if ensemble.stage not in allowed:
        names = ", ".join(s.value for s in allowed)
        raise ConfigurationMismatchError(
            f"{what} needs a {names} ensemble (got {ensemble.stage.value})"
        )


# ---------------------------------------------------------------------------
# Ensemble generation and transforms
# ---------------------------------------------------------------------------


def sample_vacuum(
    lattice: FrequencyLattice,
    noise_spec: NoiseSpec,
    workers: int = 1,
    block_size: int = 512,
    backend: Backend = "loky",
) -> FieldEnsemble:
    """Classical zero-point field, variance P_SF·2π/d_omega per sample."""
    column_scale = np.sqrt(noise_spec.density(lattice) * lattice.delta_peak)
    seed, m = noise_spec.seed, lattice.n_points

    def task(start: int, stop: int) -> np.ndarray:
        return complex_normal_block(seed, start, stop, m, 1.0) * column_scale

    data = run_blocks(task, noise_spec.n_realizations, block_size, workers, backend)
    logger.info(
        f"Sampled vacuum ensemble: R={noise_spec.n_realizations}, M={m}, seed={seed}"
    )
    return FieldEnsemble(lattice=lattice, stage=Stage.VACUUM, data=data, noise_spec=noise_spec)


def gate(
    ensemble: FieldEnsemble, kernel: GateKernel, method: Literal["fft", "direct"] = "fft"
) -> FieldEnsemble:
    """Vacuum → Filtered through the temporal shutter."""
    _require_stage(ensemble, (Stage.VACUUM,), "gate")
    if ensemble.lattice != kernel.lattice:
        raise LatticeError("ensemble and gate kernel live on different lattices")
    return FieldEnsemble(
        lattice=ensemble.lattice,
        stage=Stage.FILTERED,
        data=gate_field(ensemble.data, kernel, method=method),
        noise_spec=ensemble.noise_spec,
        duration=kernel.duration,
    )


def squeeze(ensemble: FieldEnsemble, gain: GainProfile) -> FieldEnsemble:
    """
    b(ω) = f(ω)a(ω) + g(ω)a*(2ω₀ − ω).

    Vacuum input yields a Squeezed ensemble; Filtered input yields Gated.
    """
    _require_stage(ensemble, (Stage.VACUUM, Stage.FILTERED), "squeeze")
    if ensemble.lattice != gain.lattice:
        raise LatticeError("ensemble and gain profile live on different lattices")
    a = ensemble.data
    b = gain.f * a + gain.g * np.conj(a[:, ensemble.lattice.mirror])
    stage = Stage.SQUEEZED if ensemble.stage is Stage.VACUUM else Stage.GATED
    return FieldEnsemble(
        lattice=ensemble.lattice,
        stage=stage,
        data=b,
        noise_spec=ensemble.noise_spec,
        gain_tag=gain.params,
        duration=ensemble.duration,
    )


def crn_pair(ensemble: FieldEnsemble, gain: GainProfile) -> tuple[FieldEnsemble, FieldEnsemble]:
    """Squeeze one noise ensemble with g and with g = 0 (common random numbers)."""
    return squeeze(ensemble, gain), squeeze(ensemble, gain.baseline())


def simulate_gated(
    gain: GainProfile,
    kernel: GateKernel,
    noise_spec: NoiseSpec,
    workers: int = 1,
    block_size: int = 512,
    backend: Backend = "loky",
) -> tuple[FieldEnsemble, FieldEnsemble]:
    """Vacuum → Filtered → Gated for g and its g = 0 baseline."""
    vacuum = sample_vacuum(gain.lattice, noise_spec, workers, block_size, backend)
    return crn_pair(gate(vacuum, kernel), gain)


# ---------------------------------------------------------------------------
# Spectra and second moments
# ---------------------------------------------------------------------------


def spectrum_sf_closed(gain: GainProfile, p_sf: float = DEFAULT_P_SF) -> np.ndarray:
    """S_SF(ω) = P_SF(2|g|² + 1)."""
    return p_sf * (2.0 * gain.g_intensity + 1.0)


def spectrum_sf(ensemble: FieldEnsemble) -> MonteCarloEstimate:
    """⟨|b(ω)|²⟩/delta_peak per grid point, with jackknife error."""
    _require_stage(ensemble, (Stage.VACUUM, Stage.SQUEEZED), "spectrum_sf")
    samples = np.abs(ensemble.data) ** 2 / ensemble.lattice.delta_peak
    mean, stderr = jackknife_mean(samples)
    return MonteCarloEstimate(
        values=mean, stderr=stderr, samples=samples, lineage=ensemble.lineage(), label="spectrum"
    )


def corr2_sf_closed(
    gain: GainProfile, kernel: GateKernel, probes: ProbePairs, p_sf: float = DEFAULT_P_SF
) -> Corr2Result:
    """P_SF·(f*(ω)f(ω̃) + g*(ω)g(ω̃))·D(ω − ω̃)."""
    probes.validate(gain.lattice)
    f, g, j, k = gain.f, gain.g, probes.j, probes.k
    values = p_sf * (np.conj(f[j]) * f[k] + np.conj(g[j]) * g[k]) * kernel.between(j, k)
    return Corr2Result(
        lattice=gain.lattice, pairs=probes, values=values, provenance=Provenance.SF_CLOSED_FORM
    )


def _mc_corr2(ensemble: FieldEnsemble, probes: ProbePairs, conjugate: bool) -> Corr2Result:
    probes.validate(ensemble.lattice)
    x = ensemble.data
    left = np.conj(x[:, probes.j]) if conjugate else x[:, probes.j]
    samples = left * x[:, probes.k] / ensemble.normalization
    mean, stderr = jackknife_mean(samples)
    return Corr2Result(
        lattice=ensemble.lattice,
        pairs=probes,
        values=mean,
        provenance=Provenance.SF_MONTE_CARLO,
        stderr=stderr,
        samples=samples,
        lineage=ensemble.lineage(probes.key),
    )


def corr2_sf_mc(ensemble: FieldEnsemble, probes: ProbePairs) -> Corr2Result:
    """⟨x*(ω_j)x(ω_k)⟩ over realizations."""
    return _mc_corr2(ensemble, probes, conjugate=True)


def pseudo_corr2_mc(ensemble: FieldEnsemble, probes: ProbePairs) -> Corr2Result:
    """⟨x(ω_j)x(ω_k)⟩ without conjugation; zero for the vacuum."""
    return _mc_corr2(ensemble, probes, conjugate=False)


@overload
def energy_sf(source: GainProfile, kernel: GateKernel, p_sf: float = ...) -> float: ...


@overload
def energy_sf(
    source: FieldEnsemble, kernel: GateKernel, p_sf: float = ...
) -> MonteCarloEstimate: ...


def energy_sf(
    source: GainProfile | FieldEnsemble, kernel: GateKernel, p_sf: float = DEFAULT_P_SF
) -> float | MonteCarloEstimate:
    """
    Classical energy in the gate in photon-number units.

    Closed form: T·∫đω P_SF(2|g|² + 1). From an ensemble: T·∫đω of the
    measured spectrum (ungated) or ∫đω ⟨|c|²⟩ (gated, D(0) = T already
    inside the moment).
    """
    if isinstance(source, GainProfile):
        source.check_band_edges()
        return float(kernel.duration * integrate(source.lattice, spectrum_sf_closed(source, p_sf)))
    lattice = source.lattice
    if source.stage.is_gated:
        if source.duration != kernel.duration:
            raise ConfigurationMismatchError("ensemble was gated with a different duration")
        per_point = np.abs(source.data) ** 2
    else:
        per_point = kernel.duration * np.abs(source.data) ** 2 / lattice.delta_peak
    samples = per_point.sum(axis=1) * lattice.measure
    mean, stderr = jackknife_mean(samples)
    return MonteCarloEstimate(
        values=np.asarray(mean),
        stderr=np.asarray(stderr),
        samples=samples,
        lineage=source.lineage(),
        label="energy",
    )


# ---------------------------------------------------------------------------
# Four-frequency correlators
# ---------------------------------------------------------------------------


def corr4_sf_model(
    gain: GainProfile, kernel: GateKernel, p_sf: float = DEFAULT_P_SF
) -> Corr4Model:
    """
    Correlated + uncorrelated terms on the photon-pair shell.

    correlated:   4P²·f*_a g*_a f_c g_c · D(2ω₀−ω_a−ω_b) · D(2ω₀−ω_c−ω_d)
    uncorrelated: 4P²(|g_a|²+½)(|g_b|²+½) · [D(ω_a−ω_d)D(ω_b−ω_c) + D(ω_a−ω_c)D(ω_b−ω_d)]
    """
    if gain.lattice != kernel.lattice:
        raise ConfigurationMismatchError("gain profile and gate kernel live on different lattices")
    return Corr4Model(
        kernel=kernel,
        coherent_amplitude=2.0 * p_sf * gain.f * gain.g,
        pair_weight=ProductWeight(2.0 * p_sf * (gain.g_intensity + 0.5)),
        exchange=1.0,
        provenance=Provenance.SF_CLOSED_FORM,
        term_names=("correlated", "uncorrelated"),
    )


@dataclass(frozen=True, eq=False)
class PairingCorr4:
    """
    Exact Gaussian-moment-theorem correlator of the gated classical field.

    ⟨c*_a c*_b c_c c_d⟩ = conj(A_ab)·A_cd + N_ac·N_bd + N_ad·N_bc with
    N_jk = ⟨c*_j c_k⟩ and A_cd = ⟨c_c c_d⟩, each f and g evaluated at its
    own frequency. With overlap="lattice" the D kernel is replaced by the
    lattice self-overlap of the window, which is exactly what a gated
    lattice ensemble realizes.
    """

    gain: GainProfile
    kernel: GateKernel
    p_sf: float = DEFAULT_P_SF
    overlap: Literal["analytic", "lattice"] = "analytic"

    term_names = ("anomalous", "direct", "exchange")

    @property
    def lattice(self) -> FrequencyLattice:
        return self.gain.lattice

    def _k(self, j: np.ndarray, k: np.ndarray) -> np.ndarray:
        if self.overlap == "lattice":
            return self.kernel.lattice_overlap[j, k]
        return self.kernel.between(j, k)

    def normal(self, j: np.ndarray, k: np.ndarray) -> np.ndarray:
        f, g = self.gain.f, self.gain.g
        return self.p_sf * (np.conj(f[j]) * f[k] + np.conj(g[j]) * g[k]) * self._k(j, k)

    def anomalous(self, c: np.ndarray, d: np.ndarray) -> np.ndarray:
        f, g = self.gain.f, self.gain.g
        mirror_d = self.lattice.mirror[d]
        return self.p_sf * (f[c] * g[d] + g[c] * f[d]) * self._k(c, mirror_d)

    def evaluate(self, quads: ProbeQuads) -> Corr4Tensor:
        quads.validate(self.lattice)
        a, b, c, d = quads.a, quads.b, quads.c, quads.d
        terms = {
            "anomalous": np.conj(self.anomalous(a, b)) * self.anomalous(c, d),
            "direct": self.normal(a, c) * self.normal(b, d),
            "exchange": self.normal(a, d) * self.normal(b, c),
        }
        return Corr4Tensor(
            quads=quads,
            values=terms["anomalous"] + terms["direct"] + terms["exchange"],
            provenance=Provenance.SF_CLOSED_FORM,
            terms=terms,
        )


def corr4_sf_pairing(
    gain: GainProfile,
    kernel: GateKernel,
    probe_quads: ProbeQuads,
    p_sf: float = DEFAULT_P_SF,
    overlap: Literal["analytic", "lattice"] = "analytic",
) -> Corr4Tensor:
    return PairingCorr4(gain, kernel, p_sf, overlap).evaluate(probe_quads)


def corr4_sf_closed(
    gain: GainProfile,
    kernel: GateKernel,
    probe_quads: ProbeQuads,
    p_sf: float = DEFAULT_P_SF,
    form: Literal["shell", "pairing"] = "shell",
) -> Corr4Tensor:
    """SF closed form; `form="pairing"` gives the exact moment-theorem value."""
    if form == "pairing":
        return corr4_sf_pairing(gain, kernel, probe_quads, p_sf)
    return corr4_sf_model(gain, kernel, p_sf).evaluate(probe_quads)


def isserlis_from_ensemble(ensemble: FieldEnsemble, probe_quads: ProbeQuads) -> Corr4Tensor:
    """Moment-theorem closure built from the ensemble's own second moments."""
    probe_quads.validate(ensemble.lattice)
    x = ensemble.data
    a, b, c, d = probe_quads.a, probe_quads.b, probe_quads.c, probe_quads.d

    def normal(j: np.ndarray, k: np.ndarray) -> np.ndarray:
        return np.mean(np.conj(x[:, j]) * x[:, k], axis=0)

    def anomalous(j: np.ndarray, k: np.ndarray) -> np.ndarray:
        return np.mean(x[:, j] * x[:, k], axis=0)

    terms = {
        "anomalous": np.conj(anomalous(a, b)) * anomalous(c, d),
        "direct": normal(a, c) * normal(b, d),
        "exchange": normal(a, d) * normal(b, c),
    }
    scale = ensemble.normalization**2
    terms = {name: value / scale for name, value in terms.items()}
    return Corr4Tensor(
        quads=probe_quads,
        values=terms["anomalous"] + terms["direct"] + terms["exchange"],
        provenance=Provenance.SF_MONTE_CARLO,
        terms=terms,
        lineage=ensemble.lineage(probe_quads.key),
    )


def corr4_sf_mc(
    ensemble: FieldEnsemble,
    probe_quads: ProbeQuads,
    min_realizations: int = MIN_REALIZATIONS_CORR4,
) -> Corr4Tensor:
    """
    ⟨c*_a c*_b c_c c_d⟩ over realizations.

    Gated ensembles are reported as they are. Ungated ones are divided by
    delta_peak², one per 2πδ pairing.
    """
    require_realizations(ensemble.n_realizations, min_realizations, "corr4_sf_mc")
    probe_quads.validate(ensemble.lattice)
    x = ensemble.data
    samples = (
        np.conj(x[:, probe_quads.a])
        * np.conj(x[:, probe_quads.b])
        * x[:, probe_quads.c]
        * x[:, probe_quads.d]
    ) / ensemble.normalization**2
    mean, stderr = jackknife_mean(samples)
    return Corr4Tensor(
        quads=probe_quads,
        values=mean,
        provenance=Provenance.SF_MONTE_CARLO,
        stderr=stderr,
        samples=samples,
        lineage=ensemble.lineage(probe_quads.key),
    )


# ---------------------------------------------------------------------------
# Renormalization (subtract the g = 0 result)
# ---------------------------------------------------------------------------


def _paired_difference(
    samples: np.ndarray | None, baseline: np.ndarray | None
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    if samples is None or baseline is None:
        raise ConfigurationMismatchError(
            "Monte Carlo renormalization needs per-realization samples"
        )
    if samples.shape != baseline.shape:
        raise ConfigurationMismatchError(
            f"paired samples differ in shape: {samples.shape} vs {baseline.shape}"
        )
    diff = samples - baseline
    mean, stderr = jackknife_mean(diff)
    return diff, mean, stderr


def _require_lineage(first: Lineage | None, second: Lineage | None) -> None:
    if first is None or second is None:
        raise ConfigurationMismatchError("Monte Carlo result carries no seed lineage")
    first.require_match(second)


@overload
def renormalize(result_with_g: float, result_g0: float) -> float: ...


@overload
def renormalize(result_with_g: np.ndarray, result_g0: np.ndarray) -> np.ndarray: ...


@overload
def renormalize(result_with_g: Corr2Result, result_g0: Corr2Result) -> Corr2Result: ...


@overload
def renormalize(result_with_g: Corr4Tensor, result_g0: Corr4Tensor) -> Corr4Tensor: ...


@overload
def renormalize(
    result_with_g: MonteCarloEstimate, result_g0: MonteCarloEstimate
) -> MonteCarloEstimate: ...


@overload
def renormalize(result_with_g: Corr4Model, result_g0: Corr4Model) -> CompositeCorr4Model: ...


def renormalize(result_with_g: Any, result_g0: Any) -> Any:
    """
    Subtract the g = 0 result from the g ≠ 0 result.

    Monte Carlo inputs must come from the same noise lineage (common
    random numbers); their error bars are the jackknife errors of the
    per-realization differences.
    """
    if type(result_with_g) is not type(result_g0):
        raise ConfigurationMismatchError(
            f"cannot renormalize {type(result_with_g).__name__} "
            f"against {type(result_g0).__name__}"
        )

    if isinstance(result_with_g, Corr4Model):
        if result_with_g.kernel is not result_g0.kernel and (
            result_with_g.kernel.duration != result_g0.kernel.duration
            or result_with_g.lattice != result_g0.lattice
        ):
            raise ConfigurationMismatchError("models use different gate kernels")
        return CompositeCorr4Model(parts=((1.0, result_with_g), (-1.0, result_g0)))

    if isinstance(result_with_g, MonteCarloEstimate):
        _require_lineage(result_with_g.lineage, result_g0.lineage)
        diff, mean, stderr = _paired_difference(result_with_g.samples, result_g0.samples)
        return MonteCarloEstimate(
            values=mean,
            stderr=stderr,
            samples=diff,
            lineage=result_with_g.lineage,
            provenance=Provenance.SF_RENORMALIZED,
            label=result_with_g.label,
        )

    if isinstance(result_with_g, Corr2Result):
        if result_with_g.lattice != result_g0.lattice or (
            result_with_g.pairs.key != result_g0.pairs.key
        ):
            raise ConfigurationMismatchError("corr2 results use different lattices or probes")
        if result_with_g.provenance is Provenance.SF_MONTE_CARLO:
            _require_lineage(result_with_g.lineage, result_g0.lineage)
            diff, mean, stderr = _paired_difference(result_with_g.samples, result_g0.samples)
            return Corr2Result(
                lattice=result_with_g.lattice,
                pairs=result_with_g.pairs,
                values=mean,
                provenance=Provenance.SF_RENORMALIZED,
                stderr=stderr,
                samples=diff,
                lineage=result_with_g.lineage,
            )
        return Corr2Result(
            lattice=result_with_g.lattice,
            pairs=result_with_g.pairs,
            values=result_with_g.values - result_g0.values,
            provenance=Provenance.SF_RENORMALIZED,
        )

    if isinstance(result_with_g, Corr4Tensor):
        if result_with_g.quads.key != result_g0.quads.key:
            raise ConfigurationMismatchError("corr4 results use different probe quads")
        if result_with_g.provenance is Provenance.SF_MONTE_CARLO:
            _require_lineage(result_with_g.lineage, result_g0.lineage)
            diff, mean, stderr = _paired_difference(result_with_g.samples, result_g0.samples)
            return Corr4Tensor(
                quads=result_with_g.quads,
                values=mean,
                provenance=Provenance.SF_RENORMALIZED,
                stderr=stderr,
                samples=diff,
                lineage=result_with_g.lineage,
            )
        terms = {
            name: value - result_g0.terms[name]
            for name, value in result_with_g.terms.items()
            if name in result_g0.terms
        }
        return Corr4Tensor(
            quads=result_with_g.quads,
            values=result_with_g.values - result_g0.values,
            provenance=Provenance.SF_RENORMALIZED,
            terms=terms,
        )

    if isinstance(result_with_g, np.ndarray):
        if result_with_g.shape != result_g0.shape:
            raise ConfigurationMismatchError("arrays differ in shape")
        return result_with_g - result_g0

    if isinstance(result_with_g, int | float):
        return float(result_with_g) - float(result_g0)

    raise TypeError(f"cannot renormalize objects of type {type(result_with_g).__name__}")


# ---------------------------------------------------------------------------
# Export
# ---------------------------------------------------------------------------


def export_ensemble(
    ensemble: FieldEnsemble,
    path: Path,
    fmt: Literal["binary", "csv"] = "binary",
    digits: int = 17,
) -> tuple[Path, Path]:
    """
    Dump an ensemble for external inspection.

    binary: realization-major little-endian float64 (re, im) pairs.
    csv:    one row per realization, columns re_0, im_0, re_1, im_1, …
    A JSON sidecar `<path>.json` describes the layout and lineage.
    Returns (data_path, header_path).
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lattice = ensemble.lattice
    header = {
        "format": fmt,
        "dtype": "<f8",
        "layout": "realization-major, (re, im) pairs per grid point",
        "n_realizations": ensemble.n_realizations,
        "n_points": lattice.n_points,
        "stage": ensemble.stage.value,
        "omega0": lattice.omega0,
        "half_width": lattice.half_width,
        "d_omega": lattice.d_omega,
        "seed": ensemble.noise_spec.seed,
        "p_sf": ensemble.noise_spec.p_sf,
        "duration": ensemble.duration,
        "gain": None
        if ensemble.gain_tag is None
        else {
            "gamma": ensemble.gain_tag.gamma,
            "kappa": ensemble.gain_tag.kappa,
            "z": ensemble.gain_tag.z,
            "convention": ensemble.gain_tag.convention.value,
            "compensate_dispersion": ensemble.gain_tag.compensate_dispersion,
        },
        "version": __version__,
    }
    if fmt == "binary":
        path.write_bytes(np.ascontiguousarray(ensemble.data, dtype="<c16").tobytes())
    elif fmt == "csv":
        interleaved = np.ascontiguousarray(ensemble.data, dtype=complex).view(float)
        with path.open("w", newline="", encoding="utf-8") as handle:
            writer = csv.writer(handle)
            writer.writerow(
                [f"{part}_{k}" for k in range(lattice.n_points) for part in ("re", "im")]
            )
            for row in interleaved:
                writer.writerow([f"{x:.{digits - 1}e}" for x in row])
    else:
        raise ParameterError(f"unknown export format: {fmt}")
    header_path = path.with_name(path.name + ".json")
    header_path.write_text(json.dumps(header, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    logger.info(f"Exported {ensemble!r} to {path}")
    return path, header_path


def load_ensemble_binary(path: Path) -> np.ndarray:
    """Read back a binary export as an (R, M) complex array."""
    path = Path(path)
    header = json.loads(path.with_name(path.name + ".json").read_text(encoding="utf-8"))
    raw = np.frombuffer(path.read_bytes(), dtype="<c16")
    return raw.reshape(header["n_realizations"], header["n_points"])


__all__ = [
    "DEFAULT_P_SF",
    "MIN_REALIZATIONS_CORR4",
    "FieldEnsemble",
    "NoiseSpec",
    "PairingCorr4",
    "Stage",
    "corr2_sf_closed",
    "corr2_sf_mc",
    "corr4_sf_closed",
    "corr4_sf_mc",
    "corr4_sf_model",
    "corr4_sf_pairing",
    "crn_pair",
    "energy_sf",
    "export_ensemble",
    "gate",
    "isserlis_from_ensemble",
    "load_ensemble_binary",
    "pseudo_corr2_mc",
    "renormalize",
    "sample_vacuum",
    "simulate_gated",
    "spectrum_sf",
    "spectrum_sf_closed",
    "squeeze",
]
