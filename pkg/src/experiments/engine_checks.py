"""Validation suites for the building blocks: gain functions, gate kernel, noise sampler."""

import numpy as np

from src.experiments.base import (
    BaseExperiment,
    ExperimentInfo,
    ExperimentResult,
    RunContext,
    Table,
)
from src.physics.correlators import ProbePairs
from src.physics.gain import (
    Convention,
    GainParams,
    gain_profile,
    high_gain_deviation,
    low_gain_g,
)
from src.physics.lattice import make_lattice
from src.physics.probes import central_indices
from src.physics.sampling import jackknife_mean

UNITARITY_TOLERANCE = 1e-12
LITERAL_MIN_DEVIATION = 1e-3
LOW_GAIN_TOLERANCE = 1e-4
HIGH_GAIN_TOLERANCE = 0.01
# (gamma, kappa, z) checked on a fixed dense lattice; (2, 1, 1) puts s = 0 on the grid
# at |ω − ω₀| = 2 and (2, 0.5, 10) is deep in the high-gain regime
UNITARITY_SETS = (
    (1e-3, 1.0, 1.0),
    (1.0, 1.0, 1.0),
    (5.0, 1.0, 1.0),
    (2.0, 1.0, 1.0),
    (2.0, 0.5, 10.0),
)
UNITARITY_LATTICE = (100.0, 4.0, 4097)
LOW_GAIN_GZ = 1e-3
HIGH_GAIN_GZ = 10.0
MIN_TAIL_PRODUCT = 200.0
SAMPLER_PROBES = 16


class GainChecks(BaseExperiment):
    """Bogoliubov unitarity under both conventions and the low/high-gain limits."""

    def default_info(self) -> ExperimentInfo:
        return ExperimentInfo(
            name="GainChecks",
            description="Unitarity of f, g and agreement with the low- and high-gain limits",
            columns={"unitarity": ["convention", "gamma", "kappa", "z", "max_deviation"]},
        )

    def _execute(self, context: RunContext) -> ExperimentResult:
        lattice = context.setup.lattice
        base = context.setup.gain_params
        result = ExperimentResult(name=self.name)
        table = Table(self.info.columns["unitarity"])

        dense = make_lattice(*UNITARITY_LATTICE)
        for gamma, kappa, z in UNITARITY_SETS:
            params = GainParams(gamma=gamma, kappa=kappa, z=z)
            deviation = gain_profile(dense, params).unitarity_deviation()
            table.add(Convention.UNITARY.value, gamma, kappa, z, deviation)
            result.check(
                f"unitary_bogoliubov_gamma={gamma:g}_kappa={kappa:g}_z={z:g}",
                deviation <= UNITARITY_TOLERANCE,
                deviation,
                UNITARITY_TOLERANCE,
            )

        literal = GainParams(gamma=1.0, kappa=1.0, z=1.0, convention=Convention.LITERAL)
        deviation = gain_profile(dense, literal).unitarity_deviation()
        table.add(Convention.LITERAL.value, literal.gamma, literal.kappa, literal.z, deviation)
        result.check(
            "literal_breaks_unitarity",
            deviation > LITERAL_MIN_DEVIATION,
            deviation,
            LITERAL_MIN_DEVIATION,
            detail="s^2 = gamma^2 - dk^2 violates |f|^2 - |g|^2 = 1; pinned as a fact",
        )

        low = GainParams(
            gamma=LOW_GAIN_GZ / base.z,
            kappa=base.kappa,
            z=base.z,
            convention=Convention.LITERAL,
        )
        g = gain_profile(lattice, low).g
        reference = low_gain_g(lattice, low)
        low_error = float(np.max(np.abs(g - reference)) / abs(reference[lattice.center]))
        result.check(
            "low_gain_limit_literal",
            low_error <= LOW_GAIN_TOLERANCE,
            low_error,
            LOW_GAIN_TOLERANCE,
        )

        high = {}
        for convention in Convention:
            params = GainParams(
                gamma=HIGH_GAIN_GZ / base.z, kappa=base.kappa, z=base.z, convention=convention
            )
            high[convention.value] = high_gain_deviation(lattice, params)
        result.check(
            "high_gain_limit_literal",
            high[Convention.LITERAL.value] <= HIGH_GAIN_TOLERANCE,
            high[Convention.LITERAL.value],
            HIGH_GAIN_TOLERANCE,
            detail="|f| against the real asymptote on the quartic-exponent <= 1 region",
        )
        result.tables["unitarity"] = table
        result.report = {"high_gain_deviation": high}
        return result


class GateChecks(BaseExperiment):
    """D(0) = T and the band-limited normalizations of D and D²."""

    def default_info(self) -> ExperimentInfo:
        return ExperimentInfo(
            name="GateChecks",
            description="Overlap kernel value at zero and its band-limited integrals",
        )

    def _execute(self, context: RunContext) -> ExperimentResult:
        kernel = context.setup.kernel
        lattice = context.setup.lattice
        result = ExperimentResult(name=self.name)

        d0 = float(kernel.at_offset(0))
        result.check("D(0)=T", d0 == kernel.duration, d0, kernel.duration)
        phase_step = lattice.d_omega * kernel.duration / 2
        result.check("aliasing_free", kernel.aliasing_free, phase_step, np.pi)

        int_d, int_d2 = kernel.normalization_sums()
        bound_d, bound_d2 = kernel.truncation_bounds()
        product = lattice.half_width * kernel.duration
        if product >= MIN_TAIL_PRODUCT:
            error_d = abs(int_d - 1.0)
            result.check("integral_D", error_d <= 2 * bound_d, error_d, 2 * bound_d)
            result.check(
                "integral_D2",
                abs(int_d2 - kernel.duration) <= 2 * bound_d2,
                abs(int_d2 - kernel.duration),
                2 * bound_d2,
            )
        result.report = {
            "integral_D": int_d,
            "integral_D2": int_d2,
            "tail_bounds": [bound_d, bound_d2],
            "half_width_times_T": product,
            "normalizations_checked": product >= MIN_TAIL_PRODUCT,
        }
        return result


class SamplerCalibration(BaseExperiment):
    """Per-point variance and vanishing pseudo-moment of the vacuum ensemble."""

    def default_info(self) -> ExperimentInfo:
        return ExperimentInfo(
            name="SamplerCalibration",
            description="Vacuum variance P_SF*2pi/d_omega and zero unconjugated moment",
            columns={
                "sampler": [
                    "index",
                    "variance",
                    "variance_stderr",
                    "expected",
                    "pseudo_abs",
                    "pseudo_stderr",
                ]
            },
            monte_carlo=True,
        )

    def _execute(self, context: RunContext) -> ExperimentResult:
        vacuum = context.vacuum()
        lattice = vacuum.lattice
        sigma = context.config.validation.sigma
        idx = central_indices(lattice, 1.0)
        idx = idx[np.round(np.linspace(0, len(idx) - 1, SAMPLER_PROBES)).astype(int)]

        expected = vacuum.noise_spec.p_sf * lattice.delta_peak
        variance, variance_se = jackknife_mean(np.abs(vacuum.data[:, idx]) ** 2)
        # a_j·a_j and a_j·a_mirror(j) cover the anomalous moments the vacuum must not have
        pairs = ProbePairs(idx, lattice.mirror[idx], family="mirror")
        pseudo, pseudo_se = jackknife_mean(vacuum.data[:, pairs.j] * vacuum.data[:, pairs.k])

        result = ExperimentResult(name=self.name)
        table = Table(self.info.columns["sampler"])
        for i, k in enumerate(idx):
            table.add(int(k), variance[i], variance_se[i], expected, abs(pseudo[i]), pseudo_se[i])
        result.tables["sampler"] = table

        z_var = np.abs(variance - expected) / variance_se
        z_pseudo = np.abs(pseudo) / pseudo_se
        result.check("variance", np.all(z_var <= sigma), np.max(z_var), sigma, "standard errors")
        result.check(
            "pseudo_moment", np.all(z_pseudo <= sigma), np.max(z_pseudo), sigma, "standard errors"
        )
        result.report = {"expected_variance": expected, "n_realizations": vacuum.n_realizations}
        return result


__all__ = ["GainChecks", "GateChecks", "SamplerCalibration"]
