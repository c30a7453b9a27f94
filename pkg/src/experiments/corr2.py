"""Two-frequency correlator from both engines on a family of probe pairs."""

import numpy as np

from src.experiments.base import (
    BaseExperiment,
    ExperimentInfo,
    ExperimentResult,
    RunContext,
    Table,
)
from src.physics.probes import make_pairs
from src.physics.qt_engine import corr2_qt
from src.physics.sf_engine import (
    PairingCorr4,
    corr2_sf_closed,
    corr2_sf_mc,
    pseudo_corr2_mc,
    renormalize,
)


class Corr2Experiment(BaseExperiment):
    """
    ⟨c†(ω)c(ω̃)⟩ from QT, the SF closed form and gated Monte Carlo.

    The renormalized SF value equals the QT one exactly on the diagonal;
    off the diagonal the f*f − 1 part of the SF correlator survives
    subtraction and is reported, not asserted. The Monte Carlo estimate
    is tested against the exact lattice expectation of the gated field.
    """

    def default_info(self) -> ExperimentInfo:
        return ExperimentInfo(
            name="Corr2",
            description="Two-frequency correlators, QT vs SF closed form vs Monte Carlo",
            columns={
                "corr2": [
                    "j",
                    "k",
                    "omega_j",
                    "omega_k",
                    "qt_re",
                    "qt_im",
                    "sf_renorm_re",
                    "sf_renorm_im",
                    "mc_renorm_re",
                    "mc_renorm_im",
                    "mc_stderr",
                    "mc_reference_re",
                    "mc_reference_im",
                ]
            },
            monte_carlo=True,
        )

    def _execute(self, context: RunContext) -> ExperimentResult:
        gain = context.gain
        kernel = context.setup.kernel
        p_sf = context.setup.noise.p_sf
        probes_cfg = context.config.probes
        validation = context.config.validation
        lattice = gain.lattice
        result = ExperimentResult(name=self.name)

        pairs = make_pairs(
            lattice,
            probes_cfg.pair_family,
            probes_cfg.pair_count,
            probes_cfg.seed,
            probes_cfg.half_span,
        )
        qt = corr2_qt(gain, kernel, pairs)
        sf_renorm = renormalize(
            corr2_sf_closed(gain, kernel, pairs, p_sf),
            corr2_sf_closed(gain.baseline(), kernel, pairs, p_sf),
        )
        diagonal = pairs.j == pairs.k
        if np.any(diagonal):
            scale = np.maximum(np.abs(qt.values[diagonal]), np.finfo(float).tiny)
            error = float(np.max(np.abs(sf_renorm.values[diagonal] - qt.values[diagonal]) / scale))
            result.check(
                "diagonal_identity", error <= validation.tolerance, error, validation.tolerance
            )

        n = len(pairs)
        mc = np.full(n, np.nan + 0j)
        stderr = np.full(n, np.nan)
        reference = np.full(n, np.nan + 0j)
        if validation.include_monte_carlo:
            gated, baseline = context.gated_pair()
            estimate = renormalize(corr2_sf_mc(gated, pairs), corr2_sf_mc(baseline, pairs))
            exact = PairingCorr4(gain, kernel, p_sf, overlap="lattice")
            exact0 = PairingCorr4(gain.baseline(), kernel, p_sf, overlap="lattice")
            reference = exact.normal(pairs.j, pairs.k) - exact0.normal(pairs.j, pairs.k)
            mc, stderr = estimate.values, estimate.stderr
            floor = validation.tolerance * float(np.max(np.abs(reference)) or 1.0)
            z = np.abs(mc - reference) / np.maximum(stderr, floor)
            result.check(
                "monte_carlo_renormalized",
                np.all(z <= validation.sigma),
                float(np.max(z)),
                validation.sigma,
                detail="standard errors against the lattice expectation",
            )
            vacuum_pairs = pseudo_corr2_mc(context.vacuum(), pairs)
            z_pseudo = np.abs(vacuum_pairs.values) / vacuum_pairs.stderr
            result.check(
                "vacuum_pseudo_moment",
                np.all(z_pseudo <= validation.sigma),
                float(np.max(z_pseudo)),
                validation.sigma,
            )

        table = Table(self.info.columns["corr2"])
        for i in range(n):
            j, k = int(pairs.j[i]), int(pairs.k[i])
            table.add(
                j,
                k,
                lattice.omegas[j],
                lattice.omegas[k],
                qt.values[i].real,
                qt.values[i].imag,
                sf_renorm.values[i].real,
                sf_renorm.values[i].imag,
                mc[i].real,
                mc[i].imag,
                stderr[i],
                reference[i].real,
                reference[i].imag,
            )
        result.tables["corr2"] = table
        result.report = {"family": pairs.family, "n_pairs": n}
        return result


__all__ = ["Corr2Experiment"]
