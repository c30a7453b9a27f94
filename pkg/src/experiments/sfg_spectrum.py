"""Sum-frequency spectrum of the squeezed light from both engines."""

import numpy as np

from src.experiments.base import (
    BaseExperiment,
    ExperimentInfo,
    ExperimentResult,
    RunContext,
    Table,
)
from src.physics.observables.sfg import (
    omega3_indices,
    omega3_values,
    sfg_spectrum,
    sfg_spectrum_qt,
    sfg_spectrum_sf,
    symmetry_defect,
)
from src.physics.sampling import jackknife_mean
from src.physics.sf_engine import PairingCorr4, renormalize

SYMMETRY_TOLERANCE = 1e-10


class SfgSpectrumExperiment(BaseExperiment):
    """
    S₃(ω₃) from the QT correlator and from renormalized gated Monte Carlo.

    Relative units throughout: the coupling ξ_c only rescales. The Monte
    Carlo spectrum is compared with the exact lattice expectation of the
    gated field and with QT inside the renormalization cross-term bound.
    """

    def default_info(self) -> ExperimentInfo:
        return ExperimentInfo(
            name="SfgSpectrum",
            description="SFG output spectrum, QT vs renormalized SF Monte Carlo",
            columns={
                "sfg_spectrum": [
                    "omega3",
                    "S_qt",
                    "S_qt_coherent",
                    "S_qt_incoherent",
                    "S_sf_mc_renorm",
                    "stderr",
                    "S_sf_lattice_renorm",
                ]
            },
            monte_carlo=True,
        )

    def _execute(self, context: RunContext) -> ExperimentResult:
        gain = context.gain
        kernel = context.setup.kernel
        params = context.setup.sfg_params
        p_sf = context.setup.noise.p_sf
        sfg_cfg = context.config.sfg
        validation = context.config.validation
        lattice = gain.lattice
        result = ExperimentResult(name=self.name)

        s_idx = omega3_indices(lattice, sfg_cfg.half_window)
        qt = sfg_spectrum_qt(gain, kernel, params, s_idx)
        assert qt.coherent is not None and qt.incoherent is not None
        scale = float(np.max(np.abs(qt.values))) or 1.0
        defect = symmetry_defect(qt.values, s_idx, lattice.n_points) / scale
        result.check("qt_symmetric", defect <= SYMMETRY_TOLERANCE, defect, SYMMETRY_TOLERANCE)

        vacuum = sfg_spectrum_qt(gain.baseline(), kernel, params, s_idx)
        result.check(
            "qt_vanishes_without_gain",
            np.all(vacuum.values == 0.0),
            float(np.max(np.abs(vacuum.values))),
            0.0,
        )

        n = len(s_idx)
        mc = np.full(n, np.nan)
        stderr = np.full(n, np.nan)
        lattice_renorm = np.full(n, np.nan)
        report: dict = {"p_sf": p_sf, "alpha": params.alpha, "method": sfg_cfg.method}
        if validation.include_monte_carlo:
            gated, baseline = context.gated_pair(sfg_cfg.n_realizations)
            estimate = renormalize(
                sfg_spectrum_sf(gated, params, s_idx, sfg_cfg.method),
                sfg_spectrum_sf(baseline, params, s_idx, sfg_cfg.method),
            )
            mc, stderr = np.real(estimate.values), estimate.stderr
            exact = PairingCorr4(gain, kernel, p_sf, overlap="lattice")
            exact0 = PairingCorr4(gain.baseline(), kernel, p_sf, overlap="lattice")
            lattice_renorm = (
                sfg_spectrum(exact, params, s_idx).values
                - sfg_spectrum(exact0, params, s_idx).values
            )
            floor = validation.tolerance * scale
            z = np.abs(mc - lattice_renorm) / np.maximum(stderr, floor)
            result.check(
                "monte_carlo_vs_lattice_expectation",
                np.all(z <= validation.sigma),
                float(np.max(z)),
                validation.sigma,
            )
            allowance = validation.sigma * stderr + np.abs(lattice_renorm - qt.values)
            excess = np.abs(mc - qt.values) - allowance
            result.check(
                "monte_carlo_vs_qt",
                np.all(excess <= floor),
                float(np.max(excess)),
                floor,
                detail="within sigma stderr plus the renormalization cross term",
            )

            # mirrored points compared sample by sample: the error bar is that of the difference
            center = lattice.n_points - 1
            lookup = {int(s): i for i, s in enumerate(s_idx)}
            left = [i for s, i in lookup.items() if s < center and 2 * center - s in lookup]
            right = [lookup[2 * center - int(s_idx[i])] for i in left]
            if left:
                paired = estimate.samples[:, left] - estimate.samples[:, right]
                diff, diff_se = jackknife_mean(paired)
                z_sym = np.abs(diff) / np.maximum(diff_se, floor)
                result.check(
                    "monte_carlo_symmetric",
                    np.all(z_sym <= validation.sigma),
                    float(np.max(z_sym)),
                    validation.sigma,
                )
            report["n_realizations"] = gated.n_realizations

        table = Table(self.info.columns["sfg_spectrum"])
        omega3 = omega3_values(lattice, s_idx)
        for i in range(n):
            table.add(
                omega3[i],
                qt.values[i],
                qt.coherent[i],
                qt.incoherent[i],
                mc[i],
                stderr[i],
                lattice_renorm[i],
            )
        result.tables["sfg_spectrum"] = table
        report["symmetry_defect"] = defect
        report["gate_coherence"] = context.gate_coherence
        result.report = report
        return result


__all__ = ["SfgSpectrumExperiment"]
