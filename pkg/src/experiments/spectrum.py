"""Spectrum and photon-number equivalence between the two engines."""

import numpy as np

from src.experiments.base import (
    BaseExperiment,
    ExperimentInfo,
    ExperimentResult,
    RunContext,
    Table,
)
from src.physics.qt_engine import photon_number_qt, spectrum_qt
from src.physics.sf_engine import energy_sf, renormalize, spectrum_sf, spectrum_sf_closed


class SpectrumExperiment(BaseExperiment):
    """
    S_QT = |g|² against the SF spectrum before and after g = 0 subtraction.

    The Monte Carlo spectrum comes from ungated squeezed ensembles built
    on one vacuum ensemble (common random numbers), so the renormalized
    error bar is that of the paired differences.
    """

    def default_info(self) -> ExperimentInfo:
        return ExperimentInfo(
            name="Spectrum",
            description="Spectral density from QT and SF (closed form and Monte Carlo)",
            columns={
                "spectrum": [
                    "omega",
                    "S_qt",
                    "S_sf",
                    "S_sf_renorm",
                    "S_sf_mc_renorm",
                    "stderr",
                ]
            },
            monte_carlo=True,
        )

    def _execute(self, context: RunContext) -> ExperimentResult:
        gain = context.gain
        kernel = context.setup.kernel
        p_sf = context.setup.noise.p_sf
        validation = context.config.validation
        lattice = gain.lattice
        result = ExperimentResult(name=self.name)

        s_qt = spectrum_qt(gain)
        s_sf = spectrum_sf_closed(gain, p_sf)
        s_renorm = renormalize(s_sf, spectrum_sf_closed(gain.baseline(), p_sf))
        scale = float(np.max(s_qt)) or 1.0
        closed_error = float(np.max(np.abs(s_renorm - s_qt)) / scale)
        result.check(
            "closed_form_renormalized",
            closed_error <= validation.tolerance,
            closed_error,
            validation.tolerance,
            detail=f"relative to max S_qt, P_SF={p_sf:g}",
        )

        n_qt = photon_number_qt(gain, kernel)
        n_sf = energy_sf(gain, kernel, p_sf)
        n_renorm = renormalize(n_sf, energy_sf(gain.baseline(), kernel, p_sf))
        n_error = abs(n_renorm - n_qt) / n_qt if n_qt > 0 else abs(n_renorm)
        result.check(
            "photon_number", n_error <= validation.tolerance, n_error, validation.tolerance
        )

        mc = np.full(lattice.n_points, np.nan)
        stderr = np.full(lattice.n_points, np.nan)
        if validation.include_monte_carlo:
            squeezed, baseline = context.squeezed_pair()
            estimate = renormalize(spectrum_sf(squeezed), spectrum_sf(baseline))
            mc = np.real(estimate.values)
            stderr = estimate.stderr
            base = gain.baseline()
            expected = p_sf * (np.abs(gain.f) ** 2 + gain.g_intensity) - p_sf * (
                np.abs(base.f) ** 2 + base.g_intensity
            )
            floor = validation.tolerance * scale
            z = np.abs(mc - expected) / np.maximum(stderr, floor)
            result.check(
                "monte_carlo_renormalized",
                np.all(z <= validation.sigma),
                float(np.max(z)),
                validation.sigma,
                detail="standard errors, pointwise",
            )

        table = Table(self.info.columns["spectrum"])
        for k in range(lattice.n_points):
            table.add(lattice.omegas[k], s_qt[k], s_sf[k], s_renorm[k], mc[k], stderr[k])
        result.tables["spectrum"] = table
        result.report = {
            "N_qt": n_qt,
            "N_sf": n_sf,
            "N_sf_renorm": n_renorm,
            "p_sf": p_sf,
        }
        return result


__all__ = ["SpectrumExperiment"]
