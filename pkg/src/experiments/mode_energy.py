"""Zero-point energy of Hermite-Gaussian temporal modes."""

import numpy as np

from src.experiments.base import (
    BaseExperiment,
    ExperimentInfo,
    ExperimentResult,
    RunContext,
    Table,
)
from src.physics.lattice import integrate
from src.physics.observables.modes import (
    hermite_gaussian_mode,
    projection_covariance,
    temporal_mode_energy,
)

CLOSED_FORM_TOLERANCE = 1e-10


class ModeEnergyExperiment(BaseExperiment):
    """
    ½⟨|X|²⟩ per mode for the vacuum and the squeezed field.

    The vacuum value must be P_SF/2 in units of ħω₀; the report carries
    the stated limit ½ beside it and flags the factor-of-two mismatch.
    Projections onto different modes must be uncorrelated.
    """

    def default_info(self) -> ExperimentInfo:
        return ExperimentInfo(
            name="ModeEnergy",
            description="Temporal-mode energy, closed form vs Monte Carlo, plus mode covariance",
            columns={
                "mode_energy": [
                    "mode",
                    "field",
                    "closed_form",
                    "monte_carlo",
                    "stderr",
                    "chain_value",
                    "stated_limit",
                ]
            },
            monte_carlo=True,
        )

    def _execute(self, context: RunContext) -> ExperimentResult:
        gain = context.gain
        spec = context.setup.noise
        mode_cfg = context.config.mode
        validation = context.config.validation
        bandwidth = context.setup.bandwidth
        lattice = gain.lattice
        result = ExperimentResult(name=self.name)
        table = Table(self.info.columns["mode_energy"])

        modes = [
            hermite_gaussian_mode(
                lattice,
                mode_cfg.width * bandwidth,
                order,
                mode_cfg.center_detuning * bandwidth,
            )
            for order in mode_cfg.orders
        ]
        fields = {"vacuum": None, "squeezed": gain}
        ensembles = {}
        if validation.include_monte_carlo:
            squeezed, _ = context.squeezed_pair(mode_cfg.n_realizations)
            ensembles = {"vacuum": context.vacuum(mode_cfg.n_realizations), "squeezed": squeezed}

        flagged = False
        for mode in modes:
            for name, profile in fields.items():
                closed = temporal_mode_energy(spec, mode, profile)
                flagged = flagged or closed.factor_of_two_flag
                mc_value, mc_stderr = np.nan, np.nan
                if name in ensembles:
                    mc = temporal_mode_energy(ensembles[name], mode)
                    mc_value, mc_stderr = mc.value, mc.stderr
                    z = abs(mc.value - closed.value) / mc.stderr
                    result.check(
                        f"{mode.label}_{name}_monte_carlo",
                        z <= validation.sigma,
                        z,
                        validation.sigma,
                    )
                if profile is None and spec.spectral_density is None:
                    chain = closed.chain_value
                    error = abs(closed.value - chain) / chain
                    result.check(
                        f"{mode.label}_vacuum_closed_form",
                        error <= CLOSED_FORM_TOLERANCE,
                        error,
                        CLOSED_FORM_TOLERANCE,
                        detail="P_SF/2 in units of hbar*omega0",
                    )
                table.add(
                    mode.label,
                    name,
                    closed.value,
                    mc_value,
                    mc_stderr,
                    closed.chain_value,
                    closed.stated_limit,
                )

        covariance: dict = {}
        if len(modes) > 1 and ensembles:
            for name, ensemble in ensembles.items():
                estimate = projection_covariance(ensemble, modes)
                density = spec.density(lattice)
                if name == "squeezed":
                    density = density * (np.abs(gain.f) ** 2 + gain.g_intensity)
                psi = np.stack([m.psi for m in modes])
                expected = np.array(
                    [[integrate(lattice, density * p * np.conj(q)) for q in psi] for p in psi]
                )
                off = ~np.eye(len(modes), dtype=bool)
                z = np.abs(estimate.values - expected)[off] / estimate.stderr[off]
                result.check(
                    f"{name}_modes_uncorrelated",
                    np.all(z <= validation.sigma),
                    float(np.max(z)),
                    validation.sigma,
                )
                covariance[name] = {
                    "values": np.real_if_close(estimate.values).tolist(),
                    "stderr": estimate.stderr.tolist(),
                }

        result.tables["mode_energy"] = table
        result.report = {
            "p_sf": spec.p_sf,
            "units": "hbar*omega0",
            "factor_of_two_flag": flagged,
            "leak": {m.label: m.leak for m in modes},
            "covariance": covariance,
        }
        return result


__all__ = ["ModeEnergyExperiment"]
