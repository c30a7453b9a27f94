"""Per-quad identity report between the QT and renormalized SF four-frequency correlators."""

import numpy as np

from src.experiments.base import (
    BaseExperiment,
    ExperimentInfo,
    ExperimentResult,
    RunContext,
    Table,
)
from src.physics.comparison import high_gain_agreement, identity_report
from src.physics.correlators import ProbeQuads
from src.physics.gain import GainParams, GainProfile, gain_profile
from src.physics.probes import make_quads, ridge_quads
from src.physics.sf_engine import PairingCorr4, corr4_sf_mc, renormalize

HIGH_GAIN_FAMILIES = ("degenerate", "ridge")
# high-gain probes stay where |g|^2 is within this fraction of its peak
HIGH_GAIN_CORE = 0.75


def _high_gain_quads(strong: GainProfile, family: str, count: int, seed: int) -> ProbeQuads:
    lattice = strong.lattice
    core = np.flatnonzero(strong.g_intensity >= HIGH_GAIN_CORE * strong.g_intensity[lattice.center])
    if family == "ridge":
        return ridge_quads(lattice, count, seed, candidates=core)
    picks = core[np.round(np.linspace(0, len(core) - 1, min(count, len(core)))).astype(int)]
    return ProbeQuads(picks, picks, picks, picks, family="degenerate")


class Corr4IdentityExperiment(BaseExperiment):
    """
    Identity check on every configured quad family.

    Per quad: QT value, SF closed value, SF renormalized value, Monte Carlo
    value ± stderr, the analytic residual and a PASS/FAIL verdict. The raw
    Monte Carlo tensor is also checked against the exact moment-theorem
    value of the gated lattice field, and the un-renormalized SF value
    against QT at high gain.
    """

    def default_info(self) -> ExperimentInfo:
        return ExperimentInfo(
            name="Corr4Identity",
            description="QT vs renormalized SF four-frequency correlators, quad by quad",
            columns={
                "corr4_identity": [
                    "family",
                    "a",
                    "b",
                    "c",
                    "d",
                    "qt_re",
                    "qt_im",
                    "sf_closed_re",
                    "sf_closed_im",
                    "sf_renorm_re",
                    "sf_renorm_im",
                    "mc_re",
                    "mc_im",
                    "mc_stderr",
                    "residual_re",
                    "residual_expected_re",
                    "coherent_error",
                    "residual_error",
                    "mc_sigma",
                    "verdict",
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
        table = Table(self.info.columns["corr4_identity"])
        records: list[dict] = []
        summaries: dict[str, dict] = {}

        pairs = context.gated_pair() if validation.include_monte_carlo else None
        exact = PairingCorr4(gain, kernel, p_sf, overlap="lattice")

        for family in probes_cfg.families:
            quads = make_quads(
                lattice, family, probes_cfg.count, probes_cfg.seed, probes_cfg.half_span
            )
            mc_renorm = None
            if pairs is not None:
                gated, baseline = pairs
                raw = corr4_sf_mc(gated, quads)
                mc_renorm = renormalize(raw, corr4_sf_mc(baseline, quads))
                reference = exact.evaluate(quads).values
                floor = validation.tolerance * float(np.max(np.abs(reference)))
                z = np.abs(raw.values - reference) / np.maximum(raw.stderr, floor)
                result.check(
                    f"moment_theorem_{family}",
                    np.all(z <= validation.sigma),
                    float(np.max(z)),
                    validation.sigma,
                    detail="raw Monte Carlo against the exact gated-lattice value",
                )

            report = identity_report(
                gain,
                kernel,
                quads,
                p_sf=p_sf,
                mc_renormalized=mc_renorm,
                tolerance=validation.tolerance,
                sigma=validation.sigma,
            )
            summary = report.summary()
            summaries[family] = summary
            result.check(
                f"identity_{family}",
                report.passed,
                max(summary["max_coherent_error"], summary["max_residual_error"]),
                validation.tolerance,
                detail=f"residual vanishes: {report.residual_vanishes}",
            )
            for r in report.records:
                records.append(r.to_dict())
                table.add(
                    r.family,
                    r.a,
                    r.b,
                    r.c,
                    r.d,
                    r.qt.real,
                    r.qt.imag,
                    r.sf_closed.real,
                    r.sf_closed.imag,
                    r.sf_renormalized.real,
                    r.sf_renormalized.imag,
                    np.nan if r.mc is None else r.mc.real,
                    np.nan if r.mc is None else r.mc.imag,
                    np.nan if r.mc_stderr is None else r.mc_stderr,
                    r.residual.real,
                    r.residual_expected.real,
                    r.coherent_error,
                    r.residual_error,
                    np.nan if r.mc_sigma is None else r.mc_sigma,
                    "PASS" if r.passed else "FAIL",
                )

        base = context.setup.gain_params
        strong = gain_profile(
            lattice,
            GainParams(
                gamma=validation.high_gain_gz / base.z,
                kappa=base.kappa,
                z=base.z,
                convention=base.convention,
                compensate_dispersion=base.compensate_dispersion,
            ),
        )
        high_gain = {}
        for family in HIGH_GAIN_FAMILIES:
            quads = _high_gain_quads(strong, family, probes_cfg.count, probes_cfg.seed)
            check = high_gain_agreement(strong, kernel, quads, p_sf)
            worst = float(np.max(check.relative_deviation))
            high_gain[family] = {"max_relative_deviation": worst, "bound": check.bound}
            result.check(f"high_gain_{family}", check.passed, worst, check.bound)

        result.tables["corr4_identity"] = table
        result.report = {
            "p_sf": p_sf,
            "families": summaries,
            "high_gain": high_gain,
            "gate_coherence": context.gate_coherence,
            "quads": records,
        }
        return result


__all__ = ["Corr4IdentityExperiment"]
