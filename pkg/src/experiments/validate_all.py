"""Run every validation suite and experiment against one shared context."""

import logging

from src.experiments.base import BaseExperiment, ExperimentInfo, ExperimentResult, RunContext
from src.experiments.registry import ExperimentRegistry

logger = logging.getLogger(__name__)

SUITE_ORDER = (
    "GainChecks",
    "GateChecks",
    "SamplerCalibration",
    "Spectrum",
    "Corr2",
    "Corr4Identity",
    "TpaScaling",
    "SfgSpectrum",
    "ModeEnergy",
)


class ValidateAllExperiment(BaseExperiment):
    """
    Every suite in SUITE_ORDER as a child result.

    Children share the context, so ensembles with the same realization
    count are sampled once. A failing child does not stop the others.
    """

    def __init__(self, registry: ExperimentRegistry, info: ExperimentInfo | None = None):
        super().__init__(info)
        self._registry = registry

    def default_info(self) -> ExperimentInfo:
        return ExperimentInfo(
            name="ValidateAll",
            description="All validation suites and cross-engine experiments",
            monte_carlo=True,
        )

    def _execute(self, context: RunContext) -> ExperimentResult:
        result = ExperimentResult(name=self.name)
        suites = SUITE_ORDER
        if not context.config.validation.include_monte_carlo:
            suites = tuple(name for name in SUITE_ORDER if name != "SamplerCalibration")
        for name in suites:
            logger.info(f"ValidateAll: running {name}")
            child = self._registry.execute(name, context)
            if child.error:
                logger.error(f"{name} errored: {child.error}")
            else:
                failed = [c.name for c in child.checks if not c.passed]
                if failed:
                    logger.warning(f"{name}: {len(failed)} check(s) failed: {', '.join(failed)}")
            result.children.append(child)
        result.report = {
            "suites": {
                c.name: ("ERROR" if not c.success else "PASS" if c.passed else "FAIL")
                for c in result.children
            }
        }
        return result


__all__ = ["SUITE_ORDER", "ValidateAllExperiment"]
