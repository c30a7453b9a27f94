"""
Experiment Registry - Central registry for all runnable experiments.

Holds both the user-selectable experiments and the validation suites
that ValidateAll composes.
"""

from typing import Any

from src.experiments.base import BaseExperiment, ExperimentResult, RunContext


class ExperimentRegistry:
    """Registry to manage available experiments by name."""

    def __init__(self) -> None:
        self._experiments: dict[str, BaseExperiment] = {}

    def register(self, experiment: BaseExperiment) -> None:
        """Register an experiment instance."""
        self._experiments[experiment.name] = experiment

    def get(self, name: str) -> BaseExperiment | None:
        """Get an experiment by name."""
        return self._experiments.get(name)

    def list_experiments(self) -> list[dict[str, Any]]:
        """List all experiment schemas."""
        return [e.to_schema() for e in self._experiments.values()]

    def list_experiment_names(self) -> list[str]:
        """List all registered experiment names."""
        return list(self._experiments.keys())

    def get_monte_carlo_experiments(self) -> list[BaseExperiment]:
        """Experiments that sample ensembles."""
        return [e for e in self._experiments.values() if e.info.monte_carlo]

    def execute(self, name: str, context: RunContext) -> ExperimentResult:
        """
        Execute an experiment by name.

        Args:
            name: Registered experiment name
            context: Shared run context

        Returns:
            ExperimentResult from the experiment
        """
        experiment = self.get(name)
        if not experiment:
            return ExperimentResult(name=name, error=f"Experiment '{name}' not found")
        return experiment.run(context)

    def __len__(self) -> int:
        return len(self._experiments)

    def __contains__(self, name: str) -> bool:
        return name in self._experiments


# Global registry instance
registry = ExperimentRegistry()


__all__ = ["ExperimentRegistry", "registry"]
