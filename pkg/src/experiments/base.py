"""
Base classes for the experiment interface.

Every experiment the runner can execute (and every validation suite
ValidateAll composes) implements BaseExperiment, so the loop drives them
all the same way and gets a uniform ExperimentResult back.
"""

import time
from abc import ABC, abstractmethod
from dataclasses import dataclass, field, replace
from typing import Any

import numpy as np

from src.physics.gain import GainProfile, gain_profile
from src.physics.gate import COHERENCE_THRESHOLD
from src.physics.sampling import Backend
from src.physics.sf_engine import FieldEnsemble, crn_pair, gate, sample_vacuum
from src.runner.parser import ExperimentConfig, Setup


@dataclass
class ExperimentInfo:
    """Static description of an experiment."""

    name: str
    description: str
    columns: dict[str, list[str]] = field(default_factory=dict)  # CSV schema per table
    monte_carlo: bool = False  # whether it samples ensembles


@dataclass
class Check:
    """One PASS/FAIL assertion with the numbers behind it."""

    name: str
    passed: bool
    value: float | None = None
    bound: float | None = None
    detail: str = ""

    def to_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "verdict": "PASS" if self.passed else "FAIL",
            "value": self.value,
            "bound": self.bound,
            "detail": self.detail,
        }


@dataclass
class Table:
    """Rows destined for one CSV file."""

    columns: list[str]
    rows: list[list[Any]] = field(default_factory=list)

    def add(self, *values: Any) -> None:
        if len(values) != len(self.columns):
            raise ValueError(f"row has {len(values)} values, table has {len(self.columns)} columns")
        self.rows.append(list(values))


@dataclass
class ExperimentResult:
    """
    Standardized result from any experiment.

    `report` is the JSON payload, `tables` become CSV files. Timing is
    kept out of both so repeated runs write identical files.
    """

    name: str
    tables: dict[str, Table] = field(default_factory=dict)
    report: dict[str, Any] = field(default_factory=dict)
    checks: list[Check] = field(default_factory=list)
    children: list["ExperimentResult"] = field(default_factory=list)
    error: str | None = None
    exception: BaseException | None = field(default=None, repr=False)
    latency_ms: float = 0.0

    @property
    def success(self) -> bool:
        """Check if the experiment ran to completion."""
        return self.error is None and all(c.success for c in self.children)

    @property
    def passed(self) -> bool:
        """All checks (and all children's checks) PASS."""
        return (
            self.success
            and all(c.passed for c in self.checks)
            and all(c.passed for c in self.children)
        )

    def check(
        self,
        name: str,
        passed: bool | np.bool_,
        value: float | None = None,
        bound: float | None = None,
        detail: str = "",
    ) -> Check:
        item = Check(
            name=name,
            passed=bool(passed),
            value=None if value is None else float(value),
            bound=None if bound is None else float(bound),
            detail=detail,
        )
        self.checks.append(item)
        return item

    def to_dict(self) -> dict[str, Any]:
        """Convert to dictionary for the JSON report."""
        return {
            "name": self.name,
            "verdict": "PASS" if self.passed else "FAIL",
            "error": self.error,
            "error_type": None if self.exception is None else type(self.exception).__name__,
            "checks": [c.to_dict() for c in self.checks],
            "report": self.report,
            "children": [c.to_dict() for c in self.children],
        }


@dataclass
class RunContext:
    """
    Shared state for one run: config, engine objects and cached ensembles.

    Ensembles are cached by realization count so several experiments in a
    ValidateAll run reuse the same noise.
    """

    config: ExperimentConfig
    setup: Setup
    workers: int = 1
    block_size: int = 512
    backend: Backend = "loky"
    _cache: dict[Any, Any] = field(default_factory=dict, repr=False)

    @property
    def gain(self) -> GainProfile:
        if "gain" not in self._cache:
            self._cache["gain"] = gain_profile(self.setup.lattice, self.setup.gain_params)
        return self._cache["gain"]

    @property
    def gate_coherence(self) -> dict[str, Any]:
        """Gate length against the coherence time of the light; warns once per run."""
        if "coherence" not in self._cache:
            kernel = self.setup.kernel
            intensity = self.gain.g_intensity
            self._cache["coherence"] = {
                "long_gate": kernel.check_coherence(intensity),
                "duration_x_width": kernel.coherence_product(intensity),
                "threshold": COHERENCE_THRESHOLD,
            }
        return self._cache["coherence"]

    def vacuum(self, n_realizations: int | None = None) -> FieldEnsemble:
        spec = self.setup.noise
        if n_realizations is not None:
            spec = replace(spec, n_realizations=n_realizations)
        key = ("vacuum", spec.n_realizations)
        if key not in self._cache:
            self._cache[key] = sample_vacuum(
                self.setup.lattice, spec, self.workers, self.block_size, self.backend
            )
        return self._cache[key]

    def gated_pair(self, n_realizations: int | None = None) -> tuple[FieldEnsemble, FieldEnsemble]:
        """Gated ensembles with g and with g = 0 over the same noise."""
        vacuum = self.vacuum(n_realizations)
        key = ("gated", vacuum.n_realizations)
        if key not in self._cache:
            self._cache[key] = crn_pair(gate(vacuum, self.setup.kernel), self.gain)
        return self._cache[key]

    def squeezed_pair(
        self, n_realizations: int | None = None
    ) -> tuple[FieldEnsemble, FieldEnsemble]:
        """Ungated squeezed ensembles with g and with g = 0 over the same noise."""
        vacuum = self.vacuum(n_realizations)
        key = ("squeezed", vacuum.n_realizations)
        if key not in self._cache:
            self._cache[key] = crn_pair(vacuum, self.gain)
        return self._cache[key]


class BaseExperiment(ABC):
    """Abstract base class for experiments and validation suites."""

    def __init__(self, info: ExperimentInfo | None = None):
        if info:
            self.info = info
        else:
            self.info = self.default_info()

    @property
    def name(self) -> str:
        return self.info.name

    @property
    def description(self) -> str:
        return self.info.description

    @abstractmethod
    def default_info(self) -> ExperimentInfo:
        """Return the default description of this experiment."""
        pass

    @abstractmethod
    def _execute(self, context: RunContext) -> ExperimentResult:
        """Do the work; may raise, run() turns exceptions into result errors."""
        pass

    def run(self, context: RunContext) -> ExperimentResult:
        return self._measure_execution(self._execute, context)

    def to_schema(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "description": self.description,
            "columns": self.info.columns,
            "monte_carlo": self.info.monte_carlo,
        }

    def _measure_execution(self, func: Any, context: RunContext) -> ExperimentResult:
        start_time = time.perf_counter()
        try:
            result = func(context)
            result.latency_ms = (time.perf_counter() - start_time) * 1000
            return result
        except Exception as e:
            return ExperimentResult(
                name=self.name,
                error=str(e),
                exception=e,
                latency_ms=(time.perf_counter() - start_time) * 1000,
            )

    def __repr__(self) -> str:
        return f"{self.__class__.__name__}(name={self.name}, monte_carlo={self.info.monte_carlo})"
