"""
Result types shared by the quantum and stochastic-field engines.

Correlators are evaluated on probe sets (pairs or quads of lattice
indices), never as full tensors. Four-frequency closed forms share one
structure, a coherent term conj(h_a)·h_c·D(2ω₀−ω_a−ω_b)·D(2ω₀−ω_c−ω_d)
plus an incoherent term w(a, b)·[D(ω_b−ω_c)D(ω_a−ω_d) + ξ·D(ω_a−ω_c)D(ω_b−ω_d)],
which Corr4Model captures so that quadratures can exploit it.
"""

import hashlib
from collections.abc import Iterator
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Protocol

import numpy as np

from src.physics.errors import ConfigurationMismatchError, LatticeError
from src.physics.gate import GateKernel
from src.physics.lattice import FrequencyLattice


class Provenance(str, Enum):
    QT_CLOSED_FORM = "qt_closed_form"
    SF_CLOSED_FORM = "sf_closed_form"
    SF_MONTE_CARLO = "sf_monte_carlo"
    SF_RENORMALIZED = "sf_renormalized"
    IDENTITY_RESIDUAL = "identity_residual"


def _digest(*arrays: np.ndarray) -> str:
    h = hashlib.sha256()
    for arr in arrays:
        h.update(np.ascontiguousarray(arr, dtype=np.int64).tobytes())
    return h.hexdigest()[:16]


@dataclass(frozen=True, eq=False)
class ProbePairs:
    """Index pairs (j, k) standing for (ω_j, ω_k)."""

    j: np.ndarray
    k: np.ndarray
    family: str = "custom"

    def __post_init__(self) -> None:
        j = np.asarray(self.j, dtype=np.int64)
        k = np.asarray(self.k, dtype=np.int64)
        if j.shape != k.shape or j.ndim != 1:
            raise ValueError("pair index arrays must be 1-d and of equal length")
        object.__setattr__(self, "j", j)
        object.__setattr__(self, "k", k)

    def __len__(self) -> int:
        return len(self.j)

    @property
    def key(self) -> str:
        return _digest(self.j, self.k)

    def swapped(self) -> "ProbePairs":
        return ProbePairs(self.k, self.j, family=self.family)

    def validate(self, lattice: FrequencyLattice) -> None:
        for idx in (self.j, self.k):
            if len(idx) and (idx.min() < 0 or idx.max() >= lattice.n_points):
                raise LatticeError("probe pair index outside the lattice")


@dataclass(frozen=True, eq=False)
class ProbeQuads:
    """Index quads (a, b, c, d) for ⟨c*(ω_a) c*(ω_b) c(ω_c) c(ω_d)⟩."""

    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    d: np.ndarray
    family: str = "custom"

    def __post_init__(self) -> None:
        arrays = [np.asarray(x, dtype=np.int64) for x in (self.a, self.b, self.c, self.d)]
        if len({arr.shape for arr in arrays}) != 1 or arrays[0].ndim != 1:
            raise ValueError("quad index arrays must be 1-d and of equal length")
        for name, arr in zip("abcd", arrays, strict=True):
            object.__setattr__(self, name, arr)

    def __len__(self) -> int:
        return len(self.a)

    @property
    def key(self) -> str:
        return _digest(self.a, self.b, self.c, self.d)

    def as_array(self) -> np.ndarray:
        return np.stack([self.a, self.b, self.c, self.d], axis=1)

    def swap_ab(self) -> "ProbeQuads":
        return ProbeQuads(self.b, self.a, self.c, self.d, family=self.family)

    def swap_cd(self) -> "ProbeQuads":
        return ProbeQuads(self.a, self.b, self.d, self.c, family=self.family)

    def validate(self, lattice: FrequencyLattice) -> None:
        for idx in (self.a, self.b, self.c, self.d):
            if len(idx) and (idx.min() < 0 or idx.max() >= lattice.n_points):
                raise LatticeError("probe quad index outside the lattice")

    def concat(self, other: "ProbeQuads") -> "ProbeQuads":
        return ProbeQuads(
            np.concatenate([self.a, other.a]),
            np.concatenate([self.b, other.b]),
            np.concatenate([self.c, other.c]),
            np.concatenate([self.d, other.d]),
            family=f"{self.family}+{other.family}",
        )


@dataclass(frozen=True)
class Lineage:
    """
    Everything a Monte Carlo estimate depends on apart from the gain.

    Two estimates may be subtracted (common random numbers) only when
    their lineages are equal.
    """

    seed: int
    n_realizations: int
    p_sf: float
    lattice: FrequencyLattice
    duration: float | None = None
    probes: str | None = None

    def require_match(self, other: "Lineage") -> None:
        if self != other:
            diffs = [
                name
                for name in ("seed", "n_realizations", "p_sf", "lattice", "duration", "probes")
                if getattr(self, name) != getattr(other, name)
            ]
            raise ConfigurationMismatchError(
                f"Monte Carlo inputs do not share a lineage (differ in: {', '.join(diffs)})"
            )


@dataclass
class Corr2Result:
    """Two-frequency correlator on a set of probe pairs."""

    lattice: FrequencyLattice
    pairs: ProbePairs
    values: np.ndarray
    provenance: Provenance
    stderr: np.ndarray | None = None
    samples: np.ndarray | None = None  # (R, n_pairs) per-realization products
    lineage: Lineage | None = None

    def to_dict(self) -> dict[str, Any]:
        return {
            "provenance": self.provenance.value,
            "j": self.pairs.j.tolist(),
            "k": self.pairs.k.tolist(),
            "re": self.values.real.tolist(),
            "im": self.values.imag.tolist(),
            "stderr": None if self.stderr is None else self.stderr.tolist(),
        }


@dataclass
class Corr4Tensor:
    """Four-frequency correlator on a set of probe quads, with per-term breakdown."""

    quads: ProbeQuads
    values: np.ndarray
    provenance: Provenance
    terms: dict[str, np.ndarray] = field(default_factory=dict)
    xi: int | None = None
    stderr: np.ndarray | None = None
    samples: np.ndarray | None = None  # (R, n_quads)
    lineage: Lineage | None = None

    def term(self, name: str) -> np.ndarray:
        if name not in self.terms:
            raise KeyError(
                f"term '{name}' not available for {self.provenance.value}; "
                f"have {sorted(self.terms)}"
            )
        return self.terms[name]


@dataclass
class MonteCarloEstimate:
    """Mean over realizations of a per-realization statistic."""

    values: np.ndarray
    stderr: np.ndarray
    samples: np.ndarray  # (R, ...) per-realization values
    lineage: Lineage
    provenance: Provenance = Provenance.SF_MONTE_CARLO
    label: str = ""

    def to_dict(self) -> dict[str, Any]:
        return {
            "label": self.label,
            "provenance": self.provenance.value,
            "values": np.real_if_close(self.values).tolist(),
            "stderr": self.stderr.tolist(),
        }


class PairWeight(Protocol):
    def __call__(self, a: np.ndarray, b: np.ndarray) -> np.ndarray: ...


@dataclass(frozen=True, eq=False)
class ProductWeight:
    """w(a, b) = w_a·w_b."""

    w: np.ndarray

    def __call__(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return self.w[a] * self.w[b]


@dataclass(frozen=True, eq=False)
class MeanWeight:
    """w(a, b) = (w_a + w_b)/2."""

    w: np.ndarray

    def __call__(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return 0.5 * (self.w[a] + self.w[b])


@dataclass(frozen=True, eq=False)
class Corr4Model:
    """
    Structured closed-form four-frequency correlator.

    `coherent_amplitude` is h with coherent term conj(h_a)·h_c·D·D;
    `pair_weight` scales the incoherent pairings; `exchange` is the
    weight of the second pairing (ξ for QT, one for SF).
    """

    kernel: GateKernel
    coherent_amplitude: np.ndarray
    pair_weight: PairWeight
    exchange: float
    provenance: Provenance
    term_names: tuple[str, str] = ("coherent", "incoherent")

    @property
    def lattice(self) -> FrequencyLattice:
        return self.kernel.lattice

    def components(self) -> Iterator[tuple[float, "Corr4Model"]]:
        yield 1.0, self

    def coherent(self, a: np.ndarray, b: np.ndarray, c: np.ndarray, d: np.ndarray) -> np.ndarray:
        h = self.coherent_amplitude
        k = self.kernel
        return np.conj(h[a]) * h[c] * k.sum_frequency(a, b) * k.sum_frequency(c, d)

    def incoherent(
        self, a: np.ndarray, b: np.ndarray, c: np.ndarray, d: np.ndarray
    ) -> np.ndarray:
        k = self.kernel
        pairing = k.between(b, c) * k.between(a, d) + self.exchange * k.between(
            a, c
        ) * k.between(b, d)
        return self.pair_weight(a, b) * pairing

    def evaluate(self, quads: ProbeQuads) -> Corr4Tensor:
        quads.validate(self.lattice)
        a, b, c, d = quads.a, quads.b, quads.c, quads.d
        first = self.coherent(a, b, c, d)
        second = self.incoherent(a, b, c, d).astype(complex)
        name1, name2 = self.term_names
        return Corr4Tensor(
            quads=quads,
            values=first + second,
            provenance=self.provenance,
            terms={name1: first, name2: second},
            xi=int(self.exchange) if self.provenance is Provenance.QT_CLOSED_FORM else None,
        )


@dataclass(frozen=True, eq=False)
class CompositeCorr4Model:
    """Linear combination of structured models (used for g = 0 subtraction)."""

    parts: tuple[tuple[float, Corr4Model], ...]
    provenance: Provenance = Provenance.SF_RENORMALIZED

    def __post_init__(self) -> None:
        durations = {m.kernel.duration for _, m in self.parts}
        lattices = {m.lattice for _, m in self.parts}
        if len(durations) != 1 or len(lattices) != 1:
            raise ConfigurationMismatchError(
                "composite model mixes gate kernels or lattices"
            )

    @property
    def kernel(self) -> GateKernel:
        return self.parts[0][1].kernel

    @property
    def lattice(self) -> FrequencyLattice:
        return self.kernel.lattice

    @property
    def term_names(self) -> tuple[str, str]:
        return self.parts[0][1].term_names

    def components(self) -> Iterator[tuple[float, Corr4Model]]:
        yield from self.parts

    def evaluate(self, quads: ProbeQuads) -> Corr4Tensor:
        name1, name2 = self.term_names
        total = np.zeros(len(quads), dtype=complex)
        first = np.zeros(len(quads), dtype=complex)
        second = np.zeros(len(quads), dtype=complex)
        for coef, model in self.parts:
            t = model.evaluate(quads)
            total += coef * t.values
            first += coef * t.terms[model.term_names[0]]
            second += coef * t.terms[model.term_names[1]]
        return Corr4Tensor(
            quads=quads,
            values=total,
            provenance=self.provenance,
            terms={name1: first, name2: second},
        )


StructuredCorr4 = Corr4Model | CompositeCorr4Model


__all__ = [
    "CompositeCorr4Model",
    "Corr2Result",
    "Corr4Model",
    "Corr4Tensor",
    "Lineage",
    "MeanWeight",
    "MonteCarloEstimate",
    "PairWeight",
    "ProbePairs",
    "ProbeQuads",
    "ProductWeight",
    "Provenance",
    "StructuredCorr4",
]
