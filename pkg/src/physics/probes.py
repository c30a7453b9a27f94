"""Probe-pair and probe-quad families."""

from typing import Literal

import numpy as np

from src.physics.correlators import ProbePairs, ProbeQuads
from src.physics.errors import ParameterError
from src.physics.lattice import FrequencyLattice

QuadFamily = Literal["degenerate", "ridge", "coincident", "random"]
PairFamily = Literal["diagonal", "random", "mirror"]


def central_indices(lattice: FrequencyLattice, half_span: float = 0.5) -> np.ndarray:
    """Indices with |ω − ω₀| ≤ half_span·half_width."""
    if not 0.0 < half_span <= 1.0:
        raise ParameterError(f"half_span must be in (0, 1] (got {half_span})")
    reach = int(np.floor(half_span * lattice.center))
    return np.arange(lattice.center - reach, lattice.center + reach + 1)


def _spread(candidates: np.ndarray, count: int) -> np.ndarray:
    """`count` indices spread evenly over the candidates, center-symmetric when possible."""
    if count >= len(candidates):
        return candidates.copy()
    picks = np.round(np.linspace(0, len(candidates) - 1, count)).astype(int)
    return candidates[picks]


def degenerate_quads(
    lattice: FrequencyLattice, count: int, half_span: float = 0.5
) -> ProbeQuads:
    """(k, k, k, k); the first quad is always ω₀ four times."""
    idx = _spread(central_indices(lattice, half_span), count)
    idx = np.concatenate([[lattice.center], idx[idx != lattice.center]])[:count]
    return ProbeQuads(idx, idx, idx, idx, family="degenerate")


def ridge_quads(
    lattice: FrequencyLattice,
    count: int,
    seed: int = 0,
    half_span: float = 0.5,
    candidates: np.ndarray | None = None,
) -> ProbeQuads:
    """(a, 2ω₀−a, c, 2ω₀−c): both photon pairs on the anticorrelated ridge."""
    pool = central_indices(lattice, half_span) if candidates is None else np.asarray(candidates)
    rng = np.random.default_rng(seed)
    a = rng.choice(pool, size=count)
    c = rng.choice(pool, size=count)
    return ProbeQuads(a, lattice.mirror[a], c, lattice.mirror[c], family="ridge")


def coincident_quads(
    lattice: FrequencyLattice, count: int, half_span: float = 0.5
) -> ProbeQuads:
    """(ω, 2ω₀−ω, 2ω₀−ω, ω): the value is a photon-pair coincidence rate."""
    a = _spread(central_indices(lattice, half_span), count)
    mirror = lattice.mirror[a]
    return ProbeQuads(a, mirror, mirror, a, family="coincident")


def random_quads(
    lattice: FrequencyLattice, count: int, seed: int = 0, half_span: float = 0.5
) -> ProbeQuads:
    pool = central_indices(lattice, half_span)
    rng = np.random.default_rng(seed)
    a, b, c, d = (rng.choice(pool, size=count) for _ in range(4))
    return ProbeQuads(a, b, c, d, family="random")


def make_quads(
    lattice: FrequencyLattice,
    family: QuadFamily,
    count: int,
    seed: int = 0,
    half_span: float = 0.5,
) -> ProbeQuads:
    if count < 1:
        raise ParameterError(f"probe count must be >= 1 (got {count})")
    if family == "degenerate":
        return degenerate_quads(lattice, count, half_span)
    if family == "ridge":
        return ridge_quads(lattice, count, seed, half_span)
    if family == "coincident":
        return coincident_quads(lattice, count, half_span)
    if family == "random":
        return random_quads(lattice, count, seed, half_span)
    raise ParameterError(f"unknown quad family: {family}")


def make_pairs(
    lattice: FrequencyLattice,
    family: PairFamily,
    count: int,
    seed: int = 0,
    half_span: float = 0.5,
) -> ProbePairs:
    """diagonal: (k, k); mirror: (k, 2ω₀−k); random: independent draws."""
    if count < 1:
        raise ParameterError(f"probe count must be >= 1 (got {count})")
    pool = central_indices(lattice, half_span)
    if family == "diagonal":
        k = _spread(pool, count)
        return ProbePairs(k, k, family="diagonal")
    if family == "mirror":
        k = _spread(pool, count)
        return ProbePairs(k, lattice.mirror[k], family="mirror")
    if family == "random":
        rng = np.random.default_rng(seed)
        return ProbePairs(rng.choice(pool, size=count), rng.choice(pool, size=count), "random")
    raise ParameterError(f"unknown pair family: {family}")


__all__ = [
    "PairFamily",
    "QuadFamily",
    "central_indices",
    "coincident_quads",
    "degenerate_quads",
    "make_pairs",
    "make_quads",
    "random_quads",
    "ridge_quads",
]
