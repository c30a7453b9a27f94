"""
Reproducible random streams and Monte Carlo error bars.

Realization r of a run with master seed S always draws from
Philox(key=S, counter=[0, 0, r, 0]), so any subset of realizations can be
regenerated on its own and the result never depends on how realizations
are split across workers. Work is cut into fixed-size blocks that joblib
hands to workers; blocks come back in order and are concatenated before
any reduction.
"""

import logging
from collections.abc import Callable
from typing import Literal

import numpy as np
from joblib import Parallel, delayed

from src.physics.errors import InsufficientRealizationsError, ParameterError

logger = logging.getLogger(__name__)

Backend = Literal["loky", "threading", "sequential"]

MAX_SEED = 2**64 - 1


def realization_rng(seed: int, realization: int) -> np.random.Generator:
    """Independent generator for one realization."""
    if not 0 <= seed <= MAX_SEED:
        raise ParameterError(f"seed must be a 64-bit unsigned integer (got {seed})")
    bit_gen = np.random.Philox(key=seed, counter=[0, 0, realization, 0])
    return np.random.Generator(bit_gen)


def complex_normal_block(
    seed: int, start: int, stop: int, n_points: int, scale: float
) -> np.ndarray:
    """
    Rows start..stop−1 of a complex Gaussian ensemble.

    Each entry is scale·(x + iy)/√2 with x, y standard normal, so
    E|a|² = scale² and E[a·a] = 0.
    """
    block = np.empty((stop - start, n_points), dtype=complex)
    for row, r in enumerate(range(start, stop)):
        xy = realization_rng(seed, r).standard_normal((2, n_points))
        block[row] = (xy[0] + 1j * xy[1]) * (scale / np.sqrt(2.0))
    return block


def block_ranges(n_realizations: int, block_size: int) -> list[tuple[int, int]]:
    """Fixed partition of 0..R−1; independent of the worker count."""
    if block_size < 1:
        raise ParameterError(f"block_size must be >= 1 (got {block_size})")
    return [
        (start, min(start + block_size, n_realizations))
        for start in range(0, n_realizations, block_size)
    ]


def run_blocks(
    task: Callable[[int, int], np.ndarray],
    n_realizations: int,
    block_size: int = 512,
    workers: int = 1,
    backend: Backend = "loky",
) -> np.ndarray:
    """
    Evaluate task(start, stop) for every block and stack the results.

    The output is bit-identical for any number of workers: each block is a
    pure function of its realization range and blocks are joined in order.
    """
    ranges = block_ranges(n_realizations, block_size)
    if workers <= 1 or backend == "sequential" or len(ranges) == 1:
        parts = [task(start, stop) for start, stop in ranges]
    else:
        logger.debug(f"Dispatching {len(ranges)} blocks to {workers} {backend} workers")
        parts = Parallel(n_jobs=workers, backend=backend)(
            delayed(task)(start, stop) for start, stop in ranges
        )
    return np.concatenate(parts, axis=0)


def jackknife_mean(samples: np.ndarray, block_size: int = 1) -> tuple[np.ndarray, np.ndarray]:
    """
    Mean over axis 0 with a delete-one-block jackknife standard error.

    Works on any trailing shape. For complex samples the error is
    sqrt(se_re² + se_im²). A short final block absorbs the remainder.
    """
    data = np.asarray(samples)
    n = data.shape[0]
    if n < 2:
        raise InsufficientRealizationsError(f"need at least 2 realizations (got {n})")
    size = block_size if n // block_size >= 2 else 1
    n_blocks = n // size
    edges = np.append(np.arange(n_blocks) * size, n)
    block_sums = np.add.reduceat(data, edges[:-1], axis=0)
    counts = np.diff(edges).reshape((-1,) + (1,) * (data.ndim - 1))
    total = data.sum(axis=0)
    mean = total / n
    leave_out = (total[None, ...] - block_sums) / (n - counts)
    spread = np.abs(leave_out - leave_out.mean(axis=0)) ** 2
    variance = (n_blocks - 1) / n_blocks * spread.sum(axis=0)
    return mean, np.sqrt(variance)


def require_realizations(n_realizations: int, minimum: int, what: str) -> None:
    if n_realizations < minimum:
        raise InsufficientRealizationsError(
            f"{what} needs at least {minimum} realizations (got {n_realizations})"
        )


__all__ = [
    "MAX_SEED",
    "block_ranges",
    "complex_normal_block",
    "jackknife_mean",
    "realization_rng",
    "require_realizations",
    "run_blocks",
]
