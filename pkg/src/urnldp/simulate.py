"""Monte Carlo sampling of urn paths.

Streams: a run with seed ``S`` derives every random stream from
``numpy.random.SeedSequence(S)``.  Single paths (``sample_path(..., trial=i)``)
use child ``i``.  Ensembles are processed in blocks of ``BLOCK`` trials and
block ``b`` uses child ``b``, so results do not depend on the worker count.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import UrnValidationError
from .exact import Init, UrnLike, _normalise_init, _resolve

BLOCK = 1 << 16


def worker_count() -> int:
    """Thread cap from ``URNLDP_THREADS`` (default: CPU count)."""
    raw = os.environ.get("URNLDP_THREADS")
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            pass
    return os.cpu_count() or 1


def _stream(seed: int, index: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(index,))))


@dataclass(frozen=True)
class PathSample:
    n: int
    counts: np.ndarray  # X_k for k = start..n
    seed: int
    start: int = 1

    def __post_init__(self):
        steps = np.diff(self.counts)
        k = np.arange(self.start, self.n + 1)
        if np.any((steps != 0) & (steps != 1)) or np.any(self.counts < 0) or np.any(self.counts > k):
            raise UrnValidationError("inadmissible path", ["increments must be 0/1 and 0 <= X_k <= k"])


def _initial(init: Init, n: int, rng: np.random.Generator, size: int) -> tuple[int, np.ndarray]:
    start, row, label = _normalise_init(init, n)
    if label == "uniform":
        return 1, rng.integers(0, 2, size=size)
    return start, np.full(size, label[1], dtype=np.int64)


def sample_path(u: UrnLike, n: int, seed: int, init: Init = "uniform", trial: int = 0) -> PathSample:
    """One path of the urn counter; for a family ``n -> urn`` the member for ``n`` is used."""
    urn = _resolve(u, n)
    rng = _stream(seed, trial)
    start, x0 = _initial(init, n, rng, 1)
    draws = rng.random(n - start)
    counts = np.empty(n - start + 1, dtype=np.int64)
    x = int(x0[0])
    counts[0] = x
    for i, k in enumerate(range(start, n)):
        x += int(draws[i] < urn(x / k))
        counts[i + 1] = x
    return PathSample(n, counts, seed, start)


def _block(urn, n: int, init: Init, seed: int, index: int, size: int) -> np.ndarray:
    rng = _stream(seed, index)
    start, x = _initial(init, n, rng, size)
    x = x.astype(np.int64)
    for k in range(start, n):
        x += rng.random(size) < urn(x / k)
    return np.bincount(x, minlength=n + 1)


def empirical_terminal(u: UrnLike, n: int, trials: int, seed: int, init: Init = "uniform") -> np.ndarray:
    """Histogram (length ``n + 1``) of the terminal count over ``trials`` independent paths."""
    if trials < 1:
        raise UrnValidationError("invalid trial count", [f"trials must be >= 1, got {trials}"])
    urn = _resolve(u, n)
    sizes = [min(BLOCK, trials - b * BLOCK) for b in range((trials + BLOCK - 1) // BLOCK)]
    workers = min(worker_count(), len(sizes))
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(lambda b: _block(urn, n, init, seed, b, sizes[b]), range(len(sizes))))
    else:
        parts = [_block(urn, n, init, seed, b, size) for b, size in enumerate(sizes)]
    return np.sum(parts, axis=0)


def total_variation(counts: np.ndarray, p: np.ndarray) -> float:
    return 0.5 * float(np.sum(np.abs(counts / counts.sum() - p)))
