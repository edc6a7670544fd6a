"""Counter-based, splittable random streams.

Every random draw in the library comes from ``substream(seed, *labels)``: a
Philox generator keyed by the user seed and a spawn key derived from the
labels. Two calls with the same arguments give the same stream no matter
which thread, process or order they run in.
"""

from __future__ import annotations

import hashlib
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Sequence, TypeVar

import numpy as np

MASK64 = (1 << 64) - 1

#: Replicates are simulated in blocks of this size, one substream per block.
BLOCK_SIZE = 8192

T = TypeVar("T")


def _label_word(label: int | str) -> int:
    if isinstance(label, (int, np.integer)) and not isinstance(label, bool):
        if label < 0:
            raise ValueError("integer stream labels must be non-negative")
        return int(label) & MASK64
    digest = hashlib.blake2b(str(label).encode(), digest_size=8).digest()
    return int.from_bytes(digest, "little")


def substream(seed: int, *labels: int | str) -> np.random.Generator:
    """Return the generator for ``(seed, labels)``."""
    ss = np.random.SeedSequence(
        entropy=int(seed) & MASK64, spawn_key=tuple(_label_word(x) for x in labels)
    )
    return np.random.Generator(np.random.Philox(ss))


def block_sizes(replicates: int, block: int = BLOCK_SIZE) -> list[int]:
    full, rest = divmod(replicates, block)
    return [block] * full + ([rest] if rest else [])


def run_blocks(
    fn: Callable[[np.random.Generator, int], T],
    replicates: int,
    seed: int,
    label: str,
    workers: int = 1,
) -> list[T]:
    """Apply ``fn(rng, size)`` to each replicate block and return results in block order.

    Block ``i`` always uses ``substream(seed, label, i)``, so the combined
    output does not depend on ``workers``.
    """
    sizes = block_sizes(replicates)
    jobs = [(substream(seed, label, i), size) for i, size in enumerate(sizes)]
    if workers <= 1 or len(jobs) <= 1:
        return [fn(rng, size) for rng, size in jobs]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda job: fn(*job), jobs))


def concat(parts: Sequence[np.ndarray]) -> np.ndarray:
    if not parts:
        return np.empty(0)
    return np.concatenate(parts)
