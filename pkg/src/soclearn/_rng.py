"""Deterministic per-replication random streams.

Each replication index gets its own counter-based stream spawned from the
master seed, so results are identical no matter how replications are
batched across worker processes.
"""

from __future__ import annotations

import numpy as np


def substream(master_seed: int, index: int) -> np.random.Generator:
    seq = np.random.SeedSequence(entropy=int(master_seed), spawn_key=(int(index),))
    return np.random.Generator(np.random.Philox(seq))


def uniform_block(master_seed: int, start: int, count: int, periods: int) -> np.ndarray:
    """Draw layout U[count, periods + 1, 4] with one substream per replication."""
    out = np.empty((count, periods + 1, 4))
    for i in range(count):
        out[i] = substream(master_seed, start + i).random((periods + 1, 4))
    return out
