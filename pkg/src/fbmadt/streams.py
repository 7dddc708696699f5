"""Reproducible random substreams.

Every random draw in the package comes from a generator keyed by a master
seed plus a tuple of integer counters (level, unit, path index, ...).  The
key is hashed by :class:`numpy.random.SeedSequence`, so any two distinct
counter tuples yield statistically independent PCG64 streams and the result
never depends on the order or the thread in which streams are created.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1

# Domain tags keep streams of different subsystems apart for one master seed.
TAG_DATASET = 0x5D
TAG_PATHS = 0x7A
TAG_ER = 0x3C


def substream(master_seed: int, *counters: int) -> np.random.Generator:
    """Return the generator for ``(master_seed, *counters)``."""
    seq = np.random.SeedSequence(int(master_seed) & MASK64, spawn_key=tuple(int(c) for c in counters))
    return np.random.Generator(np.random.PCG64(seq))
