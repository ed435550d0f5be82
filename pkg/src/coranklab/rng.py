"""Seeded random streams.

Every random quantity in the lab is drawn from numpy's PCG64 bit
generator, seeded through ``numpy.random.SeedSequence``.  Derived
streams (one per Monte Carlo chunk) come from ``SeedSequence(seed,
spawn_key=(index, ...))``, so a master seed plus a chunk index pins the
stream regardless of how chunks are distributed over workers.  The
(generator, derivation) pair is a compatibility promise; changing
either is a breaking change and must bump GENERATOR_VERSION.
"""

from __future__ import annotations

import numpy as np

GENERATOR_VERSION = "pcg64-seedseq-1"

_U64 = 1 << 64


def _check_seed(seed: int) -> int:
    if not isinstance(seed, (int, np.integer)):
        raise TypeError(f"seed must be an integer, got {type(seed).__name__}")
    if not 0 <= int(seed) < _U64:
        raise ValueError("seed must fit in an unsigned 64-bit value")
    return int(seed)


def generator(seed: int, *key: int) -> np.random.Generator:
    """PCG64 generator for ``seed``, optionally split by a spawn key."""
    ss = np.random.SeedSequence(_check_seed(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.PCG64(ss))


def bernoulli_bits(rng: np.random.Generator, shape, p: float) -> np.ndarray:
    """i.i.d. Ber(p) 0/1 entries as uint8.

    One 53-bit uniform per entry, compared against p; the induced bias
    is below 2**-53 and irrelevant next to Monte Carlo error.
    """
    return (rng.random(shape) < p).astype(np.uint8)
