"""Seeded random streams with independent indexed sub-streams."""

import logging
from typing import Tuple

import numpy as np

logger = logging.getLogger(__name__)

MAX_SEED = 2**64


class RandomStream:
    """
    numpy Generator seeded from (seed, path).

    ``substream(i)`` extends the path, so the same seed and index always give
    the same sequence no matter which process draws from it.
    """

    def __init__(self, seed: int, path: Tuple[int, ...] = ()):
        if not 0 <= seed < MAX_SEED:
            raise ValueError(f"Seed must fit in 64 bits, got {seed}")
        self.seed = int(seed)
        self.path = tuple(int(i) for i in path)
        self.generator = np.random.Generator(np.random.PCG64(np.random.SeedSequence(self.seed, spawn_key=self.path)))

    def substream(self, *index: int) -> "RandomStream":
        return RandomStream(self.seed, self.path + tuple(index))

    def integers(self, low, high=None, size=None):
        return self.generator.integers(low, high, size=size)

    def random(self, size=None):
        return self.generator.random(size)

    def randbelow(self, bound: int) -> int:
        """Uniform integer in [0, bound) for arbitrarily large ``bound``."""
        if bound < 1:
            raise ValueError(f"Bound must be >= 1, got {bound}")
        bits = (bound - 1).bit_length()
        if bits == 0:
            return 0
        nbytes = (bits + 7) // 8
        while True:
            value = int.from_bytes(self.generator.bytes(nbytes), "little") >> (8 * nbytes - bits)
            if value < bound:
                return value

    def __repr__(self) -> str:
        return f"RandomStream(seed={self.seed}, path={self.path})"
