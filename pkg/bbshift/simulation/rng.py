"""
BBShift Seeded Random Streams

Every random draw in BBShift comes from numpy's Philox counter-based bit
generator keyed by ``SeedSequence(seed, spawn_key=path)``. A stream is a value:
building its generator twice replays the same draws, and ``substream(i)``
depends only on the seed and the path, so parallel work can be split up front
and results do not depend on execution order or machine.
"""

from dataclasses import dataclass
from typing import Tuple

import numpy as np

from bbshift.core.exceptions import InputDomainError

MAX_SEED = 2 ** 64 - 1


@dataclass(frozen=True)
class SeededRng:
    """Seed plus spawn path identifying one independent random stream."""

    seed: int
    path: Tuple[int, ...] = ()

    def __post_init__(self):
        if isinstance(self.seed, bool) or int(self.seed) != self.seed or not 0 <= self.seed <= MAX_SEED:
            raise InputDomainError(f"Seed must be an unsigned 64-bit integer, got {self.seed!r}")
        if any(int(i) < 0 for i in self.path):
            raise InputDomainError(f"Substream indices must be nonnegative, got {self.path}")
        object.__setattr__(self, "seed", int(self.seed))
        object.__setattr__(self, "path", tuple(int(i) for i in self.path))

    def substream(self, index: int) -> "SeededRng":
        """Child stream number ``index``."""
        return SeededRng(self.seed, self.path + (int(index),))

    def generator(self) -> np.random.Generator:
        """A fresh generator positioned at the start of this stream."""
        sequence = np.random.SeedSequence(self.seed, spawn_key=self.path)
        return np.random.Generator(np.random.Philox(sequence))

    def __str__(self) -> str:
        suffix = "/".join(str(i) for i in self.path)
        return f"{self.seed}/{suffix}" if suffix else str(self.seed)
