"""Seedable, splittable random-number streams.

Streams are identified by (master seed, counter path). The 128-bit Philox
key of a stream is the SHA-256 digest of that identity, so distinct paths
map to distinct counter-based generators and replicate b of a bootstrap or
cell g of a Monte Carlo grid is addressable as (seed, [g, b]) without any
sequential state.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import numpy as np

__all__ = ["SeedStream", "split", "standard_normal"]


def _philox_key(seed: int, path: tuple[int, ...]) -> np.ndarray:
    ident = repr((int(seed), tuple(int(i) for i in path))).encode()
    digest = hashlib.sha256(ident).digest()
    return np.frombuffer(digest[:16], dtype=np.uint64)


@dataclass(frozen=True)
class SeedStream:
    """A reproducible random stream addressed by (seed, path)."""

    seed: int
    path: tuple[int, ...] = field(default_factory=tuple)

    def split(self, index: int) -> "SeedStream":
        """Child stream for a replicate / grid-cell index."""
        if index < 0:
            raise ValueError("split index must be non-negative")
        return SeedStream(self.seed, self.path + (int(index),))

    def key(self) -> np.ndarray:
        """128-bit Philox key identifying this stream."""
        return _philox_key(self.seed, self.path)

    def generator(self) -> np.random.Generator:
        """Fresh numpy Generator positioned at the start of the stream."""
        return np.random.Generator(np.random.Philox(key=self.key()))

    def standard_normal(self, n: int) -> np.ndarray:
        """n i.i.d. N(0, 1) draws from the start of the stream."""
        if n < 1:
            raise ValueError("n must be at least 1")
        return self.generator().standard_normal(n)


def split(stream: SeedStream, index: int) -> SeedStream:
    return stream.split(index)


def standard_normal(stream: SeedStream, n: int) -> np.ndarray:
    return stream.standard_normal(n)
