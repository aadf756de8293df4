# Licensed under the MIT License.

"""Splittable, reproducible random streams."""

from dataclasses import dataclass

import numpy as np

# Purpose tags keep sub-streams for different pipeline stages disjoint.
PURPOSE_CHAIN = 1
PURPOSE_DROPOUT = 2
PURPOSE_FCS = 3
PURPOSE_SIMULATION = 4
PURPOSE_INIT = 5


@dataclass(frozen=True)
class RngStream:
    """A (seed, stream id) pair that names an independent numpy generator.

    Generators are built from ``SeedSequence(seed, spawn_key=stream)``, so the
    same pair always reproduces the same draws, and distinct stream ids give
    statistically independent generators.
    """

    seed: int
    stream: tuple[int, ...] = ()

    def child(self, *key: int) -> "RngStream":
        return RngStream(self.seed, self.stream + tuple(int(k) for k in key))

    def generator(self) -> np.random.Generator:
        sequence = np.random.SeedSequence(self.seed, spawn_key=self.stream)
        return np.random.Generator(np.random.PCG64(sequence))
