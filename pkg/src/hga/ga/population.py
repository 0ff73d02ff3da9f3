"""Population storage.

Genomes live in one 2-D array (one row per member) with parallel fitness,
cost and id vectors, which keeps per-generation work vectorizable.  NaN
fitness marks an unevaluated member.  Individual is a row view used at
API boundaries and in tests.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class Individual:
    genome: np.ndarray
    fitness: float | None
    id: int

    @property
    def evaluated(self) -> bool:
        return self.fitness is not None


class Population:
    """Ordered collection of genomes with per-member fitness, cost and id."""

    def __init__(self, genomes: np.ndarray, *, generation: int = 0, next_id: int | None = None):
        genomes = np.asarray(genomes)
        if genomes.ndim != 2:
            raise ValueError("genomes must be a 2-D array (members x loci)")
        self.genomes = genomes
        n = genomes.shape[0]
        self.fitness = np.full(n, np.nan)
        self.cost = np.full(n, np.nan)
        self.ids = np.arange(n, dtype=np.int64)
        self.generation = generation
        self.next_id = n if next_id is None else next_id

    @classmethod
    def from_arrays(
        cls,
        genomes: np.ndarray,
        fitness: np.ndarray,
        cost: np.ndarray,
        ids: np.ndarray,
        *,
        generation: int = 0,
        next_id: int = 0,
    ) -> "Population":
        """Adopt prebuilt parallel arrays without the NaN/arange setup;
        the hot per-generation path constructs populations this way."""
        pop = cls.__new__(cls)
        pop.genomes = genomes
        pop.fitness = fitness
        pop.cost = cost
        pop.ids = ids
        pop.generation = generation
        pop.next_id = next_id
        return pop

    @property
    def size(self) -> int:
        return self.genomes.shape[0]

    def claim_ids(self, count: int) -> np.ndarray:
        ids = np.arange(self.next_id, self.next_id + count, dtype=np.int64)
        self.next_id += count
        return ids

    @property
    def members(self) -> list[Individual]:
        out = []
        for i in range(self.size):
            f = self.fitness[i]
            out.append(Individual(self.genomes[i], None if np.isnan(f) else float(f), int(self.ids[i])))
        return out
