"""Configuration dataclasses for the genetic-algorithm engine."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

RANDOM = "random"
SOFTMAX = "softmax"
PERCENTILE = "percentile"
TOURNAMENT = "tournament"
SELECTION_KINDS = (RANDOM, SOFTMAX, PERCENTILE, TOURNAMENT)


def frac_count(fraction: float, n: int) -> int:
    """ceil(fraction * n) guarded against float noise like 0.1*10 > 1."""
    return int(math.ceil(round(fraction * n, 9)))


@dataclass
class SelectionSpec:
    """Which parents survive a generation.

    kind: one of random | softmax | percentile | tournament.
    percentile: p in (0, 100]; percentile selection keeps the top
        ceil(p% * n) members and ignores keep_fraction.
    sample_fraction: tournament round sample size as a fraction of the
        population.
    keep_fraction: number of survivors as a fraction of the population
        (random / softmax / tournament).
    """

    kind: str = SOFTMAX
    percentile: float = 50.0
    sample_fraction: float = 0.10
    keep_fraction: float = 0.5

    def __post_init__(self) -> None:
        if self.kind not in SELECTION_KINDS:
            raise ValueError(f"unknown selection kind: {self.kind!r}")
        if not 0.0 < self.percentile <= 100.0:
            raise ValueError("percentile must be in (0, 100]")
        if not 0.0 < self.sample_fraction <= 1.0:
            raise ValueError("sample_fraction must be in (0, 1]")
        if not 0.0 < self.keep_fraction <= 1.0:
            raise ValueError("keep_fraction must be in (0, 1]")


@dataclass
class GaConfig:
    """Engine parameters for one population.

    mutation_rate m and point_crossover_prob c are per-locus rates;
    crossover_rate c' is the per-individual probability of producing an
    offspring each generation.  max_population caps the post-generation
    size by elitist truncation (defaults to initial_population).
    """

    initial_population: int
    min_population: int
    mutation_rate: float
    crossover_rate: float
    point_crossover_prob: float
    selection: SelectionSpec = field(default_factory=SelectionSpec)
    seed: int = 0
    max_population: int | None = None

    def __post_init__(self) -> None:
        if self.initial_population < 1:
            raise ValueError("initial_population must be >= 1")
        if not 1 <= self.min_population <= self.initial_population:
            raise ValueError("min_population must be in [1, initial_population]")
        for name in ("mutation_rate", "crossover_rate", "point_crossover_prob"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must be in [0, 1]")
        if self.max_population is not None and self.max_population < self.initial_population:
            raise ValueError("max_population must be >= initial_population")

    @property
    def cap(self) -> int:
        return self.max_population if self.max_population is not None else self.initial_population


@dataclass
class HierConfig:
    """Two-level run: a meta population whose individuals each own a
    sub-solver trained k_subgens generations per meta generation."""

    meta: GaConfig
    sub: GaConfig
    k_subgens: int
    meta_generations: int

    def __post_init__(self) -> None:
        if self.k_subgens < 1:
            raise ValueError("k_subgens must be >= 1")
        if self.meta_generations < 1:
            raise ValueError("meta_generations must be >= 1")
