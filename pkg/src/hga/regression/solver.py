"""Coefficient-space GA for polynomial fitting under a fixed objective.

The genotype is the coefficient array itself.  Crossover swaps values
per locus between two parents (the offspring keeps its own value where
no swap happens), mutation adds N(0, 2^2) noise per locus with
probability m, and fitness is exp(-composite objective).  This module
only ever sees the composite objective; the hidden evaluation oracle
lives elsewhere and is never imported here.
"""

from __future__ import annotations

import numpy as np

from ..ga.config import TOURNAMENT, GaConfig, SelectionSpec
from ..ga.engine import Elite, History
from ..ga.engine import run as ga_run
from ..ga.population import Population
from ..kernels import HAVE_NUMBA, reg_eval_kernel, reg_run_kernel
from ..rng import stream
from .dataset import Dataset
from .hyper import HyperGenome

MUTATION_STD = 2.0
INIT_STD = 2.0


def default_regression_config(seed: int = 0) -> GaConfig:
    """Sub-solver defaults: population 500 (floor 100), random tournament
    keeping half (rounds sample 10% of the population), m=0.2, c'=0.7,
    c=0.5."""
    return GaConfig(
        initial_population=500,
        min_population=100,
        mutation_rate=0.2,
        crossover_rate=0.7,
        point_crossover_prob=0.5,
        selection=SelectionSpec(kind=TOURNAMENT, sample_fraction=0.10, keep_fraction=0.5),
        seed=seed,
    )


class RegressionOps:
    """Batched operators over coefficient rows for one (lam1, lam2, gamma)
    setting; Vandermonde matrices are cached per row width."""

    def __init__(
        self,
        dataset: Dataset,
        lam1: float,
        lam2: float,
        gamma: float,
        point_crossover_prob: float,
        mutation_rate: float,
    ):
        self.xs = dataset.xs
        self.ys = np.ascontiguousarray(dataset.ys)
        self.lam1 = float(lam1)
        self.lam2 = float(lam2)
        self.gamma = float(gamma)
        self.c = point_crossover_prob
        self.m = mutation_rate
        self._vander: dict[int, np.ndarray] = {}
        self._vander_t: dict[int, np.ndarray] = {}

    def design_matrix(self, width: int) -> np.ndarray:
        v = self._vander.get(width)
        if v is None:
            v = np.ascontiguousarray(np.vander(self.xs, width, increasing=True))
            self._vander[width] = v
        return v

    def _design_t(self, width: int) -> np.ndarray:
        v = self._vander_t.get(width)
        if v is None:
            v = np.ascontiguousarray(self.design_matrix(width).T)
            self._vander_t[width] = v
        return v

    def evaluate(self, genomes: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        return reg_eval_kernel(
            np.ascontiguousarray(genomes),
            self._design_t(genomes.shape[1]),
            self.ys,
            self.lam1,
            self.lam2,
            self.gamma,
        )

    def crossover_batch(self, a: np.ndarray, b: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        swap = rng.random(a.shape) < self.c
        return np.where(swap, b, a)

    def mutate_batch(self, genomes: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        hit = rng.random(genomes.shape) < self.m
        return genomes + hit * rng.normal(0.0, MUTATION_STD, genomes.shape)

    def fast_run(self, pop: Population, cfg: GaConfig, generations: int, rng: np.random.Generator):
        """Fused multi-generation training loop; returns the final
        Population (elite attached) or None when the generic loop must
        run.  Same draw order and arithmetic as the per-step path, so the
        result is identical; the whole run stays inside compiled code.
        Bails out when the population floor could ever trigger, the one
        branch the fused loop leaves to the engine."""
        spec = cfg.selection
        if (
            not HAVE_NUMBA
            or spec.kind != TOURNAMENT
            or spec.keep_fraction < 0.5
            or pop.size < cfg.min_population
            or generations <= 0
        ):
            return None
        elite = pop.elite
        genomes, fitness, cost, ids, next_id, e_genome, e_fit, e_cost, e_id = reg_run_kernel(
            np.ascontiguousarray(pop.genomes),
            pop.fitness,
            pop.cost,
            pop.ids,
            pop.next_id,
            np.ascontiguousarray(elite.genome, dtype=float),
            float(elite.fitness),
            float(elite.cost),
            int(elite.id),
            self._design_t(pop.genomes.shape[1]),
            self.ys,
            self.lam1,
            self.lam2,
            self.gamma,
            generations,
            spec.keep_fraction,
            spec.sample_fraction,
            cfg.crossover_rate,
            self.c,
            self.m,
            MUTATION_STD,
            cfg.cap,
            rng,
        )
        new = Population.from_arrays(
            genomes,
            fitness,
            cost,
            ids,
            generation=pop.generation + generations,
            next_id=int(next_id),
        )
        new.elite = Elite(np.asarray(e_genome), float(e_fit), float(e_cost), int(e_id))
        return new


def initial_coefficients(count: int, width: int, rng: np.random.Generator) -> np.ndarray:
    """count coefficient rows drawn i.i.d. N(0, INIT_STD^2)."""
    return rng.normal(0.0, INIT_STD, (count, width))


def run_regression_solver(
    dataset: Dataset,
    hyper: HyperGenome,
    cfg: GaConfig | None = None,
    generations: int = 100,
) -> tuple[np.ndarray, History]:
    """Evolve degree-hyper.d coefficients against the composite objective;
    returns (best coefficient array, History)."""
    if cfg is None:
        cfg = default_regression_config()
    ops = RegressionOps(
        dataset, hyper.lam1, hyper.lam2, hyper.gamma, cfg.point_crossover_prob, cfg.mutation_rate
    )
    rng = stream(cfg.seed)
    pop = Population(initial_coefficients(cfg.initial_population, hyper.d + 1, rng))
    result = ga_run(pop, ops, cfg, generations, rng)
    return result.best.genome, result.history
