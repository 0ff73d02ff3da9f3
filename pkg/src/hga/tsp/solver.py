"""GA solver for open-path TSP over a fixed vertex subset."""

from __future__ import annotations

import numpy as np

from ..ga.config import SOFTMAX, GaConfig, SelectionSpec
from ..ga.engine import History, evaluate_population, run, update_elite
from ..ga.population import Population
from ..rng import stream
from .instance import EuclideanInstance
from .operators import TspOps, initial_tours


def default_tsp_config(seed: int = 0) -> GaConfig:
    """Sub-solver defaults: population 200 (floor 50), softmax selection,
    m=0.02, c'=0.7, c=0.5."""
    return GaConfig(
        initial_population=200,
        min_population=50,
        mutation_rate=0.02,
        crossover_rate=0.7,
        point_crossover_prob=0.5,
        selection=SelectionSpec(kind=SOFTMAX),
        seed=seed,
    )


def run_tsp_solver(
    inst: EuclideanInstance,
    subset,
    cfg: GaConfig | None = None,
    generations: int = 300,
) -> tuple[np.ndarray, History]:
    """Evolve tours over `subset`; returns (best tour of global ids, History).

    Subsets of size <= 1 short-circuit to the only possible tour with no
    GA iterations.
    """
    if cfg is None:
        cfg = default_tsp_config()
    subset = np.sort(np.asarray(subset, dtype=np.int64))
    if subset.size and subset[-1] >= inst.n:
        raise ValueError("invalid vertex")
    ops = TspOps(inst.dist[np.ix_(subset, subset)], cfg.point_crossover_prob, cfg.mutation_rate)

    if subset.size <= 1:
        pop = Population(np.zeros((1, subset.size), dtype=np.int32))
        evaluate_population(pop, ops)
        pop.elite = update_elite(pop, None)
        history = History()
        history.record(pop, pop.elite)
        return subset.copy(), history

    rng = stream(cfg.seed)
    pop = Population(initial_tours(cfg.initial_population, subset.size, rng))
    result = run(pop, ops, cfg, generations, rng)
    return subset[result.best.genome], result.history
