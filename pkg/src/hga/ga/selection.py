"""Selection strategies.

All four strategies reduce to select_indices, a pure function of the
fitness/id vectors and a block of pre-drawn uniforms, so the engine can
feed it slices of one bulk draw per generation.

Semantics:
    random      uniform with replacement, ceil(keep_fraction * n) draws.
    softmax     with replacement, P(i) proportional to exp(f_i - max f).
    percentile  the top ceil(p% * n) by fitness; keep_fraction is not
                consulted.
    tournament  ceil(keep_fraction * n) rounds; each round samples
                ceil(sample_fraction * n) distinct not-yet-chosen members
                and keeps the round's best, which leaves the pool.
                Never returns the same member twice.

Rank comparisons order by fitness descending, then cost ascending, then
id ascending.  Fitness is always a strictly decreasing transform of cost,
so the cost key changes nothing in exact arithmetic; it restores
resolution where exp(...) saturates in float64 (underflow to 0, or the
overflow clamp).
"""

from __future__ import annotations

import numpy as np

from ..kernels import softmax_pick_kernel, tournament_pick_kernel
from .config import PERCENTILE, RANDOM, SOFTMAX, TOURNAMENT, SelectionSpec, frac_count
from .population import Individual, Population


def selection_draws(spec: SelectionSpec, n: int) -> tuple[int, ...]:
    """Shape of the uniform block select_indices needs for population size n."""
    if spec.kind == PERCENTILE:
        return (0,)
    k = frac_count(spec.keep_fraction, n)
    if spec.kind == TOURNAMENT:
        return (k, frac_count(spec.sample_fraction, n))
    return (k,)


def select_indices(
    fitness: np.ndarray, cost: np.ndarray, ids: np.ndarray, spec: SelectionSpec, u: np.ndarray
) -> np.ndarray:
    n = fitness.shape[0]
    if spec.kind == RANDOM:
        idx = (u * n).astype(np.int64)
        idx[idx == n] = n - 1
        return idx
    if spec.kind == SOFTMAX:
        return softmax_pick_kernel(fitness, u)
    if spec.kind == PERCENTILE:
        k = frac_count(spec.percentile / 100.0, n)
        return np.lexsort((ids, cost, -fitness))[:k]
    rounds, size = u.shape
    return tournament_pick_kernel(fitness, cost, ids, rounds, size, u)


def select(pop: Population, spec: SelectionSpec, rng: np.random.Generator) -> list[Individual]:
    """Validating wrapper used at API boundaries; draws its own uniforms."""
    if pop.size == 0:
        raise ValueError("empty population")
    if np.isnan(pop.fitness).any():
        raise ValueError("unevaluated individual")
    u = rng.random(selection_draws(spec, pop.size))
    idx = select_indices(pop.fitness, pop.cost, pop.ids, spec, u)
    return [Individual(pop.genomes[i], float(pop.fitness[i]), int(pop.ids[i])) for i in idx]
