"""Permutation operators and the batched operator bundle for the engine.

The public pair functions work on tours of global vertex ids.  The
engine-facing TspOps works on whole populations of local indices
0..L-1 into a sorted subset, which keeps the hot loops in the compiled
kernels.
"""

from __future__ import annotations

import numpy as np

from ..ga.config import SOFTMAX, GaConfig, frac_count
from ..ga.engine import Elite
from ..ga.population import Population
from ..kernels import (
    HAVE_NUMBA,
    ordered_crossover_kernel,
    swap_mutation_kernel,
    tsp_eval_kernel,
    tsp_generation_kernel,
    tsp_run_kernel,
)
from .instance import FITNESS_EXP_CLAMP


def ordered_crossover(p1, p2, c: float, rng: np.random.Generator):
    """One offspring: the p1 entries whose coins come up heads (probability
    c), in p1's order, followed by the remaining entries in p2's order.

    Both parents must be permutations of the same vertex set.
    """
    a = np.asarray(p1, dtype=np.int64)
    b = np.asarray(p2, dtype=np.int64)
    if not np.array_equal(np.sort(a), np.sort(b)):
        raise ValueError("subset mismatch")
    if a.size == 0:
        return a.copy()
    subset = np.sort(a)
    la = np.searchsorted(subset, a).astype(np.int32)
    lb = np.searchsorted(subset, b).astype(np.int32)
    coins = rng.random((1, a.size))
    child = ordered_crossover_kernel(la[None, :], lb[None, :], coins, c)
    return subset[child[0]]


def swap_mutation(p, m: float, rng: np.random.Generator):
    """Independently with probability m, swap each position with a uniform
    random position (possibly itself); swaps apply left to right."""
    t = np.asarray(p, dtype=np.int64)
    if t.size == 0:
        return t.copy()
    coins = rng.random((1, t.size))
    targets = rng.random((1, t.size))
    out = swap_mutation_kernel(t[None, :].astype(np.int32), coins, targets, m)
    return out[0].astype(np.int64)


class TspOps:
    """Batched evaluate/crossover/mutate over local-index tour rows."""

    def __init__(self, dist_sub: np.ndarray, point_crossover_prob: float, mutation_rate: float):
        self.dist = np.ascontiguousarray(dist_sub, dtype=float)
        self.c = point_crossover_prob
        self.m = mutation_rate
        self.subset_size = self.dist.shape[0]

    def evaluate(self, genomes: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        return tsp_eval_kernel(genomes, self.dist, FITNESS_EXP_CLAMP)

    def crossover_batch(self, a: np.ndarray, b: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        coins = rng.random(a.shape)
        return ordered_crossover_kernel(a, b, coins, self.c)

    def mutate_batch(self, genomes: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        coins = rng.random(genomes.shape)
        targets = rng.random(genomes.shape)
        return swap_mutation_kernel(genomes, coins, targets, self.m)

    def fast_generation(self, pop: Population, spec, cfg, rng: np.random.Generator):
        """Fused softmax-selection step; returns (population with an
        unevaluated tail, survivor count), or None when the generic
        engine path must run.  Draws the exact uniform sequence the
        generic path would and feeds the same kernels, so the two paths
        build identical populations; this one skips the per-step array
        churn in the interpreter."""
        if not HAVE_NUMBA or spec.kind != SOFTMAX:
            return None
        n, length = pop.genomes.shape
        k = frac_count(spec.keep_fraction, n)
        u = rng.random(3 * k)
        cross_u = u[k : 2 * k]
        if k > 1 and cfg.crossover_rate > 0.0:
            n_off = int((cross_u < cfg.crossover_rate).sum())
        else:
            n_off = 0
        cross_coins = rng.random((n_off, length)) if n_off else np.empty((0, length))
        mut_coins = rng.random((k, length))
        mut_targets = rng.random((k, length))
        genomes, sur_fit, sur_cost, ids, next_id = tsp_generation_kernel(
            pop.genomes,
            pop.fitness,
            pop.cost,
            pop.ids,
            pop.next_id,
            u[:k],
            cross_u,
            u[2 * k :],
            cross_coins,
            mut_coins,
            mut_targets,
            cfg.crossover_rate,
            self.c,
            self.m,
        )
        total = genomes.shape[0]
        fitness = np.empty(total)
        fitness[:k] = sur_fit
        fitness[k:] = np.nan
        cost = np.empty(total)
        cost[:k] = sur_cost
        cost[k:] = np.nan
        new = Population.from_arrays(
            genomes, fitness, cost, ids, generation=pop.generation + 1, next_id=next_id
        )
        return new, k

    def fast_run(self, pop: Population, cfg: GaConfig, generations: int, rng: np.random.Generator):
        """Fused multi-generation training loop; returns the final
        Population (elite attached) or None when the generic loop must
        run.  Draw order and kernels match the per-step path, so the
        result is identical; the whole run stays inside compiled code.
        Bails out when the population floor could ever trigger, the one
        branch the fused loop leaves to the engine."""
        spec = cfg.selection
        if (
            not HAVE_NUMBA
            or spec.kind != SOFTMAX
            or spec.keep_fraction < 0.5
            or pop.size < cfg.min_population
            or generations <= 0
        ):
            return None
        elite = pop.elite
        genomes, fitness, cost, ids, next_id, e_genome, e_fit, e_cost, e_id = tsp_run_kernel(
            pop.genomes,
            pop.fitness,
            pop.cost,
            pop.ids,
            pop.next_id,
            np.ascontiguousarray(elite.genome, dtype=np.int32),
            float(elite.fitness),
            float(elite.cost),
            int(elite.id),
            self.dist,
            FITNESS_EXP_CLAMP,
            generations,
            spec.keep_fraction,
            cfg.crossover_rate,
            self.c,
            self.m,
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


def initial_tours(count: int, subset_size: int, rng: np.random.Generator) -> np.ndarray:
    """count independent uniform-random local-index permutations."""
    rows = np.tile(np.arange(subset_size, dtype=np.int32), (count, 1))
    return rng.permuted(rows, axis=1)
