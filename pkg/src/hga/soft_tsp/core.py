"""Soft-TSP scoring and subset-genome operators.

A solution may skip vertices: its cost is the open-path weight plus the
penalties of every skipped vertex.  Subset genomes are boolean arrays
over all vertices; crossover swaps bits positionwise between two
parents, mutation flips bits.
"""

from __future__ import annotations

import numpy as np

from ..ga.population import Population
from ..kernels import repair_tours_kernel
from ..tsp.instance import EuclideanInstance, path_cost


def soft_cost(inst: EuclideanInstance, penalties, tour) -> float:
    """path_cost(tour) + penalties of the vertices the tour skips."""
    pen = np.asarray(penalties, dtype=float)
    if pen.shape != (inst.n,):
        raise ValueError("penalty length mismatch")
    t = np.asarray(tour, dtype=np.int64)
    return float(pen.sum() - pen[t].sum()) + path_cost(inst, t)


def meta_fitness(cost: float) -> float:
    """exp(-cost); lower cost, higher fitness."""
    return float(np.exp(-cost))


def subset_crossover(b1, b2, c: float, rng: np.random.Generator):
    """Swap each bit position between the parents with probability c;
    returns both children."""
    a = np.asarray(b1, dtype=bool)
    b = np.asarray(b2, dtype=bool)
    if a.shape != b.shape:
        raise ValueError("length mismatch")
    swap = rng.random(a.shape) < c
    return np.where(swap, b, a), np.where(swap, a, b)


def subset_mutation(bits, m: float, rng: np.random.Generator):
    """Flip each bit independently with probability m."""
    b = np.asarray(bits, dtype=bool)
    return b ^ (rng.random(b.shape) < m)


def repair_subpopulation(sub: Population, old_subset, new_subset, rng: np.random.Generator) -> Population:
    """Retarget a tour population from one vertex subset to another.

    Tours are local-index rows over sorted(old_subset).  Departed vertices
    are removed preserving order; arriving vertices are inserted one by one
    (ascending id) at uniform random positions.  The result is a fresh
    population of local-index rows over sorted(new_subset) with fitness
    invalidated and ids/generation carried over.
    """
    old = np.sort(np.asarray(old_subset, dtype=np.int64))
    new = np.sort(np.asarray(new_subset, dtype=np.int64))
    kept = np.isin(old, new)
    old_to_new = np.where(kept, np.searchsorted(new, old), -1).astype(np.int64)
    arrival_locals = np.nonzero(~np.isin(new, old))[0]

    u = rng.random((sub.size, arrival_locals.size))
    rows = repair_tours_kernel(sub.genomes.astype(np.int32), old_to_new, arrival_locals.astype(np.int32), u)
    out = Population(rows, generation=sub.generation, next_id=sub.next_id)
    out.ids = sub.ids.copy()
    return out
