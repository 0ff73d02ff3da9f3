"""Generational engine.

One generation: select survivors, let each survivor produce an offspring
with probability c' (partner uniform among the other survivors), append a
mutated copy of every survivor, refill to the population floor by
crossing the best member with random members, evaluate whatever is new,
then truncate to the population cap keeping the best.  The best-ever
individual is preserved verbatim across generations.

Fitness is cached: a genome is evaluated once, survivors keep their
stored value.  All randomness comes from the generator handed in, and
evaluation must be deterministic, so a fixed seed reproduces a run
bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Protocol

import numpy as np

from .config import GaConfig, frac_count
from .population import Individual, Population
from .selection import select_indices, selection_draws


class GenomeOps(Protocol):
    """Domain plug-in: batched operators over genome rows."""

    def evaluate(self, genomes: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Return (fitness, cost) vectors; fitness finite, maximized."""
        ...

    def crossover_batch(self, a: np.ndarray, b: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        """One offspring row per (a, b) pair."""
        ...

    def mutate_batch(self, genomes: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        """Mutated copies; inputs untouched."""
        ...


@dataclass
class Elite:
    genome: np.ndarray
    fitness: float
    cost: float
    id: int


class History:
    """Per-generation statistics, one row per recorded generation."""

    columns = (
        "generation",
        "best_fitness",
        "mean_fitness",
        "best_cost",
        "mean_cost",
        "population_size",
        "best_ever_fitness",
        "best_ever_cost",
    )

    def __init__(self) -> None:
        self.rows: list[tuple] = []

    def record(self, pop: Population, elite: Elite) -> None:
        best = _best_index(pop.fitness, pop.cost, pop.ids)
        self.rows.append(
            (
                pop.generation,
                float(pop.fitness[best]),
                float(pop.fitness.mean()),
                float(pop.cost[best]),
                float(pop.cost.mean()),
                pop.size,
                elite.fitness,
                elite.cost,
            )
        )

    def column(self, name: str) -> list:
        i = self.columns.index(name)
        return [row[i] for row in self.rows]

    def __len__(self) -> int:
        return len(self.rows)


@dataclass
class GaResult:
    population: Population
    best: Elite
    history: History


def evaluate_population(pop: Population, ops: GenomeOps) -> None:
    """Fill in fitness/cost for members that lack them."""
    todo = np.isnan(pop.fitness)
    if todo.any():
        fit, cost = ops.evaluate(pop.genomes[todo])
        pop.fitness[todo] = fit
        pop.cost[todo] = cost


def _best_index(fitness: np.ndarray, cost: np.ndarray, ids: np.ndarray) -> int:
    # Best by fitness, then lower cost, then lower id.  The cost key only
    # matters where the fitness exponential saturates in float64.
    i = int(np.argmax(fitness))
    tied = np.nonzero(fitness == fitness[i])[0]
    if tied.size == 1:
        return i
    order = np.lexsort((ids[tied], cost[tied]))
    return int(tied[order[0]])


def update_elite(pop: Population, elite: Elite | None) -> Elite:
    i = _best_index(pop.fitness, pop.cost, pop.ids)
    fit, cost = float(pop.fitness[i]), float(pop.cost[i])
    if elite is None or fit > elite.fitness or (fit == elite.fitness and cost < elite.cost):
        return Elite(pop.genomes[i].copy(), fit, cost, int(pop.ids[i]))
    return elite


def maintain_floor(
    pop: Population, best: Individual, cfg: GaConfig, rng: np.random.Generator, ops: GenomeOps
) -> Population:
    """Append crossover(best, random member), mutated, until at the floor."""
    while pop.size < cfg.min_population:
        partner = int(rng.integers(pop.size))
        child = ops.crossover_batch(
            best.genome[None, :], pop.genomes[partner][None, :], rng
        )
        child = ops.mutate_batch(child, rng)
        pop.genomes = np.concatenate([pop.genomes, child], axis=0)
        pop.fitness = np.append(pop.fitness, np.nan)
        pop.cost = np.append(pop.cost, np.nan)
        pop.ids = np.append(pop.ids, pop.claim_ids(1))
    return pop


def _build_generation(
    pop: Population, ops: GenomeOps, cfg: GaConfig, rng: np.random.Generator
) -> tuple[Population, int]:
    """Select survivors and stack survivors + offspring + mutants;
    returns the population (tail unevaluated) and the survivor count."""
    n = pop.size
    spec = cfg.selection
    sel_shape = selection_draws(spec, n)
    sel_n = math.prod(sel_shape)
    k = sel_shape[0] if spec.kind != "percentile" else frac_count(spec.percentile / 100.0, n)
    u = rng.random(sel_n + 2 * k)
    sel_idx = select_indices(pop.fitness, pop.cost, pop.ids, spec, u[:sel_n].reshape(sel_shape))
    k = sel_idx.shape[0]

    survivors = pop.genomes[sel_idx]
    sur_ids = pop.ids[sel_idx].copy()
    next_id = pop.next_id
    if spec.kind in ("random", "softmax"):
        # with-replacement strategies can repeat a member; later
        # occurrences become clones with fresh ids so ids stay unique
        order = np.argsort(sel_idx, kind="stable")
        dup = np.zeros(k, dtype=bool)
        dup[order[1:]] = sel_idx[order[1:]] == sel_idx[order[:-1]]
        n_dup = int(dup.sum())
        if n_dup:
            sur_ids[dup] = np.arange(next_id, next_id + n_dup, dtype=np.int64)
            next_id += n_dup

    cross_u = u[sel_n : sel_n + k]
    partner_u = u[sel_n + k :]
    if k > 1 and cfg.crossover_rate > 0.0:
        crossing = np.nonzero(cross_u < cfg.crossover_rate)[0]
    else:
        crossing = np.empty(0, dtype=np.int64)
    if crossing.size:
        partners = (partner_u[crossing] * (k - 1)).astype(np.int64)
        partners += partners >= crossing
        offspring = ops.crossover_batch(survivors[crossing], survivors[partners], rng)
    else:
        offspring = survivors[:0]

    mutants = ops.mutate_batch(survivors, rng)

    n_new = offspring.shape[0] + mutants.shape[0]
    total = k + n_new
    fitness = np.empty(total)
    fitness[:k] = pop.fitness[sel_idx]
    fitness[k:] = np.nan
    cost = np.empty(total)
    cost[:k] = pop.cost[sel_idx]
    cost[k:] = np.nan
    ids = np.empty(total, dtype=np.int64)
    ids[:k] = sur_ids
    ids[k:] = np.arange(next_id, next_id + n_new, dtype=np.int64)
    new = Population.from_arrays(
        np.concatenate([survivors, offspring, mutants], axis=0),
        fitness,
        cost,
        ids,
        generation=pop.generation + 1,
        next_id=next_id + n_new,
    )
    return new, k


def step_generation(pop: Population, ops: GenomeOps, cfg: GaConfig, rng: np.random.Generator) -> Population:
    """Advance one generation; returns a new Population (inputs unchanged)."""
    if np.isnan(pop.fitness).any():
        raise ValueError("unevaluated individual")
    if pop.size == 0:
        raise ValueError("empty population")

    # domain bundles may provide a fused implementation of the build
    # phase; it must consume the identical uniform sequence
    fast = getattr(ops, "fast_generation", None)
    built = fast(pop, cfg.selection, cfg, rng) if fast is not None else None
    new, k = built if built is not None else _build_generation(pop, ops, cfg, rng)

    if new.size < cfg.min_population:
        bi = _best_index(new.fitness[:k], new.cost[:k], new.ids[:k])
        best = Individual(new.genomes[bi], float(new.fitness[bi]), int(new.ids[bi]))
        maintain_floor(new, best, cfg, rng, ops)

    # everything past the survivor prefix is new and unevaluated
    if new.size > k:
        fit, cost = ops.evaluate(new.genomes[k:])
        new.fitness[k:] = fit
        new.cost[k:] = cost

    elite = update_elite(new, getattr(pop, "elite", None))
    if not (new.ids == elite.id).any():
        new.genomes = np.concatenate([new.genomes, elite.genome[None, :]], axis=0)
        new.fitness = np.append(new.fitness, elite.fitness)
        new.cost = np.append(new.cost, elite.cost)
        new.ids = np.append(new.ids, elite.id)

    cap = cfg.cap
    if new.size > cap:
        # top-cap by (fitness desc, cost asc, id asc) keeping original
        # order; a full lexsort is only needed for the boundary ties
        f = new.fitness
        boundary = f[np.argpartition(-f, cap - 1)[:cap]].min()
        keep = f > boundary
        short = cap - int(keep.sum())
        if short:
            tied = np.nonzero(f == boundary)[0]
            order = np.lexsort((new.ids[tied], new.cost[tied]))
            keep[tied[order[:short]]] = True
        new.genomes = new.genomes[keep]
        new.fitness = new.fitness[keep]
        new.cost = new.cost[keep]
        new.ids = new.ids[keep]

    new.elite = elite
    return new


def run(
    pop: Population,
    ops: GenomeOps,
    cfg: GaConfig,
    generations: int,
    rng: np.random.Generator | None = None,
    record: bool = True,
) -> GaResult:
    """Evaluate, then step `generations` times; History gets a row for
    generation 0 and for every step.  record=False skips the history
    (inner training loops that only want the final elite run hot)."""
    if rng is None:
        from ..rng import stream

        rng = stream(cfg.seed)
    history = History()
    evaluate_population(pop, ops)
    pop.elite = update_elite(pop, getattr(pop, "elite", None))
    if record:
        history.record(pop, pop.elite)
    else:
        # without per-generation rows to fill in, a domain bundle may run
        # the whole loop fused; it must match step_generation bit for bit
        fast = getattr(ops, "fast_run", None)
        if fast is not None:
            done = fast(pop, cfg, generations, rng)
            if done is not None:
                return GaResult(done, done.elite, history)
    for _ in range(generations):
        pop = step_generation(pop, ops, cfg, rng)
        if record:
            history.record(pop, pop.elite)
    return GaResult(pop, pop.elite, history)
