"""Two-level soft-TSP solver.

The meta population evolves vertex subsets; each member owns a TSP
sub-solver over its subset.  One meta generation trains every
sub-solver k_subgens generations, scores members as
(skipped-vertex penalties + best path weight found so far), truncates to
the population cap, records a history row, then evolves the subsets.
Each crossing pair contributes both of its swap-children; offspring
inherit a copy of the fitter parent's sub-population, repaired to the
child's subset.

Every stochastic step draws from a stream keyed by role, individual id
and meta generation, so a fixed seed reproduces a run exactly and
sub-solvers could train in any order (or in parallel) without changing
the result.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from ..ga.config import PERCENTILE, GaConfig, HierConfig, SelectionSpec
from ..ga.engine import Elite
from ..ga.engine import run as ga_run
from ..ga.population import Population
from ..ga.selection import select_indices, selection_draws
from ..history import MetaHistory
from ..rng import META_EVOLVE, META_INIT, SUB_INIT, SUB_TRAIN, stream
from ..tsp.greedy import greedy_two_approx
from ..tsp.instance import EuclideanInstance, path_cost
from ..tsp.operators import TspOps, initial_tours
from ..tsp.solver import default_tsp_config
from .core import meta_fitness, repair_subpopulation, subset_crossover


def default_hier_config(seed: int = 0) -> HierConfig:
    """Meta population 100 (floor 20), m=0.2, c'=0.5, c=0.5, percentile
    p=50 selection; sub-solver per default_tsp_config; 50 sub-generations
    per meta generation; 30 meta generations."""
    meta = GaConfig(
        initial_population=100,
        min_population=20,
        mutation_rate=0.2,
        crossover_rate=0.5,
        point_crossover_prob=0.5,
        selection=SelectionSpec(kind=PERCENTILE, percentile=50.0),
        seed=seed,
    )
    return HierConfig(meta=meta, sub=default_tsp_config(seed), k_subgens=50, meta_generations=30)


def check_penalties(inst: EuclideanInstance, penalties) -> np.ndarray:
    pen = np.asarray(penalties, dtype=float)
    if pen.shape != (inst.n,):
        raise ValueError("penalty length mismatch")
    if not np.isfinite(pen).all() or (pen < 0).any():
        raise ValueError("penalties must be finite and non-negative")
    return pen


@dataclass
class MetaIndividual:
    """A vertex subset plus the TSP sub-solver working on it."""

    bits: np.ndarray
    id: int
    subset: np.ndarray
    sub: Population
    ops: TspOps
    best_path: float = np.inf
    best_tour: np.ndarray | None = None
    fitness: float = np.nan
    cost: float = np.nan


def _better(a: MetaIndividual, b: MetaIndividual) -> bool:
    """a strictly ahead of b by (fitness desc, cost asc, id asc); NaN
    fitness (unevaluated) loses to anything evaluated."""
    fa = -np.inf if np.isnan(a.fitness) else a.fitness
    fb = -np.inf if np.isnan(b.fitness) else b.fitness
    return (fa, -a.cost, -a.id) > (fb, -b.cost, -b.id)


def _best_of(inds: list[MetaIndividual]) -> MetaIndividual:
    best = inds[0]
    for ind in inds[1:]:
        if _better(ind, best):
            best = ind
    return best


class SoftTspState:
    """Meta population and the operations one meta generation is made of."""

    def __init__(self, inst: EuclideanInstance, cfg: HierConfig):
        self.inst = inst
        self.cfg = cfg
        self.seed = cfg.meta.seed
        self.gen = 0
        self.next_id = 0
        rng = stream(self.seed, META_INIT)
        bits = rng.random((cfg.meta.initial_population, inst.n)) < 0.5
        self.individuals = [self._fresh(bits[i]) for i in range(bits.shape[0])]

    # -- individual construction ------------------------------------------

    def _claim_id(self) -> int:
        i = self.next_id
        self.next_id += 1
        return i

    def _make(self, bits: np.ndarray, sub: Population, ind_id: int) -> MetaIndividual:
        subset = np.nonzero(bits)[0]
        ops = TspOps(
            self.inst.dist[np.ix_(subset, subset)],
            self.cfg.sub.point_crossover_prob,
            self.cfg.sub.mutation_rate,
        )
        ind = MetaIndividual(bits=bits, id=ind_id, subset=subset, sub=sub, ops=ops)
        if subset.size <= 1:
            ind.best_path = 0.0
            ind.best_tour = np.arange(subset.size, dtype=np.int32)
        return ind

    def _fresh(self, bits: np.ndarray) -> MetaIndividual:
        ind_id = self._claim_id()
        subset_size = int(bits.sum())
        tours = initial_tours(
            self.cfg.sub.initial_population, subset_size, stream(self.seed, SUB_INIT, ind_id)
        )
        return self._make(bits.copy(), Population(tours), ind_id)

    def _inherit(self, parent: MetaIndividual, bits: np.ndarray, rng: np.random.Generator) -> MetaIndividual:
        """Child gets a repaired copy of the parent's sub-population; when
        the subset is unchanged the parent's best tour and sub-solver elite
        stay valid and are carried over."""
        subset = np.nonzero(bits)[0]
        sub = repair_subpopulation(parent.sub, parent.subset, subset, rng)
        child = self._make(bits, sub, self._claim_id())
        if np.array_equal(subset, parent.subset):
            child.best_path = parent.best_path
            if parent.best_tour is not None:
                child.best_tour = parent.best_tour.copy()
            elite = getattr(parent.sub, "elite", None)
            if elite is not None:
                sub.elite = Elite(elite.genome.copy(), elite.fitness, elite.cost, elite.id)
        return child

    # -- one meta generation ----------------------------------------------

    def train_all(self) -> None:
        for ind in self.individuals:
            if ind.subset.size <= 1:
                continue
            rng = stream(self.seed, SUB_TRAIN, ind.id, self.gen)
            result = ga_run(ind.sub, ind.ops, self.cfg.sub, self.cfg.k_subgens, rng, record=False)
            ind.sub = result.population
            if result.best.cost < ind.best_path:
                ind.best_path = result.best.cost
                ind.best_tour = result.best.genome.copy()

    def score(self, penalties: np.ndarray) -> None:
        pen_total = float(penalties.sum())
        for ind in self.individuals:
            skipped = pen_total - float(penalties[ind.subset].sum())
            ind.cost = skipped + ind.best_path
            ind.fitness = meta_fitness(ind.cost)

    def truncate(self) -> None:
        cap = self.cfg.meta.cap
        if len(self.individuals) <= cap:
            return
        ranked = sorted(self.individuals, key=lambda i: (-i.fitness, i.cost, i.id))
        keep = {id(ind) for ind in ranked[:cap]}
        self.individuals = [ind for ind in self.individuals if id(ind) in keep]

    def best_member(self) -> MetaIndividual:
        return _best_of(self.individuals)

    def evolve(self) -> None:
        rng = stream(self.seed, META_EVOLVE, self.gen)
        inds = self.individuals
        n = len(inds)
        spec = self.cfg.meta.selection
        fit = np.array([i.fitness for i in inds])
        cost = np.array([i.cost for i in inds])
        ids = np.array([i.id for i in inds], dtype=np.int64)
        u = rng.random(selection_draws(spec, n))
        sel_idx = select_indices(fit, cost, ids, spec, u)

        survivors: list[MetaIndividual] = []
        seen: set[int] = set()
        for idx in sel_idx:
            idx = int(idx)
            ind = inds[idx]
            if idx in seen:  # with-replacement repeat becomes a clone
                ind = self._inherit(ind, ind.bits.copy(), rng)
            else:
                seen.add(idx)
            survivors.append(ind)

        k = len(survivors)
        cross_u = rng.random(k)
        partner_u = rng.random(k)
        offspring: list[MetaIndividual] = []
        if k > 1 and self.cfg.meta.crossover_rate > 0.0:
            for i in range(k):
                if cross_u[i] < self.cfg.meta.crossover_rate:
                    j = int(partner_u[i] * (k - 1))
                    j += j >= i
                    a, b = survivors[i], survivors[j]
                    children = subset_crossover(
                        a.bits, b.bits, self.cfg.meta.point_crossover_prob, rng
                    )
                    parent = b if _better(b, a) else a
                    for child_bits in children:
                        offspring.append(self._inherit(parent, child_bits, rng))

        mutants: list[MetaIndividual] = []
        for ind in survivors:
            flips = rng.random(self.inst.n) < self.cfg.meta.mutation_rate
            mutants.append(self._inherit(ind, ind.bits ^ flips, rng))

        new = survivors + offspring + mutants
        if survivors:
            best = _best_of(survivors)
            while len(new) < self.cfg.meta.min_population:
                partner = new[int(rng.integers(len(new)))]
                swap = rng.random(self.inst.n) < self.cfg.meta.point_crossover_prob
                child_bits = np.where(swap, partner.bits, best.bits)
                child_bits = child_bits ^ (rng.random(self.inst.n) < self.cfg.meta.mutation_rate)
                parent = partner if _better(partner, best) else best
                new.append(self._inherit(parent, child_bits, rng))
        self.individuals = new


class BestTracker:
    """Best solution seen so far, scored under the true penalty map
    (which, during adaptive scheduling, can differ from the active one)."""

    def __init__(self, penalties: np.ndarray):
        self.pen = np.asarray(penalties, dtype=float)
        self.pen_total = float(self.pen.sum())
        self.cost = np.inf
        self.tour: np.ndarray | None = None
        self.bits: np.ndarray | None = None

    def update(self, state: SoftTspState) -> None:
        for ind in state.individuals:
            c = self.pen_total - float(self.pen[ind.subset].sum()) + ind.best_path
            if c < self.cost:
                self.cost = c
                self.tour = ind.subset[ind.best_tour]
                self.bits = ind.bits.copy()


def run_phase(
    state: SoftTspState,
    history: MetaHistory,
    generations: int,
    pen_for_gen,
    final: bool,
    tracker: BestTracker | None = None,
    stop_unimproved: int | None = None,
) -> int:
    """Advance `generations` meta generations, recording one history row
    each.  pen_for_gen(g) -> (penalties, phase tag).  When `final`, the
    last generation skips the evolve step (nothing would ever train its
    children).  stop_unimproved ends the phase early once the recorded
    best cost has not strictly improved for that many generations."""
    done = 0
    prev_best = np.inf
    unimproved = 0
    for step in range(generations):
        t0 = time.perf_counter()
        state.train_all()
        penalties, tag = pen_for_gen(state.gen)
        state.score(penalties)
        state.truncate()
        if tracker is not None:
            tracker.update(state)
        best = state.best_member()
        mean_cost = float(np.mean([i.cost for i in state.individuals]))
        wall_ms = (time.perf_counter() - t0) * 1e3
        history.record(state.gen, best.cost, mean_cost, len(state.individuals), tag, wall_ms)
        done += 1
        stopping = False
        if stop_unimproved is not None:
            if best.cost < prev_best:
                prev_best = best.cost
                unimproved = 0
            else:
                unimproved += 1
                stopping = unimproved >= stop_unimproved
        last = final and step == generations - 1
        if not last and not stopping:
            state.evolve()
        state.gen += 1
        if stopping:
            break
    return done


def run_hierarchical(
    inst: EuclideanInstance, penalties, cfg: HierConfig | None = None
) -> tuple[np.ndarray, float, MetaHistory]:
    """Full two-level run under a fixed penalty map.

    Returns (best tour of global vertex ids, its soft cost, MetaHistory);
    the history also carries the full-vertex-set greedy baseline cost.
    """
    if cfg is None:
        cfg = default_hier_config()
    pen = check_penalties(inst, penalties)
    state = SoftTspState(inst, cfg)
    history = MetaHistory(baseline_cost=path_cost(inst, greedy_two_approx(inst)))
    tracker = BestTracker(pen)
    run_phase(state, history, cfg.meta_generations, lambda g: (pen, "fixed"), final=True, tracker=tracker)
    return tracker.tour, tracker.cost, history
