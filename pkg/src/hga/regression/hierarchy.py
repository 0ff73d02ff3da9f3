"""Two-level regression: evolve objective hyperparameters against a
hidden oracle.

Each meta individual fixes (lam1, lam2, d, gamma) and owns a coefficient
GA trained on the resulting composite objective.  Once per meta
generation every individual trains k_subgens generations, submits its
best model's predictions, and receives a single scalar oracle cost; the
meta level then selects, crosses (keeping both swap-children) and
mutates the hyperparameter genomes.
The sub-solvers never see the oracle's internals -- only the scalar
crosses the boundary.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, replace

import numpy as np

from ..ga.config import PERCENTILE, GaConfig, HierConfig, SelectionSpec
from ..ga.engine import Elite
from ..ga.engine import run as ga_run
from ..ga.population import Population
from ..ga.selection import select_indices, selection_draws
from ..history import MetaHistory
from ..rng import META_EVOLVE, META_INIT, SUB_INIT, SUB_TRAIN, stream
from .dataset import Dataset
from .hyper import (
    HyperGenome,
    hyper_crossover,
    hyper_mutation,
    initial_hyper_population,
    resize_coefficients,
)
from .oracle import OracleSpec, oracle_cost
from .solver import RegressionOps, default_regression_config, initial_coefficients


def default_regression_hier_config(seed: int = 0) -> HierConfig:
    """Meta population 100 (floor 20), m=0.2, c'=0.5, c=0.5, percentile
    p=50; sub-solver per default_regression_config; 200 sub-generations
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
    return HierConfig(
        meta=meta, sub=default_regression_config(seed), k_subgens=200, meta_generations=30
    )


class RegMetaHistory(MetaHistory):
    """Adds the per-generation best genome and best model coefficients."""

    def __init__(self, baseline_cost: float | None = None):
        super().__init__(baseline_cost)
        self.best_genomes: list[HyperGenome] = []
        self.best_coeffs: list[np.ndarray] = []


@dataclass
class RegMetaIndividual:
    genome: HyperGenome
    id: int
    sub: Population
    ops: RegressionOps
    model: np.ndarray | None = None  # best coefficients submitted last
    fitness: float = np.nan
    cost: float = np.nan  # oracle cost of the last submission


def _better(a: RegMetaIndividual, b: RegMetaIndividual) -> bool:
    fa = -np.inf if np.isnan(a.fitness) else a.fitness
    fb = -np.inf if np.isnan(b.fitness) else b.fitness
    return (fa, -a.cost, -a.id) > (fb, -b.cost, -b.id)


def _best_of(inds: list[RegMetaIndividual]) -> RegMetaIndividual:
    best = inds[0]
    for ind in inds[1:]:
        if _better(ind, best):
            best = ind
    return best


class RegressionHierState:
    def __init__(
        self,
        dataset: Dataset,
        cfg: HierConfig,
        initial_genomes: list[HyperGenome] | None = None,
    ):
        self.dataset = dataset
        self.cfg = cfg
        self.seed = cfg.meta.seed
        self.gen = 0
        self.next_id = 0
        genomes = list(initial_genomes or [])
        fill = cfg.meta.initial_population - len(genomes)
        if fill > 0:
            genomes.extend(initial_hyper_population(fill, stream(self.seed, META_INIT)))
        self.individuals = [self._fresh(g) for g in genomes]

    def _claim_id(self) -> int:
        i = self.next_id
        self.next_id += 1
        return i

    def _ops(self, genome: HyperGenome) -> RegressionOps:
        return RegressionOps(
            self.dataset,
            genome.lam1,
            genome.lam2,
            genome.gamma,
            self.cfg.sub.point_crossover_prob,
            self.cfg.sub.mutation_rate,
        )

    def _fresh(self, genome: HyperGenome) -> RegMetaIndividual:
        ind_id = self._claim_id()
        rows = initial_coefficients(
            self.cfg.sub.initial_population, genome.d + 1, stream(self.seed, SUB_INIT, ind_id)
        )
        return RegMetaIndividual(genome=genome, id=ind_id, sub=Population(rows), ops=self._ops(genome))

    def _inherit(
        self, parent: RegMetaIndividual, genome: HyperGenome, rng: np.random.Generator
    ) -> RegMetaIndividual:
        """Child takes a resized copy of the parent's coefficients.  Any
        hyperparameter change redefines the sub objective, so the stored
        sub fitness and elite only survive when the genome is unchanged."""
        sub = resize_coefficients(parent.sub, parent.genome.d, genome.d, rng)
        child = RegMetaIndividual(genome=genome, id=self._claim_id(), sub=sub, ops=self._ops(genome))
        if genome == parent.genome:
            elite = getattr(parent.sub, "elite", None)
            if elite is not None:
                sub.elite = Elite(elite.genome.copy(), elite.fitness, elite.cost, elite.id)
            if parent.model is not None:
                child.model = parent.model.copy()
        return child

    def train_all(self) -> None:
        for ind in self.individuals:
            rng = stream(self.seed, SUB_TRAIN, ind.id, self.gen)
            result = ga_run(ind.sub, ind.ops, self.cfg.sub, self.cfg.k_subgens, rng, record=False)
            ind.sub = result.population
            ind.model = result.best.genome.copy()

    def score(self, spec: OracleSpec) -> None:
        for ind in self.individuals:
            preds = ind.ops.design_matrix(ind.model.size) @ ind.model
            ind.cost = oracle_cost(spec, preds)
            ind.fitness = float(np.exp(-ind.cost))

    def truncate(self) -> None:
        cap = self.cfg.meta.cap
        if len(self.individuals) <= cap:
            return
        ranked = sorted(self.individuals, key=lambda i: (-i.fitness, i.cost, i.id))
        keep = {id(ind) for ind in ranked[:cap]}
        self.individuals = [ind for ind in self.individuals if id(ind) in keep]

    def best_member(self) -> RegMetaIndividual:
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

        survivors: list[RegMetaIndividual] = []
        seen: set[int] = set()
        for idx in sel_idx:
            idx = int(idx)
            ind = inds[idx]
            if idx in seen:
                ind = self._inherit(ind, ind.genome, rng)
            else:
                seen.add(idx)
            survivors.append(ind)

        k = len(survivors)
        cross_u = rng.random(k)
        partner_u = rng.random(k)
        offspring: list[RegMetaIndividual] = []
        if k > 1 and self.cfg.meta.crossover_rate > 0.0:
            for i in range(k):
                if cross_u[i] < self.cfg.meta.crossover_rate:
                    j = int(partner_u[i] * (k - 1))
                    j += j >= i
                    a, b = survivors[i], survivors[j]
                    children = hyper_crossover(
                        a.genome, b.genome, self.cfg.meta.point_crossover_prob, rng
                    )
                    parent = b if _better(b, a) else a
                    for child_genome in children:
                        offspring.append(self._inherit(parent, child_genome, rng))

        mutants = [
            self._inherit(ind, hyper_mutation(ind.genome, self.cfg.meta.mutation_rate, rng), rng)
            for ind in survivors
        ]

        new = survivors + offspring + mutants
        if survivors:
            best = _best_of(survivors)
            while len(new) < self.cfg.meta.min_population:
                partner = new[int(rng.integers(len(new)))]
                child_genome, _ = hyper_crossover(
                    best.genome, partner.genome, self.cfg.meta.point_crossover_prob, rng
                )
                child_genome = hyper_mutation(child_genome, self.cfg.meta.mutation_rate, rng)
                parent = partner if _better(partner, best) else best
                new.append(self._inherit(parent, child_genome, rng))
        self.individuals = new


def run_regression_hierarchy(
    dataset: Dataset,
    spec: OracleSpec,
    cfg: HierConfig | None = None,
    initial_genomes: list[HyperGenome] | None = None,
) -> tuple[np.ndarray, HyperGenome, RegMetaHistory]:
    """Full two-level run; returns (best model coefficients, its
    hyperparameter genome, history).  "Best" is the lowest oracle cost
    ever submitted.  `initial_genomes` pins the first population slots
    to known hyperparameter genomes; the rest are drawn randomly."""
    if cfg is None:
        cfg = default_regression_hier_config()
    state = RegressionHierState(dataset, cfg, initial_genomes)
    history = RegMetaHistory()
    best_cost = np.inf
    best_coeffs: np.ndarray | None = None
    best_genome: HyperGenome | None = None
    for g in range(cfg.meta_generations):
        t0 = time.perf_counter()
        state.train_all()
        state.score(spec)
        state.truncate()
        gen_best = state.best_member()
        if gen_best.cost < best_cost:
            best_cost = gen_best.cost
            best_coeffs = gen_best.model.copy()
            best_genome = replace(gen_best.genome)
        mean_cost = float(np.mean([i.cost for i in state.individuals]))
        wall_ms = (time.perf_counter() - t0) * 1e3
        history.record(state.gen, gen_best.cost, mean_cost, len(state.individuals), "oracle", wall_ms)
        history.best_genomes.append(replace(gen_best.genome))
        history.best_coeffs.append(gen_best.model.copy())
        if g < cfg.meta_generations - 1:
            state.evolve()
        state.gen += 1
    return best_coeffs, best_genome, history
