"""Generation engine: stepping, elitism, floors, caps, determinism."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hga.ga.config import (
    PERCENTILE,
    RANDOM,
    SOFTMAX,
    TOURNAMENT,
    GaConfig,
    HierConfig,
    SelectionSpec,
)
from hga.ga.engine import (
    Elite,
    evaluate_population,
    maintain_floor,
    run,
    step_generation,
    update_elite,
)
from hga.ga.population import Population
from hga.rng import stream


class QuadraticOps:
    """Minimize sum(x_i^2) over real vectors; fitness is the negated cost."""

    def __init__(self, mutation_rate=0.5, point_crossover_prob=0.5):
        self.m = mutation_rate
        self.c = point_crossover_prob

    def evaluate(self, genomes):
        cost = (genomes**2).sum(axis=1)
        return -cost, cost

    def crossover_batch(self, a, b, rng):
        swap = rng.random(a.shape) < self.c
        return np.where(swap, b, a)

    def mutate_batch(self, genomes, rng):
        hit = rng.random(genomes.shape) < self.m
        return genomes + hit * rng.normal(0.0, 1.0, genomes.shape)


def quad_config(**kw):
    base = dict(
        initial_population=12,
        min_population=4,
        mutation_rate=0.5,
        crossover_rate=0.7,
        point_crossover_prob=0.5,
        selection=SelectionSpec(kind=SOFTMAX, keep_fraction=0.5),
        seed=0,
    )
    base.update(kw)
    return GaConfig(**base)


def fresh_pop(n, width, seed):
    return Population(stream(seed).normal(0.0, 2.0, (n, width)))


def test_population_validation():
    with pytest.raises(ValueError, match="2-D"):
        Population(np.zeros(4))
    pop = Population(np.zeros((3, 2)))
    assert pop.size == 3
    assert list(pop.ids) == [0, 1, 2]
    assert np.isnan(pop.fitness).all()
    assert pop.claim_ids(2).tolist() == [3, 4]
    assert pop.next_id == 5


def test_config_validation():
    with pytest.raises(ValueError, match="initial_population"):
        quad_config(initial_population=0, min_population=1)
    with pytest.raises(ValueError, match="min_population"):
        quad_config(min_population=20)
    with pytest.raises(ValueError, match="mutation_rate"):
        quad_config(mutation_rate=1.5)
    with pytest.raises(ValueError, match="max_population"):
        quad_config(max_population=5)
    with pytest.raises(ValueError, match="k_subgens"):
        HierConfig(meta=quad_config(), sub=quad_config(), k_subgens=0, meta_generations=5)
    with pytest.raises(ValueError, match="meta_generations"):
        HierConfig(meta=quad_config(), sub=quad_config(), k_subgens=5, meta_generations=0)
    assert quad_config().cap == 12
    assert quad_config(max_population=30).cap == 30


def test_step_requires_evaluated_population():
    pop = fresh_pop(6, 3, 0)
    with pytest.raises(ValueError, match="unevaluated individual"):
        step_generation(pop, QuadraticOps(), quad_config(), stream(1))


def test_step_rejects_empty_population():
    pop = Population(np.empty((0, 3)))
    with pytest.raises(ValueError, match="empty population"):
        step_generation(pop, QuadraticOps(), quad_config(), stream(1))


def test_zero_rate_step_only_clones_existing_genomes():
    ops = QuadraticOps(mutation_rate=0.0)
    cfg = quad_config(mutation_rate=0.0, crossover_rate=0.0)
    pop = fresh_pop(12, 3, 5)
    evaluate_population(pop, ops)
    old_rows = {tuple(row) for row in pop.genomes}
    new = step_generation(pop, ops, cfg, stream(7))
    assert all(tuple(row) in old_rows for row in new.genomes)
    assert new.generation == 1


@given(
    seed=st.integers(min_value=0, max_value=2**31),
    n=st.integers(min_value=2, max_value=20),
    kind=st.sampled_from([RANDOM, SOFTMAX, PERCENTILE, TOURNAMENT]),
    keep=st.sampled_from([0.25, 0.5, 1.0]),
)
@settings(max_examples=40)
def test_zero_rates_yield_multiset_subset(seed, n, kind, keep):
    ops = QuadraticOps(mutation_rate=0.0)
    cfg = quad_config(
        initial_population=n,
        min_population=1,
        mutation_rate=0.0,
        crossover_rate=0.0,
        selection=SelectionSpec(kind=kind, keep_fraction=keep),
        seed=seed,
    )
    pop = fresh_pop(n, 2, seed)
    evaluate_population(pop, ops)
    old_rows = {tuple(row) for row in pop.genomes}
    new = step_generation(pop, ops, cfg, stream(seed, 99))
    assert all(tuple(row) in old_rows for row in new.genomes)


def test_maintain_floor_appends_until_min():
    ops = QuadraticOps()
    cfg = quad_config(initial_population=12, min_population=5)
    pop = fresh_pop(2, 3, 1)
    evaluate_population(pop, ops)
    best = pop.members[int(np.argmax(pop.fitness))]
    out = maintain_floor(pop, best, cfg, stream(2), ops)
    assert out.size == 5
    assert np.isnan(out.fitness[2:]).all()
    assert len(set(out.ids.tolist())) == 5


def test_maintain_floor_noop_at_or_above_min():
    ops = QuadraticOps()
    cfg = quad_config(min_population=3)
    pop = fresh_pop(3, 3, 1)
    evaluate_population(pop, ops)
    best = pop.members[0]
    before = pop.genomes.copy()
    out = maintain_floor(pop, best, cfg, stream(2), ops)
    assert out.size == 3
    assert np.array_equal(out.genomes, before)


@given(
    seed=st.integers(min_value=0, max_value=2**31),
    n=st.integers(min_value=1, max_value=15),
    floor=st.integers(min_value=1, max_value=15),
    kind=st.sampled_from([RANDOM, SOFTMAX, PERCENTILE, TOURNAMENT]),
)
@settings(max_examples=40)
def test_step_respects_population_floor_and_cap(seed, n, floor, kind):
    floor = min(floor, n)
    ops = QuadraticOps()
    cfg = quad_config(
        initial_population=n,
        min_population=floor,
        selection=SelectionSpec(kind=kind, keep_fraction=0.25, sample_fraction=0.5),
        seed=seed,
    )
    pop = fresh_pop(n, 2, seed)
    evaluate_population(pop, ops)
    new = step_generation(pop, ops, cfg, stream(seed, 98))
    assert floor <= new.size <= cfg.cap
    assert not np.isnan(new.fitness).any()


def test_single_member_population_survives_stepping():
    ops = QuadraticOps()
    cfg = quad_config(
        initial_population=1,
        min_population=1,
        selection=SelectionSpec(kind=PERCENTILE, percentile=50.0),
    )
    pop = fresh_pop(1, 3, 4)
    evaluate_population(pop, ops)
    for _ in range(3):
        pop = step_generation(pop, ops, cfg, stream(5, pop.generation))
        assert pop.size >= 1


def test_update_elite_prefers_strictly_better():
    pop = Population(np.array([[1.0, 0.0]]))
    pop.fitness = np.array([2.0])
    pop.cost = np.array([5.0])
    old = Elite(np.array([9.0, 9.0]), 2.0, 4.0, 7)
    kept = update_elite(pop, old)
    assert kept is old  # equal fitness, higher cost: no replacement
    pop.cost = np.array([3.0])
    swapped = update_elite(pop, old)
    assert swapped.cost == 3.0  # equal fitness, lower cost wins
    pop.fitness = np.array([1.0])
    assert update_elite(pop, old) is old  # worse fitness never replaces


def test_run_best_ever_is_monotone():
    ops = QuadraticOps(mutation_rate=0.2)
    cfg = quad_config(seed=3)
    pop = fresh_pop(12, 4, 3)
    result = run(pop, ops, cfg, 40)
    fit = result.history.column("best_ever_fitness")
    cost = result.history.column("best_ever_cost")
    assert all(b >= a for a, b in zip(fit, fit[1:]))
    assert all(b <= a for a, b in zip(cost, cost[1:]))
    assert result.best.fitness == fit[-1]
    # the elite is held in the final population
    assert result.population.ids.tolist().count(result.best.id) == 1


def test_run_records_generations_inclusive():
    ops = QuadraticOps()
    result = run(fresh_pop(6, 2, 0), ops, quad_config(initial_population=6), 5)
    assert result.history.column("generation") == [0, 1, 2, 3, 4, 5]


def test_run_zero_generations_records_initial_row():
    ops = QuadraticOps()
    result = run(fresh_pop(6, 2, 0), ops, quad_config(initial_population=6), 0)
    assert len(result.history) == 1
    assert result.history.column("generation") == [0]
    assert result.best.fitness == result.history.column("best_ever_fitness")[0]


def test_run_same_seed_replays_exactly():
    ops = QuadraticOps()
    cfg = quad_config(seed=21)
    a = run(fresh_pop(10, 3, 17), ops, cfg, 15)
    b = run(fresh_pop(10, 3, 17), ops, cfg, 15)
    assert np.array_equal(a.population.genomes, b.population.genomes)
    assert np.array_equal(a.population.ids, b.population.ids)
    for col in ("best_fitness", "best_cost", "mean_fitness", "population_size"):
        assert a.history.column(col) == b.history.column(col)
    assert a.best.fitness == b.best.fitness
    assert np.array_equal(a.best.genome, b.best.genome)


def test_run_improves_quadratic_cost():
    ops = QuadraticOps(mutation_rate=0.3)
    cfg = quad_config(initial_population=30, min_population=10, seed=8)
    result = run(fresh_pop(30, 4, 8), ops, cfg, 60)
    first = result.history.column("best_cost")[0]
    assert result.best.cost < 0.25 * first


def test_cap_truncation_keeps_elite_and_respects_cap():
    ops = QuadraticOps()
    cfg = quad_config(
        initial_population=8,
        min_population=2,
        max_population=9,
        crossover_rate=1.0,
        selection=SelectionSpec(kind=SOFTMAX, keep_fraction=1.0),
    )
    pop = fresh_pop(8, 3, 2)
    evaluate_population(pop, ops)
    elite = update_elite(pop, None)
    new = step_generation(pop, ops, cfg, stream(6))
    assert new.size == 9
    best_row = new.genomes[int(np.argmax(new.fitness))]
    assert (best_row**2).sum() <= elite.cost + 1e-12
