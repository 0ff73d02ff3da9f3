"""Hyperparameter genomes, the resize repair, the hidden oracle, and the
two-level regression run."""

import ast
import inspect
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import hga.regression.solver as solver_module
from hga.ga.population import Population
from hga.regression.dataset import generate_dataset
from hga.regression.hierarchy import (
    RegressionHierState,
    default_regression_hier_config,
    run_regression_hierarchy,
)
from hga.regression.hyper import (
    HyperGenome,
    hyper_crossover,
    hyper_mutation,
    initial_hyper_population,
    resize_coefficients,
)
from hga.regression.losses import RegionWeight
from hga.regression.oracle import HUBER, WEIGHTED_HUBER, OracleSpec, oracle_cost
from hga.regression.polynomial import eval_poly
from hga.rng import stream


class QueuedRng:
    """Stub generator replaying queued uniform/normal draws."""

    def __init__(self, uniforms, normals=()):
        self.uniforms = list(uniforms)
        self.normals = list(normals)

    def random(self):
        return self.uniforms.pop(0)

    def normal(self, loc, scale):
        return self.normals.pop(0)


def small_cfg(seed=0, meta_pop=6, meta_gens=3, k_subgens=3, sub_pop=14):
    cfg = default_regression_hier_config(seed)
    return replace(
        cfg,
        meta=replace(cfg.meta, initial_population=meta_pop, min_population=max(2, meta_pop // 3)),
        sub=replace(cfg.sub, initial_population=sub_pop, min_population=max(2, sub_pop // 4)),
        k_subgens=k_subgens,
        meta_generations=meta_gens,
    )


def genomes():
    return st.builds(
        HyperGenome,
        lam1=st.floats(min_value=0.0, max_value=3.0, allow_nan=False),
        lam2=st.floats(min_value=0.0, max_value=1.0, allow_nan=False),
        d=st.integers(min_value=0, max_value=8),
        gamma=st.floats(min_value=0.0, max_value=1.0, allow_nan=False),
    )


def slots(h):
    return (h.lam1, h.lam2, h.d, h.gamma)


def test_hyper_genome_validation():
    with pytest.raises(ValueError, match="lambda weights"):
        HyperGenome(-0.1, 0.0, 1, 0.5)
    with pytest.raises(ValueError, match="lambda weights"):
        HyperGenome(0.0, -0.1, 1, 0.5)
    with pytest.raises(ValueError, match="degree"):
        HyperGenome(0.0, 0.0, -1, 0.5)
    with pytest.raises(ValueError, match="degree"):
        HyperGenome(0.0, 0.0, 1.5, 0.5)
    with pytest.raises(ValueError, match="gamma"):
        HyperGenome(0.0, 0.0, 1, 1.5)


def test_hyper_crossover_extremes():
    h1 = HyperGenome(1.0, 0.2, 3, 0.7)
    h2 = HyperGenome(0.5, 0.1, 5, 0.2)
    a, b = hyper_crossover(h1, h2, 0.0, stream(0))
    assert slots(a) == slots(h1) and slots(b) == slots(h2)
    a, b = hyper_crossover(h1, h2, 1.0, stream(0))
    assert slots(a) == slots(h2) and slots(b) == slots(h1)


@given(h1=genomes(), h2=genomes(), c=st.floats(min_value=0.0, max_value=1.0, allow_nan=False), seed=st.integers(min_value=0, max_value=2**31))
def test_hyper_crossover_conserves_each_slot(h1, h2, c, seed):
    a, b = hyper_crossover(h1, h2, c, stream(seed))
    for i in range(4):
        assert sorted([slots(a)[i], slots(b)[i]]) == sorted([slots(h1)[i], slots(h2)[i]])


def test_hyper_mutation_zero_rate_is_identity():
    h = HyperGenome(1.0, 0.2, 3, 0.7)
    assert slots(hyper_mutation(h, 0.0, stream(1))) == slots(h)


def test_hyper_mutation_clamps_all_slots():
    # all four gates hit; normals push lam1/lam2 far negative and gamma
    # far positive; the degree step draws 0.9 -> -1
    rng = QueuedRng(uniforms=[0.0, 0.0, 0.0, 0.9, 0.0], normals=[-5.0, -5.0, 5.0])
    out = hyper_mutation(HyperGenome(0.1, 0.05, 0, 0.5), 1.0, rng)
    assert slots(out) == (0.0, 0.0, 0, 1.0)


def test_hyper_mutation_can_raise_degree():
    rng = QueuedRng(uniforms=[0.5, 0.5, 0.0, 0.4, 0.5])
    out = hyper_mutation(HyperGenome(0.1, 0.05, 2, 0.5), 0.3, rng)
    assert out.d == 3
    assert (out.lam1, out.lam2, out.gamma) == (0.1, 0.05, 0.5)


@given(h=genomes(), seed=st.integers(min_value=0, max_value=2**31))
@settings(max_examples=80)
def test_hyper_mutation_outputs_stay_valid(h, seed):
    out = hyper_mutation(h, 1.0, stream(seed))
    assert out.lam1 >= 0.0 and out.lam2 >= 0.0
    assert isinstance(out.d, int) and out.d >= 0
    assert 0.0 <= out.gamma <= 1.0


def test_initial_hyper_population_ranges():
    pop = initial_hyper_population(200, stream(4))
    assert len(pop) == 200
    assert all(0.0 <= h.lam1 < 2.0 for h in pop)
    assert all(0.0 <= h.lam2 < 0.5 for h in pop)
    assert all(0 <= h.d <= 8 for h in pop)
    assert all(0.0 <= h.gamma < 1.0 for h in pop)
    assert {h.d for h in pop} == set(range(9))
    again = initial_hyper_population(200, stream(4))
    assert [slots(h) for h in pop] == [slots(h) for h in again]
    with pytest.raises(ValueError, match="size must be >= 1"):
        initial_hyper_population(0, stream(0))


def test_resize_pads_with_zeros_and_truncates():
    pop = Population(np.array([[1.0, 2.0, 3.0], [4.0, 5.0, 6.0]]))
    pop.fitness = np.ones(2)
    pop.cost = np.ones(2)
    up = resize_coefficients(pop, 2, 4, stream(0))
    assert np.array_equal(up.genomes, [[1, 2, 3, 0, 0], [4, 5, 6, 0, 0]])
    assert np.isnan(up.fitness).all()
    assert np.array_equal(up.ids, pop.ids)
    down = resize_coefficients(pop, 2, 1, stream(0))
    assert np.array_equal(down.genomes, [[1, 2], [4, 5]])
    same = resize_coefficients(pop, 2, 2, stream(0))
    assert np.array_equal(same.genomes, pop.genomes)
    with pytest.raises(ValueError, match="width"):
        resize_coefficients(pop, 3, 4, stream(0))


def test_oracle_spec_validation():
    ds = generate_dataset([1.0], 0.0, 0.0, 1.0, 5, 0)
    with pytest.raises(ValueError, match="unknown oracle kind"):
        OracleSpec(ds, "mse")
    with pytest.raises(ValueError, match="delta"):
        OracleSpec(ds, HUBER, 0.0)
    with pytest.raises(ValueError, match="region_weight"):
        OracleSpec(ds, WEIGHTED_HUBER)
    spec = OracleSpec(ds, WEIGHTED_HUBER, 0.2, RegionWeight())
    assert spec.params.delta == 0.2


def test_oracle_cost_values():
    ds = generate_dataset([2.0], 0.0, 0.0, 1.0, 4, 0)
    spec = OracleSpec(ds, HUBER, 0.2)
    assert oracle_cost(spec, ds.ys) == 0.0
    # every prediction off by 1: linear zone, 0.2*1 - 0.02
    assert oracle_cost(spec, ds.ys - 1.0) == pytest.approx(0.18, abs=1e-12)
    with pytest.raises(ValueError, match="length mismatch"):
        oracle_cost(spec, ds.ys[:2])


def test_weighted_oracle_with_unit_weights_matches_plain():
    ds = generate_dataset([1.0, -2.0], 0.1, -1.0, 1.0, 30, 5)
    pred = ds.ys + stream(6).normal(0.0, 0.5, 30)
    plain = oracle_cost(OracleSpec(ds, HUBER, 0.2), pred)
    unit = oracle_cost(OracleSpec(ds, WEIGHTED_HUBER, 0.2, RegionWeight()), pred)
    assert unit == pytest.approx(plain, rel=1e-12)
    heavy = oracle_cost(
        OracleSpec(ds, WEIGHTED_HUBER, 0.2, RegionWeight(rules=((0.0, 1.0, 10.0),))), pred
    )
    assert heavy != pytest.approx(plain, rel=1e-12)


def test_solver_module_never_imports_the_oracle():
    # the sub-solver optimizes its composite objective only; the oracle
    # stays on the meta side of the boundary
    tree = ast.parse(inspect.getsource(solver_module))
    imported = []
    for node in ast.walk(tree):
        if isinstance(node, ast.Import):
            imported += [a.name for a in node.names]
        elif isinstance(node, ast.ImportFrom):
            imported.append(node.module or "")
    assert not any("oracle" in name for name in imported)


def test_hierarchy_sub_population_width_tracks_degree():
    ds = generate_dataset([1.0, 2.0], 0.1, 0.0, 2.0, 20, 0)
    spec = OracleSpec(ds, HUBER, 0.2)
    cfg = small_cfg(seed=2, meta_gens=4)
    state = RegressionHierState(ds, cfg)
    for _ in range(cfg.meta_generations):
        state.train_all()
        state.score(spec)
        state.truncate()
        for ind in state.individuals:
            assert ind.sub.genomes.shape[1] == ind.genome.d + 1
            assert ind.model is not None and ind.model.shape == (ind.genome.d + 1,)
        state.evolve()
        state.gen += 1
        for ind in state.individuals:
            assert ind.sub.genomes.shape[1] == ind.genome.d + 1


def test_hierarchy_run_is_deterministic():
    ds = generate_dataset([4.0, 3.0], 0.2, 0.0, 3.0, 24, 1)
    spec = OracleSpec(ds, HUBER, 0.2)
    coeffs_a, genome_a, hist_a = run_regression_hierarchy(ds, spec, small_cfg(seed=7))
    coeffs_b, genome_b, hist_b = run_regression_hierarchy(ds, spec, small_cfg(seed=7))
    assert np.array_equal(coeffs_a, coeffs_b)
    assert slots(genome_a) == slots(genome_b)
    assert hist_a.column("best_cost") == hist_b.column("best_cost")
    assert [slots(g) for g in hist_a.best_genomes] == [slots(g) for g in hist_b.best_genomes]


def test_hierarchy_reports_its_own_best():
    ds = generate_dataset([4.0, 3.0, 4.0], 0.2, 0.0, 5.0, 40, 0)
    spec = OracleSpec(ds, HUBER, 0.2)
    cfg = small_cfg(seed=3, meta_gens=5, k_subgens=5, sub_pop=30)
    coeffs, genome, history = run_regression_hierarchy(ds, spec, cfg)
    assert coeffs.shape == (genome.d + 1,)
    assert len(history) == 5
    assert history.column("phase") == ["oracle"] * 5
    assert len(history.best_genomes) == 5
    assert len(history.best_coeffs) == 5
    # the returned model achieves the best oracle cost ever recorded
    assert oracle_cost(spec, eval_poly(coeffs, ds.xs)) == pytest.approx(
        min(history.column("best_cost")), rel=1e-12
    )


def test_hierarchy_with_realizable_optimum_converges_toward_zero():
    # noiseless data and a seeded perfect hyper setup: plain MSE at the
    # true degree can drive the oracle cost to ~0
    ds = generate_dataset([2.0, 1.0], 0.0, 0.0, 2.0, 20, 0)
    spec = OracleSpec(ds, HUBER, 0.2)
    cfg = small_cfg(seed=0, meta_pop=8, meta_gens=5, k_subgens=40, sub_pop=60)
    seeded = [HyperGenome(0.0, 0.0, 1, 0.5)]
    coeffs, _, history = run_regression_hierarchy(ds, spec, cfg, initial_genomes=seeded)
    assert min(history.column("best_cost")) < 1e-3
    assert oracle_cost(spec, eval_poly(coeffs, ds.xs)) < 1e-3
