"""Objective-hyperparameter genomes for the regression meta-solver.

A genome fixes the sub-solver's composite objective: quantile weight
lam1, L2 weight lam2, polynomial degree d, and quantile gamma.  Slot
order everywhere is (lam1, lam2, d, gamma).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..ga.population import Population

MUT_STD = {"lam1": 0.5, "lam2": 0.1, "gamma": 0.1}


@dataclass
class HyperGenome:
    lam1: float
    lam2: float
    d: int
    gamma: float

    def __post_init__(self) -> None:
        if self.lam1 < 0 or self.lam2 < 0:
            raise ValueError("lambda weights must be >= 0")
        if not isinstance(self.d, (int, np.integer)) or self.d < 0:
            raise ValueError("degree must be an integer >= 0")
        self.d = int(self.d)
        if not 0.0 <= self.gamma <= 1.0:
            raise ValueError("gamma must be in [0, 1]")


def hyper_crossover(
    h1: HyperGenome, h2: HyperGenome, c: float, rng: np.random.Generator
) -> tuple[HyperGenome, HyperGenome]:
    """Swap each of the four slots independently with probability c;
    returns both children."""
    a = [h1.lam1, h1.lam2, h1.d, h1.gamma]
    b = [h2.lam1, h2.lam2, h2.d, h2.gamma]
    for i in range(4):
        if rng.random() < c:
            a[i], b[i] = b[i], a[i]
    return HyperGenome(*a), HyperGenome(*b)


def hyper_mutation(h: HyperGenome, m: float, rng: np.random.Generator) -> HyperGenome:
    """Per slot with probability m: add N(0, 0.5^2) to lam1, N(0, 0.1^2)
    to lam2 and gamma, and +/-1 (uniform) to d; then clamp back into the
    valid ranges."""
    lam1, lam2, d, gamma = h.lam1, h.lam2, h.d, h.gamma
    if rng.random() < m:
        lam1 += rng.normal(0.0, MUT_STD["lam1"])
    if rng.random() < m:
        lam2 += rng.normal(0.0, MUT_STD["lam2"])
    if rng.random() < m:
        d += 1 if rng.random() < 0.5 else -1
    if rng.random() < m:
        gamma += rng.normal(0.0, MUT_STD["gamma"])
    return HyperGenome(max(lam1, 0.0), max(lam2, 0.0), max(d, 0), min(max(gamma, 0.0), 1.0))


def initial_hyper_population(size: int, rng: np.random.Generator) -> list[HyperGenome]:
    """lam1 ~ U[0,2], lam2 ~ U[0,0.5], d ~ UniformInt[0,8], gamma ~ U[0,1]."""
    if size < 1:
        raise ValueError("size must be >= 1")
    return [
        HyperGenome(
            lam1=2.0 * rng.random(),
            lam2=0.5 * rng.random(),
            d=int(rng.integers(0, 9)),
            gamma=rng.random(),
        )
        for _ in range(size)
    ]


def resize_coefficients(pop: Population, d_old: int, d_new: int, rng: np.random.Generator) -> Population:
    """Retarget coefficient rows from degree d_old to d_new: new
    higher-order coefficients start at zero, surplus ones are dropped.
    Fitness is invalidated; ids and generation carry over.  (rng is part
    of the signature for parity with the other repair operations; the
    resize itself is deterministic.)"""
    if pop.genomes.shape[1] != d_old + 1:
        raise ValueError("population width does not match d_old + 1")
    rows = pop.genomes
    if d_new > d_old:
        pad = np.zeros((pop.size, d_new - d_old))
        rows = np.concatenate([rows, pad], axis=1)
    elif d_new < d_old:
        rows = rows[:, : d_new + 1].copy()
    else:
        rows = rows.copy()
    out = Population(rows, generation=pop.generation, next_id=pop.next_id)
    out.ids = pop.ids.copy()
    return out
