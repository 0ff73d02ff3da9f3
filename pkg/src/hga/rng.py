"""Seedable, splittable random streams.

Every stochastic component draws from a PCG64 generator derived from
(master seed, *key) via SeedSequence spawn keys.  Streams with distinct
keys are statistically independent, and a fixed (seed, key) pair always
yields the same stream, so runs are reproducible no matter how work is
ordered or interleaved.

Key tags used across the package (first key element):
    0  meta population init          4  instance point sampling
    1  meta evolution, generation g  5  penalty map sampling
    2  sub-solver training (id, g)   6  dataset noise
    3  sub-solver init (id)          7  constraint-switch redraw (phase)
"""

from __future__ import annotations

import numpy as np

META_INIT = 0
META_EVOLVE = 1
SUB_TRAIN = 2
SUB_INIT = 3
INSTANCE = 4
PENALTY = 5
DATASET = 6
SWITCH = 7


def stream(seed: int, *key: int) -> np.random.Generator:
    """Return the generator for (seed, key). Same arguments, same stream."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=key))
