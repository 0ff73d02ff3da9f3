"""Euclidean TSP instances and tour scoring.

Tours are arrays of vertex ids and are always open paths: the cost sums
consecutive edges only, with no return edge to the start.
"""

from __future__ import annotations

import numpy as np

from ..rng import INSTANCE, stream

FITNESS_EXP_CLAMP = 700.0  # keeps exp() finite in float64


class EuclideanInstance:
    """Point set with the full symmetric distance matrix precomputed."""

    def __init__(self, points) -> None:
        pts = np.asarray(points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 2:
            raise ValueError("points must be an (n, 2) array")
        if pts.shape[0] < 1:
            raise ValueError("instance needs at least one point")
        if not np.isfinite(pts).all():
            raise ValueError("coordinates must be finite")
        self.points = pts
        diff = pts[:, None, :] - pts[None, :, :]
        self.dist = np.sqrt((diff**2).sum(axis=-1))

    @property
    def n(self) -> int:
        return self.points.shape[0]


def random_instance(n: int, seed: int) -> EuclideanInstance:
    """n points uniform in the unit square, from the instance stream of
    `seed` (separate from solver streams, so one instance can be solved
    under many solver seeds)."""
    rng = stream(seed, INSTANCE)
    return EuclideanInstance(rng.random((n, 2)))


def path_cost(inst: EuclideanInstance, tour) -> float:
    """Sum of consecutive-pair distances along an open path; <= 1 vertex
    costs 0."""
    t = np.asarray(tour, dtype=np.int64)
    if t.size and (t.min() < 0 or t.max() >= inst.n):
        raise ValueError("invalid vertex")
    if t.size <= 1:
        return 0.0
    return float(inst.dist[t[:-1], t[1:]].sum())


def tsp_fitness(inst: EuclideanInstance, tour) -> float:
    """exp(|V'| / max(cost, 1e-9)), exponent clamped so the result stays
    finite.  Shorter tours over the same subset score strictly higher."""
    t = np.asarray(tour, dtype=np.int64)
    exponent = t.size / max(path_cost(inst, t), 1e-9)
    return float(np.exp(min(exponent, FITNESS_EXP_CLAMP)))
