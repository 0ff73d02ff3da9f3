"""Hidden evaluation oracle for the regression meta-solver.

The solver side submits predicted y values and receives a single scalar
cost; which loss the oracle applies (plain Huber or region-weighted
Huber) and the true data stay on this side of the boundary.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import Dataset
from .losses import LossParams, RegionWeight, huber_terms

HUBER = "huber"
WEIGHTED_HUBER = "weighted_huber"


@dataclass
class OracleSpec:
    truth: Dataset
    kind: str = HUBER
    delta: float = 0.2
    region_weight: RegionWeight | None = None

    def __post_init__(self) -> None:
        if self.kind not in (HUBER, WEIGHTED_HUBER):
            raise ValueError(f"unknown oracle kind: {self.kind!r}")
        if self.delta <= 0.0:
            raise ValueError("delta must be > 0")
        if self.kind == WEIGHTED_HUBER and self.region_weight is None:
            raise ValueError("weighted oracle needs a region_weight")

    @property
    def params(self) -> LossParams:
        return LossParams(delta=self.delta)


def oracle_cost(spec: OracleSpec, pred) -> float:
    """Scalar cost of the submitted predictions against the hidden truth."""
    p = np.asarray(pred, dtype=float)
    if p.shape != spec.truth.ys.shape:
        raise ValueError("length mismatch")
    terms = huber_terms(spec.truth.ys, p, spec.delta)
    if spec.kind == WEIGHTED_HUBER:
        terms = terms * spec.region_weight(spec.truth.xs)
    return float(terms.mean())
