"""Synthetic curve-fitting datasets: y_i = p(x_i) + Gaussian noise."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..rng import DATASET, stream
from .polynomial import eval_poly


@dataclass
class Dataset:
    xs: np.ndarray
    ys: np.ndarray

    def __post_init__(self) -> None:
        self.xs = np.asarray(self.xs, dtype=float)
        self.ys = np.asarray(self.ys, dtype=float)
        if self.xs.shape != self.ys.shape or self.xs.ndim != 1 or self.xs.size < 1:
            raise ValueError("xs and ys must be equal-length 1-D arrays with >= 1 sample")
        if not (np.isfinite(self.xs).all() and np.isfinite(self.ys).all()):
            raise ValueError("samples must be finite")

    def __len__(self) -> int:
        return self.xs.size


def generate_dataset(
    coeffs, noise_sigma: float, x_lo: float, x_hi: float, n: int, seed: int
) -> Dataset:
    """n evenly spaced x in [x_lo, x_hi]; y = p(x) + N(0, noise_sigma^2),
    drawn from the dataset stream of `seed` (separate from solver
    streams)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if not x_lo < x_hi:
        raise ValueError("x_lo must be < x_hi")
    if noise_sigma < 0.0:
        raise ValueError("noise_sigma must be >= 0")
    xs = np.linspace(x_lo, x_hi, n)
    noise = stream(seed, DATASET).normal(0.0, noise_sigma, n) if noise_sigma > 0 else 0.0
    return Dataset(xs, eval_poly(coeffs, xs) + noise)
