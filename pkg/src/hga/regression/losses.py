"""Loss zoo for curve fitting.

Every loss is the mean of a per-sample term, so the region-weighted
variant can scale individual terms before averaging:

    mse       r^2 / 2          (so the mean is the 1/(2N) sum)
    mae       |r|
    quantile  gamma*r if r > 0 else (1-gamma)*(-r)   with r = truth - pred
    huber     r^2 / 2 below delta, delta*|r| - delta^2/2 above

The composite sub-solver objective is
mse + lambda1 * quantile(gamma) + lambda2 * sum(a_k^2), with the L2 term
covering every coefficient including the constant.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .polynomial import eval_poly


@dataclass
class LossParams:
    """Knobs shared by the parametric losses."""

    gamma: float = 0.5  # quantile weight on under-predictions
    delta: float = 1.0  # huber threshold

    def __post_init__(self) -> None:
        if not 0.0 <= self.gamma <= 1.0:
            raise ValueError("gamma must be in [0, 1]")
        if self.delta <= 0.0:
            raise ValueError("delta must be > 0")


@dataclass
class RegionWeight:
    """Per-sample weight as a function of x: the first rule whose
    half-open interval (lo, hi] contains x wins; otherwise `default`."""

    rules: tuple[tuple[float, float, float], ...] = ()
    default: float = 1.0

    def __post_init__(self) -> None:
        if self.default <= 0.0:
            raise ValueError("weights must be > 0")
        for lo, hi, w in self.rules:
            if w <= 0.0:
                raise ValueError("weights must be > 0")
            if not lo < hi:
                raise ValueError("empty weight interval")

    def __call__(self, xs) -> np.ndarray:
        x = np.asarray(xs, dtype=float)
        out = np.full(x.shape, self.default)
        unset = np.ones(x.shape, dtype=bool)
        for lo, hi, w in self.rules:
            hit = unset & (x > lo) & (x <= hi)
            out[hit] = w
            unset &= ~hit
        return out


def _residuals(truth, pred) -> np.ndarray:
    t = np.asarray(truth, dtype=float)
    p = np.asarray(pred, dtype=float)
    if t.shape != p.shape or t.ndim != 1 or t.size < 1:
        raise ValueError("length mismatch")
    return t - p


def mse_terms(truth, pred) -> np.ndarray:
    return _residuals(truth, pred) ** 2 / 2.0


def mae_terms(truth, pred) -> np.ndarray:
    return np.abs(_residuals(truth, pred))


def quantile_terms(truth, pred, gamma: float) -> np.ndarray:
    r = _residuals(truth, pred)
    return np.where(r > 0.0, gamma * r, (1.0 - gamma) * -r)


def huber_terms(truth, pred, delta: float) -> np.ndarray:
    r = np.abs(_residuals(truth, pred))
    return np.where(r < delta, r**2 / 2.0, delta * r - delta**2 / 2.0)


def mse_loss(truth, pred) -> float:
    """(1/2N) sum of squared residuals -- note the extra factor 1/2."""
    return float(mse_terms(truth, pred).mean())


def mae_loss(truth, pred) -> float:
    """Mean absolute residual."""
    return float(mae_terms(truth, pred).mean())


def quantile_loss(truth, pred, gamma: float) -> float:
    """Mean pinball loss: under-predictions (truth > pred) weigh gamma,
    over-predictions 1 - gamma, exact hits 0."""
    if not 0.0 <= gamma <= 1.0:
        raise ValueError("gamma must be in [0, 1]")
    return float(quantile_terms(truth, pred, gamma).mean())


def huber_loss(truth, pred, delta: float) -> float:
    """Mean Huber term: quadratic inside |r| < delta, linear outside,
    continuous at the threshold."""
    if delta <= 0.0:
        raise ValueError("delta must be > 0")
    return float(huber_terms(truth, pred, delta).mean())


BASE_LOSSES = ("mse", "mae", "quantile", "huber")


def loss_terms(base: str, truth, pred, params: LossParams) -> np.ndarray:
    """Per-sample terms of a named base loss (their mean is the loss)."""
    if base == "mse":
        return mse_terms(truth, pred)
    if base == "mae":
        return mae_terms(truth, pred)
    if base == "quantile":
        return quantile_terms(truth, pred, params.gamma)
    if base == "huber":
        return huber_terms(truth, pred, params.delta)
    raise ValueError(f"unknown base loss: {base!r}")


def weighted_loss(truth, pred, xs, base: str, params: LossParams, region_weight: RegionWeight) -> float:
    """Mean of per-sample base-loss terms scaled by region_weight(x_i)."""
    terms = loss_terms(base, truth, pred, params)
    x = np.asarray(xs, dtype=float)
    if x.shape != terms.shape:
        raise ValueError("length mismatch")
    return float((terms * region_weight(x)).mean())


def composite_objective(dataset, coeffs, lam1: float, lam2: float, gamma: float) -> float:
    """mse + lam1 * quantile(gamma) + lam2 * sum(a_k^2) of the model's
    predictions on the dataset."""
    if lam1 < 0.0 or lam2 < 0.0:
        raise ValueError("lambda weights must be >= 0")
    a = np.asarray(coeffs, dtype=float)
    preds = eval_poly(a, dataset.xs)
    ys = np.asarray(dataset.ys, dtype=float)
    return (
        mse_loss(ys, preds)
        + lam1 * quantile_loss(ys, preds, gamma)
        + lam2 * float((a**2).sum())
    )
