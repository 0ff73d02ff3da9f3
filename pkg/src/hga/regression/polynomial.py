"""Polynomial models as plain coefficient arrays: coeffs[k] multiplies x^k."""

from __future__ import annotations

import numpy as np


def eval_poly(coeffs, x):
    """Horner evaluation of sum(a_k x^k); x may be a scalar or an array."""
    a = np.asarray(coeffs, dtype=float)
    if a.ndim != 1 or a.size < 1:
        raise ValueError("coeffs must be a non-empty 1-D array")
    x = np.asarray(x, dtype=float)
    out = np.full_like(x, a[-1])
    for k in range(a.size - 2, -1, -1):
        out = out * x + a[k]
    return float(out) if out.ndim == 0 else out
