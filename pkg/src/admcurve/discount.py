"""Discounting curves used as exogenous inputs to the credit-side formulas.

A discount curve only needs two evaluable maps: ``value(t)`` returning
P(0, t) with P(0, 0) = 1, and ``forward(t)`` returning the instantaneous
forward rate f(0, t) = -d log P / dt.  Any object with those two methods is
accepted wherever the library asks for a discount curve; the calibrated
curves produced by this package satisfy the same contract.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class FlatDiscountCurve:
    """P(0, t) = exp(-r t) with constant continuously compounded rate r."""

    rate: float

    def value(self, t):
        return np.exp(-self.rate * np.asarray(t, dtype=float))

    def forward(self, t):
        return np.full_like(np.asarray(t, dtype=float), self.rate)


def as_discount_curve(curve_or_rate) -> object:
    """Accept a ready curve object or a plain flat rate."""
    if hasattr(curve_or_rate, "value") and hasattr(curve_or_rate, "forward"):
        return curve_or_rate
    return FlatDiscountCurve(float(curve_or_rate))


def check_monotone_discount(curve, horizon: float, step: float = 0.25) -> None:
    """Sanity check P(0, .) is nonincreasing on a sample grid, P(0, 0) = 1."""
    ts = np.arange(0.0, horizon + 0.5 * step, step)
    vals = np.asarray(curve.value(ts), dtype=float)
    if abs(vals[0] - 1.0) > 1e-12:
        raise ValueError("discount curve must satisfy P(0, 0) = 1")
    if np.any(np.diff(vals) > 1e-12):
        raise ValueError("discount curve must be nonincreasing in maturity")
