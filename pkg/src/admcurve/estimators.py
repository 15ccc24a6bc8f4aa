"""Scikit-learn style curve estimators.

``fit`` takes the quoted maturities as X and the quoted rates or spreads as
y, bootstraps the piecewise-constant mean-reversion levels of the chosen
dynamics, and stores the fitted curve.  ``predict`` evaluates the primary
quantity (discount factor for OIS strips, survival probability for CDS
strips) at arbitrary times inside the knot span.  Both estimators follow the
BaseEstimator contract, so ``get_params`` / ``set_params`` / ``clone`` and
pipeline composition behave as usual.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator

from .calibration import BootstrapConfig, bootstrap, repricing_errors, residuals_for
from .discount import as_discount_curve
from .dynamics import ExtendedCIRDynamics, LevyOUDynamics
from .levy import make_driver
from .schedules import cds_quotes, ois_quotes
from .validation import as_1d_array


class _CurveEstimator(BaseEstimator):
    """Shared fit/predict plumbing; subclasses provide the dynamics."""

    def _build_dynamics(self):
        raise NotImplementedError

    def _quotes(self, maturities, rates):
        mats = as_1d_array(maturities, "maturities")
        vals = as_1d_array(rates, "rates")
        if self.instrument == "ois":
            return ois_quotes(mats, vals)
        if self.instrument == "cds":
            return cds_quotes(mats, vals, recovery=self.recovery,
                              frequency=self.frequency)
        raise ValueError(f"instrument must be 'ois' or 'cds', got {self.instrument!r}")

    def fit(self, X, y):
        """Bootstrap levels from quoted maturities X and rates/spreads y."""
        quotes = self._quotes(X, y)
        dynamics = self._build_dynamics()
        discount = None
        if self.instrument == "cds":
            discount = as_discount_curve(self.discount)
        residuals = residuals_for(quotes, discount,
                                  panels_per_period=self.protection_panels)
        cfg = self.config or BootstrapConfig()
        self.curve_ = bootstrap(residuals, dynamics, cfg)
        self.quotes_ = quotes
        self.knots_ = self.curve_.knots
        self.levels_ = np.asarray(self.curve_.levels)
        self.repricing_errors_ = repricing_errors(residuals, self.curve_)
        self.verdict_ = self.curve_.verify()
        self.admissible_ = bool(self.verdict_.admissible)
        return self

    def _check_fitted(self):
        if not hasattr(self, "curve_"):
            raise AttributeError("estimator is not fitted yet; call fit first")

    def predict(self, X):
        """Curve values P(0, t) at the requested times."""
        self._check_fitted()
        return self.curve_.value(np.asarray(X, dtype=float))

    def forward_rate(self, X):
        self._check_fitted()
        return self.curve_.forward(np.asarray(X, dtype=float))

    def spot_rate(self, X):
        self._check_fitted()
        return self.curve_.spot(np.asarray(X, dtype=float))

    def sample(self, step: float = 0.05) -> np.ndarray:
        self._check_fitted()
        return self.curve_.sample(step)


class LevyOUCurve(_CurveEstimator):
    """Admissible curve fitted with Levy-OU short-rate / intensity dynamics.

    Parameters
    ----------
    x0, a, sigma, c : process parameters (initial value, reversion speed,
        volatility scale, jump-frequency time change).
    driver : "brownian", "gamma" or "ig".
    jump_scale : inverse mean jump size of the subordinator drivers.
    instrument : "ois" or "cds".
    recovery, discount, frequency : CDS-only inputs (expected recovery,
        discounting curve or flat rate, premium payments per year).
    """

    def __init__(self, x0=0.00063, a=0.01, sigma=1.0, c=10.0,
                 driver="gamma", jump_scale=200.0,
                 instrument="ois", recovery=0.4, discount=0.03, frequency=4,
                 protection_panels=1, config=None):
        self.x0 = x0
        self.a = a
        self.sigma = sigma
        self.c = c
        self.driver = driver
        self.jump_scale = jump_scale
        self.instrument = instrument
        self.recovery = recovery
        self.discount = discount
        self.frequency = frequency
        self.protection_panels = protection_panels
        self.config = config

    def _build_dynamics(self):
        drv = make_driver(self.driver, self.jump_scale)
        return LevyOUDynamics(drv, self.x0, self.a, self.sigma, self.c)


class ExtendedCIRCurve(_CurveEstimator):
    """Admissible curve fitted with extended square-root dynamics."""

    def __init__(self, x0=0.0097, a=1.0, sigma=1.0,
                 instrument="cds", recovery=0.4, discount=0.03, frequency=4,
                 protection_panels=1, config=None):
        self.x0 = x0
        self.a = a
        self.sigma = sigma
        self.instrument = instrument
        self.recovery = recovery
        self.discount = discount
        self.frequency = frequency
        self.protection_panels = protection_panels
        self.config = config

    def _build_dynamics(self):
        return ExtendedCIRDynamics(self.x0, self.a, self.sigma)
