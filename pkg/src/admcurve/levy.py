"""Levy drivers for the mean-reverting short-rate / intensity dynamics.

Each driver knows its cumulant transform ``kappa(theta) = log E[exp(theta Y_1)]``
and the derivative ``kappa'``.  Only closed-form cumulants are supported:

    Brownian motion        kappa(theta) = theta^2 / 2
    Gamma subordinator     kappa(theta) = -log(1 - theta / lam)
    Inverse Gaussian       kappa(theta) = lam - sqrt(lam^2 - 2 theta)

``lam`` is the jump-scale parameter (inverse mean jump size) of the
subordinators.  All evaluation happens on theta <= 0, where every family is
finite and kappa' is strictly increasing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .quadrature import integrate
from .tolerances import tol
from .validation import check_positive_scalar


class DomainError(ValueError):
    """Cumulant evaluated outside the family's domain."""


@dataclass(frozen=True)
class BrownianMotion:
    name = "brownian"

    def cumulant(self, theta):
        return 0.5 * np.square(theta)

    def cumulant_deriv(self, theta):
        return np.asarray(theta, dtype=float) + 0.0


@dataclass(frozen=True)
class GammaSubordinator:
    lam: float
    name = "gamma"

    def __post_init__(self):
        check_positive_scalar(self.lam, "lam")

    def cumulant(self, theta):
        if np.any(np.asarray(theta) >= self.lam):
            raise DomainError(f"gamma cumulant requires theta < lam={self.lam}")
        return -np.log1p(-np.asarray(theta, dtype=float) / self.lam)

    def cumulant_deriv(self, theta):
        if np.any(np.asarray(theta) >= self.lam):
            raise DomainError(f"gamma cumulant requires theta < lam={self.lam}")
        return 1.0 / (self.lam - np.asarray(theta, dtype=float))


@dataclass(frozen=True)
class InverseGaussianSubordinator:
    lam: float
    name = "inverse_gaussian"

    def __post_init__(self):
        check_positive_scalar(self.lam, "lam")

    def cumulant(self, theta):
        disc = self.lam**2 - 2.0 * np.asarray(theta, dtype=float)
        if np.any(disc <= 0.0):
            raise DomainError("inverse Gaussian cumulant requires lam^2 - 2 theta > 0")
        return self.lam - np.sqrt(disc)

    def cumulant_deriv(self, theta):
        disc = self.lam**2 - 2.0 * np.asarray(theta, dtype=float)
        if np.any(disc <= 0.0):
            raise DomainError("inverse Gaussian cumulant requires lam^2 - 2 theta > 0")
        return 1.0 / np.sqrt(disc)


LevyDriver = BrownianMotion | GammaSubordinator | InverseGaussianSubordinator

_FAMILIES = {
    "brownian": lambda lam: BrownianMotion(),
    "gamma": lambda lam: GammaSubordinator(lam),
    "ig": lambda lam: InverseGaussianSubordinator(lam),
    "inverse_gaussian": lambda lam: InverseGaussianSubordinator(lam),
}


def make_driver(family: str, lam: float | None = None) -> LevyDriver:
    """Build a driver from its CLI/config name."""
    key = family.lower().replace("-", "_")
    if key not in _FAMILIES:
        raise ValueError(f"unknown driver family {family!r}; expected one of "
                         f"{sorted(set(_FAMILIES))}")
    if key != "brownian" and lam is None:
        raise ValueError(f"driver {family!r} needs a jump-scale parameter")
    return _FAMILIES[key](lam)


def cumulant(driver: LevyDriver, theta):
    return driver.cumulant(theta)


def cumulant_deriv(driver: LevyDriver, theta):
    return driver.cumulant_deriv(theta)


def phi(a: float, s):
    """(1 - exp(-a s)) / a, the mean-reversion loading; increases to 1/a."""
    return (1.0 - np.exp(-a * np.asarray(s, dtype=float))) / a


def xi(a: float, s):
    """s - phi(a, s); the antiderivative a * int_0^s phi(u) du."""
    s = np.asarray(s, dtype=float)
    return s - phi(a, s)


def psi(driver: LevyDriver, a: float, sigma: float, s: float,
        abs_tol: float | None = None) -> float:
    """-int_0^s kappa(-sigma * phi(a, u)) du by adaptive quadrature.

    The convolution form of the exponent reduces to this single integral
    because the integrand depends only on the lag u.  For Brownian drivers
    a closed form exists (see :func:`psi_brownian_closed_form`), retained as
    a fast path.
    """
    check_positive_scalar(a, "a")
    check_positive_scalar(sigma, "sigma")
    if s < 0.0:
        raise ValueError("s must be non-negative")
    if s == 0.0:
        return 0.0
    if isinstance(driver, BrownianMotion):
        return psi_brownian_closed_form(a, sigma, s)
    if abs_tol is None:
        abs_tol = tol("quadrature_abs")
    return -integrate(lambda u: driver.cumulant(-sigma * phi(a, u)), 0.0, s, abs_tol)


def psi_quadrature(driver: LevyDriver, a: float, sigma: float, s: float,
                   abs_tol: float | None = None) -> float:
    """Generic quadrature path for any driver, bypassing closed forms."""
    if s == 0.0:
        return 0.0
    if abs_tol is None:
        abs_tol = tol("quadrature_abs")
    return -integrate(lambda u: driver.cumulant(-sigma * phi(a, u)), 0.0, s, abs_tol)


def psi_brownian_closed_form(a: float, sigma: float, s: float) -> float:
    """-(sigma^2 / 2a^2) * (s - 2 phi(s) + (1 - exp(-2 a s)) / 2a)."""
    p = (1.0 - math.exp(-a * s)) / a
    return -(sigma * sigma / (2.0 * a * a)) * (
        s - 2.0 * p + (1.0 - math.exp(-2.0 * a * s)) / (2.0 * a)
    )
