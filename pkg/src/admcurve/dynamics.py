"""Closed-form curve values and forward rates under piecewise-constant
mean-reversion levels, for two mean-reverting families:

* a Levy-driven Ornstein-Uhlenbeck short rate / default intensity
  dX = a (b(t) - X) dt + sigma dY_{ct}, with Y a Levy driver, and
* an extended square-root (CIR) process dX = a (b(t) - X) dt + sigma sqrt(X) dW.

With b(t) constant on each knot interval [T_{i-1}, T_i) the zero-coupon /
survival value is exp(-I(t)) where I accumulates per-interval loadings in
closed form; the instantaneous forward rate is available analytically as
well.  Both families yield forwards that are continuous across knots even
though b jumps there, which is what makes the construction admissible.

The no-arbitrage verdicts follow the forward-positivity characterisation:
on each interval the forward is a monotone image K_i of x = exp(-a (t -
T_{i-1})), with K_i' strictly monotone, so positivity reduces to endpoint
checks plus at most one interior stationary point located by bisection.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .levy import LevyDriver, phi as _phi_ou, psi as _psi_ou, xi as _xi_ou
from .tolerances import tol
from .validation import check_positive_scalar


@dataclass(frozen=True)
class StationaryPoint:
    """Interior stationary point of the forward curve on one knot interval."""

    interval: int          # one-based interval index
    t: float
    forward_value: float


@dataclass(frozen=True)
class CurveVerdict:
    admissible: bool
    interval: int | None = None       # offending interval (one-based) when not admissible
    t_star: float | None = None       # location where positivity fails
    forward_value: float | None = None
    reason: str = ""
    stationary_points: tuple[StationaryPoint, ...] = ()

    def __bool__(self) -> bool:
        return self.admissible


class LevyOUDynamics:
    """Curve generator driven by a Levy OU process.

    Parameters are the initial value x0 >= 0, mean-reversion speed a > 0,
    volatility scale sigma > 0, time-change rate c > 0 (jump frequency) and
    the Levy driver supplying the cumulant transform.
    """

    family = "levy_ou"

    def __init__(self, driver: LevyDriver, x0: float, a: float, sigma: float, c: float):
        self.driver = driver
        self.x0 = float(x0)
        self.a = check_positive_scalar(a, "a")
        self.sigma = check_positive_scalar(sigma, "sigma")
        self.c = check_positive_scalar(c, "c")
        if self.x0 < 0.0:
            raise ValueError("x0 must be non-negative")
        self._psi_cache: dict[float, float] = {}

    # -- elementary loadings -------------------------------------------------

    def _phi(self, s):
        return _phi_ou(self.a, s)

    def _xi(self, s):
        return _xi_ou(self.a, s)

    def _psi(self, s: float) -> float:
        v = self._psi_cache.get(s)
        if v is None:
            v = _psi_ou(self.driver, self.a, self.sigma, s)
            self._psi_cache[s] = v
        return v

    # -- curve value and forward ---------------------------------------------

    def exponent(self, t: float, knots, levels) -> float:
        """I(t) with value(t) = exp(-I(t)); t in (knots[i-1], knots[i]]."""
        if t == 0.0:
            return 0.0
        i = int(np.searchsorted(knots, t, side="left"))
        acc = self.x0 * float(self._phi(t)) + self.c * self._psi(t)
        for k in range(1, i):
            acc += levels[k - 1] * float(self._xi(t - knots[k - 1]) - self._xi(t - knots[k]))
        acc += levels[i - 1] * float(self._xi(t - knots[i - 1]))
        return acc

    def value(self, t: float, knots, levels) -> float:
        return math.exp(-self.exponent(t, knots, levels))

    def forward(self, t: float, knots, levels) -> float:
        if t == 0.0:
            return self.x0
        i = int(np.searchsorted(knots, t, side="left"))
        acc = self.x0 * math.exp(-self.a * t)
        acc -= self.c * float(self.driver.cumulant(-self.sigma * self._phi(t)))
        for k in range(1, i):
            acc += self.a * levels[k - 1] * float(self._phi(t - knots[k - 1]) - self._phi(t - knots[k]))
        acc += self.a * levels[i - 1] * float(self._phi(t - knots[i - 1]))
        return acc

    # -- forward positivity machinery ----------------------------------------
    #
    # On [T_{i-1}, T_i) the forward equals K_i(x) with x = exp(-a (t - T_{i-1})):
    #   K_i(x) = b_i + (f(T_{i-1}) + c kappa_{i-1} - b_i) x
    #            - c kappa(-(sigma/a) (1 - exp(-a T_{i-1}) x))
    # where kappa_{i-1} = kappa(-sigma phi(T_{i-1})).  K_i' is strictly
    # monotone because kappa' is.

    def _ki_pieces(self, i: int, knots, levels) -> tuple[float, float, float]:
        t_left = knots[i - 1]
        f_left = self.forward(t_left, knots, levels) if t_left > 0.0 else self.x0
        kap_left = float(self.driver.cumulant(-self.sigma * self._phi(t_left)))
        slope = f_left + self.c * kap_left - levels[i - 1]
        return f_left, kap_left, slope

    def ki(self, i: int, x: float, knots, levels) -> float:
        _, _, slope = self._ki_pieces(i, knots, levels)
        decay = math.exp(-self.a * knots[i - 1])
        arg = -(self.sigma / self.a) * (1.0 - decay * x)
        return levels[i - 1] + slope * x - self.c * float(self.driver.cumulant(arg))

    def ki_deriv(self, i: int, x: float, knots, levels) -> float:
        _, _, slope = self._ki_pieces(i, knots, levels)
        decay = math.exp(-self.a * knots[i - 1])
        arg = -(self.sigma / self.a) * (1.0 - decay * x)
        return slope - (self.c * self.sigma / self.a) * decay * float(self.driver.cumulant_deriv(arg))

    def _stationary_x(self, i: int, x_lo: float, knots, levels) -> float:
        # K_i' is strictly monotone; plain bisection is guaranteed to converge
        stop = tol("stationary_kprime")
        lo, hi = x_lo, 1.0
        flo = self.ki_deriv(i, lo, knots, levels)
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            fmid = self.ki_deriv(i, mid, knots, levels)
            if abs(fmid) < stop:
                return mid
            if (fmid > 0.0) == (flo > 0.0):
                lo, flo = mid, fmid
            else:
                hi = mid
        return 0.5 * (lo + hi)

    def verify_interval(self, i: int, knots, levels) -> CurveVerdict:
        """Forward positivity on interval i, assuming positivity holds before it."""
        t_right = knots[i]
        f_right = self.forward(t_right, knots, levels)
        if f_right <= 0.0:
            return CurveVerdict(False, interval=i, t_star=t_right,
                                forward_value=f_right,
                                reason="forward non-positive at interval endpoint")
        g = math.exp(-self.a * (knots[i] - knots[i - 1]))
        d_left = self.ki_deriv(i, 1.0, knots, levels)
        d_right = self.ki_deriv(i, g, knots, levels)
        if d_left * d_right < 0.0:
            x_star = self._stationary_x(i, g, knots, levels)
            f_star = self.ki(i, x_star, knots, levels)
            t_star = knots[i - 1] - math.log(x_star) / self.a
            sp = StationaryPoint(i, t_star, f_star)
            if f_star <= 0.0:
                return CurveVerdict(False, interval=i, t_star=t_star,
                                    forward_value=f_star,
                                    reason="forward non-positive at interior stationary point",
                                    stationary_points=(sp,))
            return CurveVerdict(True, stationary_points=(sp,))
        return CurveVerdict(True)

    def verify(self, knots, levels) -> CurveVerdict:
        if self.x0 <= 0.0:
            return CurveVerdict(False, interval=0, t_star=0.0, forward_value=self.x0,
                                reason="x0 must be strictly positive for an arbitrage-free curve")
        points: list[StationaryPoint] = []
        for i in range(1, len(levels) + 1):
            verdict = self.verify_interval(i, knots, levels)
            points.extend(verdict.stationary_points)
            if not verdict.admissible:
                return CurveVerdict(False, interval=verdict.interval,
                                    t_star=verdict.t_star,
                                    forward_value=verdict.forward_value,
                                    reason=verdict.reason,
                                    stationary_points=tuple(points))
        return CurveVerdict(True, stationary_points=tuple(points))


class ExtendedCIRDynamics:
    """Curve generator driven by an extended square-root process."""

    family = "cir"

    def __init__(self, x0: float, a: float, sigma: float):
        self.x0 = float(x0)
        self.a = check_positive_scalar(a, "a")
        self.sigma = check_positive_scalar(sigma, "sigma")
        if self.x0 < 0.0:
            raise ValueError("x0 must be non-negative")
        self.h = math.sqrt(self.a * self.a + 2.0 * self.sigma * self.sigma)

    def _phi(self, s):
        h, a = self.h, self.a
        e = np.exp(-h * np.asarray(s, dtype=float))
        return 2.0 * (1.0 - e) / (h + a + (h - a) * e)

    def _phi_deriv(self, s):
        h, a = self.h, self.a
        e = np.exp(-h * np.asarray(s, dtype=float))
        den = h + a + (h - a) * e
        return 4.0 * h * h * e / (den * den)

    def _eta(self, s):
        # a * int_0^s phi(u) du, in closed form
        h, a, sig = self.h, self.a, self.sigma
        e = np.exp(-h * np.asarray(s, dtype=float))
        return 2.0 * a * (s / (h + a) + np.log((h + a + (h - a) * e) / (2.0 * h)) / (sig * sig))

    def exponent(self, t: float, knots, levels) -> float:
        if t == 0.0:
            return 0.0
        i = int(np.searchsorted(knots, t, side="left"))
        acc = self.x0 * float(self._phi(t))
        for k in range(1, i):
            acc += levels[k - 1] * float(self._eta(t - knots[k - 1]) - self._eta(t - knots[k]))
        acc += levels[i - 1] * float(self._eta(t - knots[i - 1]))
        return acc

    def value(self, t: float, knots, levels) -> float:
        return math.exp(-self.exponent(t, knots, levels))

    def forward(self, t: float, knots, levels) -> float:
        if t == 0.0:
            return self.x0
        i = int(np.searchsorted(knots, t, side="left"))
        acc = self.x0 * float(self._phi_deriv(t))
        for k in range(1, i):
            acc += self.a * levels[k - 1] * float(self._phi(t - knots[k - 1]) - self._phi(t - knots[k]))
        acc += self.a * levels[i - 1] * float(self._phi(t - knots[i - 1]))
        return acc

    def verify_interval(self, i: int, knots, levels) -> CurveVerdict:
        # sufficient condition: positive parameters and a positive level
        if levels[i - 1] <= 0.0:
            return CurveVerdict(False, interval=i, t_star=knots[i],
                                forward_value=levels[i - 1],
                                reason="mean-reversion level not strictly positive")
        return CurveVerdict(True)

    def verify(self, knots, levels) -> CurveVerdict:
        if self.x0 <= 0.0:
            return CurveVerdict(False, interval=0, t_star=0.0, forward_value=self.x0,
                                reason="x0 must be strictly positive for an arbitrage-free curve")
        for i in range(1, len(levels) + 1):
            verdict = self.verify_interval(i, knots, levels)
            if not verdict.admissible:
                return verdict
        return CurveVerdict(True)


Dynamics = LevyOUDynamics | ExtendedCIRDynamics


@dataclass(frozen=True)
class CalibratedCurve:
    """A term structure defined by knot maturities and fitted levels.

    Evaluable for the primary quantity P(0, t) (discount factor or survival
    probability), the instantaneous forward rate and the continuously
    compounded spot rate on t in [0, T_n].  Evaluation outside the knot span
    is an error: these curves are not extrapolated.
    """

    dynamics: Dynamics
    knots: tuple[float, ...]      # T_0 = 0 < T_1 < ... < T_n
    levels: tuple[float, ...]

    def __post_init__(self):
        if len(self.knots) != len(self.levels) + 1 or self.knots[0] != 0.0:
            raise ValueError("knots must be (0, T_1, ..., T_n) with one level per interval")
        if any(b >= c for b, c in zip(self.knots, self.knots[1:])):
            raise ValueError("knots must be strictly increasing")
        if not all(math.isfinite(v) for v in self.levels):
            raise ValueError("levels must be finite")

    @property
    def horizon(self) -> float:
        return self.knots[-1]

    def _check_domain(self, t: np.ndarray) -> None:
        if np.any(t < -1e-12) or np.any(t > self.horizon + 1e-12):
            raise ValueError(f"curve evaluated outside [0, {self.horizon}]")

    def value(self, t):
        arr = np.atleast_1d(np.asarray(t, dtype=float))
        self._check_domain(arr)
        out = np.array([self.dynamics.value(float(x), self.knots, self.levels) for x in arr])
        return out[0] if np.isscalar(t) or np.asarray(t).ndim == 0 else out

    def forward(self, t):
        arr = np.atleast_1d(np.asarray(t, dtype=float))
        self._check_domain(arr)
        out = np.array([self.dynamics.forward(float(x), self.knots, self.levels) for x in arr])
        return out[0] if np.isscalar(t) or np.asarray(t).ndim == 0 else out

    def spot(self, t):
        """Continuously compounded spot rate -log P(0, t) / t (forward limit at 0)."""
        arr = np.atleast_1d(np.asarray(t, dtype=float))
        self._check_domain(arr)
        out = np.empty(arr.size)
        for j, x in enumerate(arr):
            if x == 0.0:
                out[j] = self.dynamics.forward(0.0, self.knots, self.levels)
            else:
                out[j] = -math.log(self.dynamics.value(float(x), self.knots, self.levels)) / float(x)
        return out[0] if np.isscalar(t) or np.asarray(t).ndim == 0 else out

    def verify(self) -> CurveVerdict:
        return self.dynamics.verify(self.knots, self.levels)

    def sample(self, step: float = 0.05) -> np.ndarray:
        """Sample grid (t, value, spot, forward); includes t = 0 and T_n."""
        ts = np.arange(0.0, self.horizon + 0.5 * step, step)
        if ts[-1] < self.horizon:
            ts = np.append(ts, self.horizon)
        ts[-1] = min(ts[-1], self.horizon)
        vals = self.value(ts)
        spots = self.spot(ts)
        fwds = self.forward(ts)
        return np.column_stack([ts, vals, spots, fwds])
