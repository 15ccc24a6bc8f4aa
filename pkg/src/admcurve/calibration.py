"""Market-fit systems and the level bootstrap.

The fitted curve families keep the present value of every quoted instrument
linear in the curve values at its payment dates, and a curve value before
T_k depends only on the levels up to b_k.  The rectangular linear system in
curve values therefore becomes triangular in the levels, and calibration
reduces to one univariate root solve per instrument, walked out in maturity
order.  Each row residual is strictly monotone in its own level (the
interval loadings are positive and every row coefficient shares a sign), so
a bracketing solver is guaranteed once a sign change is found.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .discount import as_discount_curve, check_monotone_discount
from .dynamics import CalibratedCurve, Dynamics
from .quadrature import fixed_panels
from .schedules import QuoteKind, QuoteSet
from .tolerances import tol


class NoSolutionError(RuntimeError):
    """No level reproduces the quote inside the maximal search bracket."""

    def __init__(self, step: int, bracket: tuple[float, float],
                 residuals: tuple[float, float]):
        super().__init__(
            f"bootstrap step {step}: no sign change on bracket {bracket}; "
            f"residuals {residuals[0]:.3e} / {residuals[1]:.3e}"
        )
        self.step = step
        self.bracket = bracket
        self.residuals = residuals


class InadmissibleCurveError(RuntimeError):
    """The fitted level violates forward positivity on its interval."""

    def __init__(self, step: int, t_star: float | None, reason: str):
        super().__init__(f"bootstrap step {step}: {reason} (t*={t_star})")
        self.step = step
        self.t_star = t_star
        self.reason = reason


@dataclass(frozen=True)
class BootstrapConfig:
    residual_tolerance: float = 1e-12
    bracket: tuple[float, float] = (-1.0, 5.0)
    bracket_limit: tuple[float, float] = (-50.0, 50.0)
    max_iterations: int = 200
    enforce_no_arbitrage: bool = True

    def __post_init__(self):
        if self.residual_tolerance <= 0.0:
            raise ValueError("residual_tolerance must be positive")
        if not (self.bracket[0] < self.bracket[1]):
            raise ValueError("bracket must be a nonempty interval")


@dataclass(frozen=True)
class MarketFitSystem:
    """Coefficient view A P = B of the quoted instruments on the payment grid.

    Row i touches only grid columns 1..p_i, which is the triangularity that
    the bootstrap exploits.  For CDS strips the protection integral is not
    linearised onto the grid; this matrix covers the premium and maturity
    terms and exists for structural checks, while calibration evaluates the
    full residual functional against the smooth fitted curve.
    """

    A: np.ndarray
    B: np.ndarray
    quotes: QuoteSet
    description: tuple[str, ...]

    def column_span(self, row: int) -> int:
        """Largest grid column (one-based) with a nonzero coefficient."""
        nz = np.nonzero(self.A[row])[0]
        return int(nz[-1]) + 1 if nz.size else 0


def assemble_ois_system(quotes: QuoteSet) -> MarketFitSystem:
    """Rows S_i sum_{k<p_i} d_k P(t_k) + (S_i d_{p_i} + 1) P(T_i) = 1."""
    if quotes.kind is not QuoteKind.OIS:
        raise ValueError("expected an OIS quote strip")
    sched = quotes.schedule
    n, m = len(quotes), len(sched.dates)
    A = np.zeros((n, m))
    for i in range(n):
        pi = sched.standard_indices[i]
        for k in range(1, pi):
            A[i, k - 1] = quotes.rates[i] * sched.accruals[k - 1]
        A[i, pi - 1] = quotes.rates[i] * sched.accruals[pi - 1] + 1.0
    B = np.ones(n)
    desc = tuple(f"ois {m_:g}y @ {r:.6%}" for m_, r in zip(quotes.maturities, quotes.rates))
    return MarketFitSystem(A=A, B=B, quotes=quotes, description=desc)


def assemble_cds_system(quotes: QuoteSet, discount) -> MarketFitSystem:
    """Premium and maturity coefficients of the protection parity, per row.

    Row i: S_i sum_{k<=p_i} d_k P^D(t_k) Q(t_k) + (1-R) P^D(T_i) Q(T_i)
           [+ protection integral, handled by the residual functional] = 1 - R.
    """
    if quotes.kind is not QuoteKind.CDS:
        raise ValueError("expected a CDS quote strip")
    disc = as_discount_curve(discount)
    sched = quotes.schedule
    R = quotes.recovery
    n, m = len(quotes), len(sched.dates)
    pd_grid = np.asarray(disc.value(np.asarray(sched.dates)))
    A = np.zeros((n, m))
    for i in range(n):
        pi = sched.standard_indices[i]
        for k in range(1, pi + 1):
            A[i, k - 1] = quotes.rates[i] * sched.accruals[k - 1] * pd_grid[k - 1]
        A[i, pi - 1] += (1.0 - R) * pd_grid[pi - 1]
    B = np.full(n, 1.0 - R)
    desc = tuple(f"cds {m_:g}y @ {r * 1e4:.1f}bp" for m_, r in zip(quotes.maturities, quotes.rates))
    return MarketFitSystem(A=A, B=B, quotes=quotes, description=desc)


# ---------------------------------------------------------------------------
# residual functionals
# ---------------------------------------------------------------------------


class OISResiduals:
    """Row residuals of the OIS market-fit system against an evaluable curve."""

    def __init__(self, quotes: QuoteSet):
        self.system = assemble_ois_system(quotes)
        self.quotes = quotes

    @property
    def maturities(self) -> tuple[float, ...]:
        return self.quotes.maturities

    def residual(self, row: int, value_fn) -> float:
        sched = self.quotes.schedule
        pi = sched.standard_indices[row]
        acc = 0.0
        for k in range(1, pi + 1):
            acc += self.system.A[row, k - 1] * value_fn(sched.dates[k - 1])
        return acc - self.system.B[row]

    def scale(self, row: int) -> float:
        return 1.0   # the right-hand side of every OIS row


class CDSResiduals:
    """Full protection-parity residuals, protection leg by panelwise quadrature.

    The integral int_0^{T_i} f^D(t) P^D(t) Q(t) dt is evaluated with
    Gauss-Legendre panels laid on the premium grid (8 nodes per panel), so it
    sees the smooth fitted curve rather than a grid discretisation.
    """

    def __init__(self, quotes: QuoteSet, discount,
                 panels_per_period: int = 1):
        self.quotes = quotes
        self.discount = as_discount_curve(discount)
        check_monotone_discount(self.discount, quotes.maturities[-1])
        self.system = assemble_cds_system(quotes, self.discount)
        if panels_per_period < 1:
            raise ValueError("panels_per_period must be >= 1")
        self.panels_per_period = int(panels_per_period)

    @property
    def maturities(self) -> tuple[float, ...]:
        return self.quotes.maturities

    def _panel_edges(self, upto: float) -> np.ndarray:
        dates = [0.0] + [t for t in self.quotes.schedule.dates if t <= upto + 1e-12]
        edges: list[float] = []
        for a, b in zip(dates[:-1], dates[1:]):
            sub = np.linspace(a, b, self.panels_per_period + 1)
            edges.extend(sub[:-1])
        edges.append(dates[-1])
        return np.asarray(edges)

    def protection_integral(self, row: int, value_fn) -> float:
        Ti = self.quotes.maturities[row]
        disc = self.discount

        def integrand(ts: np.ndarray) -> np.ndarray:
            q = np.array([value_fn(float(t)) for t in ts])
            return np.asarray(disc.forward(ts)) * np.asarray(disc.value(ts)) * q

        return fixed_panels(integrand, self._panel_edges(Ti))

    def residual(self, row: int, value_fn) -> float:
        sched = self.quotes.schedule
        R = self.quotes.recovery
        pi = sched.standard_indices[row]
        acc = 0.0
        for k in range(1, pi + 1):
            acc += self.system.A[row, k - 1] * value_fn(sched.dates[k - 1])
        acc += (1.0 - R) * self.protection_integral(row, value_fn)
        return acc - self.system.B[row]

    def scale(self, row: int) -> float:
        # premium-leg PV of a unit survival curve, so residual / scale is the
        # relative error of the implied fair spread
        sched = self.quotes.schedule
        pi = sched.standard_indices[row]
        acc = sum(sched.accruals[k] * float(self.discount.value(sched.dates[k]))
                  for k in range(pi))
        return self.quotes.rates[row] * acc or 1.0


def residuals_for(quotes: QuoteSet, discount=None,
                  panels_per_period: int = 1):
    if quotes.kind is QuoteKind.OIS:
        return OISResiduals(quotes)
    if discount is None:
        raise ValueError("CDS calibration needs a discounting curve")
    return CDSResiduals(quotes, discount, panels_per_period)


# ---------------------------------------------------------------------------
# bootstrap
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PinnedValue:
    """Extra fit constraint P(t) = value, inserted as a synthetic instrument."""

    t: float
    value: float

    def __post_init__(self):
        if not (self.t > 0.0 and 0.0 < self.value <= 1.0):
            raise ValueError("pinned value needs t > 0 and value in (0, 1]")


def _expand_bracket(res, center: float, cfg: BootstrapConfig):
    lo0, hi0 = cfg.bracket
    lo_lim, hi_lim = cfg.bracket_limit
    half = 0.5 * (hi0 - lo0)
    lo = max(center - half, lo_lim)
    hi = min(center + half, hi_lim)
    flo, fhi = res(lo), res(hi)
    while flo * fhi > 0.0 and (lo > lo_lim or hi < hi_lim):
        width = hi - lo
        lo = max(lo - width, lo_lim)
        hi = min(hi + width, hi_lim)
        flo, fhi = res(lo), res(hi)
    return lo, hi, flo, fhi


def bootstrap(residuals, dynamics: Dynamics,
              config: BootstrapConfig | None = None,
              pins: tuple[PinnedValue, ...] = ()) -> CalibratedCurve:
    """Successively solve each instrument row for its mean-reversion level.

    Instruments must be ordered by strictly increasing maturity.  Pinned
    values are merged into the maturity ordering as synthetic exact-value
    rows, each adding its own knot, so constrained fits reuse the very same
    walk.  With ``enforce_no_arbitrage`` the family's forward-positivity
    check runs as soon as an interval's level is known and the walk stops at
    the first inadmissible step.
    """
    cfg = config or BootstrapConfig()
    rows: list[tuple[float, object]] = [
        (m, ("row", i)) for i, m in enumerate(residuals.maturities)
    ]
    rows.extend((pin.t, ("pin", pin)) for pin in pins)
    rows.sort(key=lambda item: item[0])
    mats = [m for m, _ in rows]
    if any(b >= c for b, c in zip(mats, mats[1:])):
        raise ValueError("instrument and pin maturities must be strictly increasing")

    knots: list[float] = [0.0]
    levels: list[float] = []

    def value_fn(t: float) -> float:
        return dynamics.value(t, knots, levels)

    for step, (maturity, job) in enumerate(rows, start=1):
        knots.append(maturity)
        levels.append(0.0)

        if job[0] == "row":
            row = job[1]

            def res(b: float) -> float:
                levels[-1] = b
                return residuals.residual(row, value_fn)
        else:
            pin = job[1]

            def res(b: float) -> float:
                levels[-1] = b
                return value_fn(pin.t) - pin.value

        center = levels[-2] if len(levels) > 1 else dynamics.x0
        lo, hi, flo, fhi = _expand_bracket(res, center, cfg)
        if flo == 0.0:
            root = lo
        elif fhi == 0.0:
            root = hi
        elif flo * fhi > 0.0:
            raise NoSolutionError(step, (lo, hi), (flo, fhi))
        else:
            root = brentq(res, lo, hi, xtol=1e-14, rtol=8.9e-16,
                          maxiter=cfg.max_iterations)
        levels[-1] = root
        if abs(res(root)) > max(cfg.residual_tolerance, tol("residual")):
            raise NoSolutionError(step, (lo, hi), (res(root), res(root)))

        if cfg.enforce_no_arbitrage:
            verdict = dynamics.verify_interval(step, knots, levels)
            if not verdict.admissible:
                raise InadmissibleCurveError(step, verdict.t_star, verdict.reason)

    return CalibratedCurve(dynamics=dynamics, knots=tuple(knots), levels=tuple(levels))


def repricing_errors(residuals, curve_or_fn) -> np.ndarray:
    """Relative row residuals of a fitted (or any evaluable) curve."""
    value_fn = curve_or_fn.value if hasattr(curve_or_fn, "value") else curve_or_fn
    out = np.empty(len(residuals.maturities))
    for i in range(out.size):
        out[i] = residuals.residual(i, lambda t: float(value_fn(t))) / residuals.scale(i)
    return np.abs(out)


# ---------------------------------------------------------------------------
# convex combinations
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SampledCurve:
    """A curve known only at sample times; enough to reprice and to export."""

    times: tuple[float, ...]
    values: tuple[float, ...]

    def value(self, t: float) -> float:
        times = np.asarray(self.times)
        idx = int(np.searchsorted(times, t))
        for j in (idx - 1, idx):
            if 0 <= j < times.size and abs(times[j] - t) <= 1e-9:
                return self.values[j]
        raise ValueError(f"sampled curve has no node at t={t}")


def convex_mix(curve_a, curve_b, alpha: float, times) -> SampledCurve:
    """Pointwise alpha * A + (1 - alpha) * B on a shared sample grid.

    Repricing and monotonicity are preserved because both are linear in the
    curve values.  Curves over different knot spans cannot be mixed.
    """
    if not 0.0 <= alpha <= 1.0:
        raise ValueError("alpha must lie in [0, 1]")
    ha = getattr(curve_a, "horizon", None)
    hb = getattr(curve_b, "horizon", None)
    if ha is not None and hb is not None and abs(ha - hb) > 1e-12:
        raise ValueError("curves span different maturity ranges; refusing to mix")
    ts = tuple(float(t) for t in times)
    vals = tuple(
        alpha * float(curve_a.value(t)) + (1.0 - alpha) * float(curve_b.value(t))
        for t in ts
    )
    return SampledCurve(times=ts, values=vals)
