"""Exact values, sharp model-free bounds and arbitrage detection for quote strips.

For an OIS strip the market-fit equations form a rectangular linear system in
the discount factors at the payment grid.  While quoted maturities coincide
with the grid the system is bidiagonal and solves exactly; beyond that point
only monotonicity pins the intermediate dates, which yields a recursion for
the lower and upper envelope of discount factors at each quoted maturity.
The two envelopes are attained by explicit step curves, so they are sharp.

For a CDS strip the same monotonicity argument applied to the survival
probabilities gives a recursion for lower and upper survival bounds at each
quoted maturity.  Those bounds interleave (each lower bound consumes the
previous upper bounds and vice versa), which makes them valid but slightly
conservative past the first maturity; see the tests for the measured gap
against the sharp linear-programming envelope.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .discount import as_discount_curve, check_monotone_discount
from .schedules import QuoteKind, QuoteSet
from .tolerances import tol

logger = logging.getLogger(__name__)


class ArbitrageError(ValueError):
    """A quote strip admits no arbitrage-free curve; carries the first bad index."""

    def __init__(self, index: int, message: str):
        super().__init__(f"arbitrage at quote index {index}: {message}")
        self.index = index
        self.detail = message


class DegenerateQuoteError(ValueError):
    """A zero quote makes the exact recursion ill-posed."""


class BoundKind(Enum):
    EXACT = "exact"
    INTERVAL = "interval"


@dataclass(frozen=True)
class BoundEntry:
    maturity: float
    kind: BoundKind
    lower: float
    upper: float

    @property
    def is_exact(self) -> bool:
        return self.kind is BoundKind.EXACT

    @property
    def value(self) -> float:
        if not self.is_exact:
            raise ValueError("interval entry has no single value")
        return self.lower


@dataclass(frozen=True)
class Rectangle:
    """Axis-aligned box (bottom-left, top-right) containing every admissible curve."""

    t_left: float
    v_bottom: float
    t_right: float
    v_top: float


@dataclass(frozen=True)
class BoundsResult:
    entries: tuple[BoundEntry, ...]
    rectangles: tuple[Rectangle, ...]
    # auxiliary accrual sums, aligned one-based with quote indices (None = unused)
    H: tuple[float | None, ...] = ()
    M: tuple[float, ...] = ()
    N: tuple[float, ...] = ()
    # True when a raw bound fell outside [0, 1] and was clipped; the clipped
    # value is still the sharp envelope, but the simple step-curve
    # construction no longer attains it
    clipped: bool = False

    @property
    def maturities(self) -> tuple[float, ...]:
        return tuple(e.maturity for e in self.entries)

    def envelope(self, t: float) -> tuple[float, float]:
        """(lower, upper) of the rectangle union at time t in [0, T_n]."""
        lo, hi = None, None
        for r in self.rectangles:
            if r.t_left - 1e-12 <= t <= r.t_right + 1e-12:
                lo = r.v_bottom if lo is None else min(lo, r.v_bottom)
                hi = r.v_top if hi is None else max(hi, r.v_top)
        if lo is None:
            raise ValueError(f"t={t} outside the rectangle union")
        return lo, hi


@dataclass(frozen=True)
class ArbitrageReport:
    clean: bool
    index: int | None = None
    detail: str = ""

    def __bool__(self) -> bool:
        return self.clean


# ---------------------------------------------------------------------------
# OIS discount factors
# ---------------------------------------------------------------------------


def _ois_arrays(quotes: QuoteSet):
    if quotes.kind is not QuoteKind.OIS:
        raise ValueError("expected an OIS quote strip")
    sched = quotes.schedule
    S = np.asarray(quotes.rates)
    delta = np.asarray(sched.accruals)
    p = np.asarray(sched.standard_indices)  # one-based
    return S, delta, p


def ois_exact_prefix(quotes: QuoteSet) -> list[float]:
    """Discount factors at the maturities whose grid index matches their rank.

    Solves the bidiagonal head of the market-fit system:
        P(T_1) = 1 / (1 + S_1 d_1)
        P(T_i) = (1 - (S_i / S_{i-1}) (1 - P(T_{i-1}))) / (1 + S_i d_i)
    A flat-zero pair of adjacent quotes propagates P unchanged; a zero quote
    followed by a positive one has no solution and is reported as degenerate.
    """
    S, delta, p = _ois_arrays(quotes)
    i0 = quotes.first_free_index
    out: list[float] = []
    for i in range(1, i0):           # one-based quote index, p_i == i here
        d = delta[p[i - 1] - 1]
        if i == 1:
            out.append(float(1.0 / (1.0 + S[0] * d)))
            continue
        prev = out[-1]
        if S[i - 2] == 0.0:
            if S[i - 1] == 0.0:
                out.append(prev)     # zero-rate limit: curve stays flat at 1
                continue
            raise DegenerateQuoteError(
                f"quote {i - 1} is zero while quote {i} is positive; "
                "the exact recursion divides by the preceding rate"
            )
        out.append(float((1.0 - (S[i - 1] / S[i - 2]) * (1.0 - prev)) / (1.0 + S[i - 1] * d)))
    for i, v in enumerate(out, start=1):
        if not (0.0 < v <= 1.0):
            raise ArbitrageError(i, f"exact discount factor {v} outside (0, 1]")
    return out


def _intermediate_accrual_sum(delta: np.ndarray, p: np.ndarray, i: int) -> float:
    """H_i: accruals of grid dates strictly between T_{i-1} and T_i (one-based i).

    For i = 1 the previous maturity is the valuation date itself.
    """
    lo = p[i - 2] if i > 1 else 0        # grid indices p_{i-1}+1 .. p_i-1, one-based
    return float(np.sum(delta[lo:p[i - 1] - 1]))


def ois_model_free_bounds(quotes: QuoteSet) -> BoundsResult:
    """Exact entries while the grid pins them, sharp [min, max] envelopes after.

    Requires 1 - S_{i-1} H_i > 0 for every bounded index (satisfied whenever
    rates stay below roughly 10%); violations are reported by index.
    Lower/upper sequences that cross signal an arbitrage in the quotes.
    """
    S, delta, p = _ois_arrays(quotes)
    n = len(quotes)
    i0 = quotes.first_free_index
    exact = ois_exact_prefix(quotes)
    if i0 == 1:
        raise ValueError("bounds need at least one exactly determined maturity")

    slack = tol("arbitrage_slack")
    H: list[float | None] = [None] * n
    lower = list(exact)
    upper = list(exact)
    any_clipped = False
    for i in range(i0, n + 1):
        Hi = _intermediate_accrual_sum(delta, p, i)
        H[i - 1] = Hi
        if 1.0 - S[i - 2] * Hi <= 0.0:
            raise ValueError(
                f"positivity precondition 1 - S_{i-1} H_{i} > 0 fails at index {i} "
                f"(S={S[i - 2]}, H={Hi})"
            )
        d = delta[p[i - 1] - 1]
        if S[i - 2] == 0.0:
            raise DegenerateQuoteError(
                f"quote {i - 1} is zero; bound recursion divides by the preceding rate"
            )
        pm, pM = lower[i - 2], upper[i - 2]
        lo = (1.0 - (S[i - 1] / S[i - 2]) * (1.0 - (1.0 - S[i - 2] * Hi) * pm)) / (1.0 + S[i - 1] * d)
        hi = (1.0 - (S[i - 1] / S[i - 2]) * (1.0 - pM)) / (1.0 + S[i - 1] * (Hi + d))
        # monotone curves cannot exceed the previous envelope top, so the
        # running minimum is a valid (and on sane strips inactive) tightening
        hi = min(hi, pM)
        if hi < -slack:
            raise ArbitrageError(
                i, f"upper bound {hi} is negative: the quote cannot be met "
                   "even by a vanishing discount factor")
        if lo > hi + slack:
            raise ArbitrageError(i, f"lower bound {lo} exceeds upper bound {hi}")
        if lo > pM + slack:
            raise ArbitrageError(
                i, f"lower bound {lo} exceeds the previous upper bound {pM}; "
                   "no nonincreasing curve can fit both quotes")
        lo_c, hi_c = _clip_unit(lo, i, "lower"), _clip_unit(hi, i, "upper")
        any_clipped = any_clipped or lo_c != lo or hi_c != hi
        lower.append(lo_c)
        upper.append(hi_c)

    entries = tuple(
        BoundEntry(quotes.maturities[i], BoundKind.EXACT, exact[i], exact[i])
        if i < i0 - 1
        else BoundEntry(quotes.maturities[i], BoundKind.INTERVAL, lower[i], upper[i])
        for i in range(n)
    )
    rectangles = _rectangles(quotes.maturities, lower, upper)
    return BoundsResult(entries=entries, rectangles=rectangles, H=tuple(H),
                        clipped=any_clipped)


def _clip_unit(v: float, index: int, side: str) -> float:
    if v < 0.0 or v > 1.0:
        logger.info("clipping %s bound %.6g at index %d into [0, 1]", side, v, index)
        return float(min(max(v, 0.0), 1.0))
    return float(v)


def _rectangles(maturities, lower, upper) -> tuple[Rectangle, ...]:
    """Boxes ((T_{i-1}, lower_i), (T_i, upper_{i-1})) with upper_0 = 1 at T_0 = 0."""
    rects = []
    prev_t, prev_hi = 0.0, 1.0
    for t, lo, hi in zip(maturities, lower, upper):
        rects.append(Rectangle(prev_t, lo, t, prev_hi))
        prev_t, prev_hi = t, hi
    return tuple(rects)


def ois_extremal_curves(quotes: QuoteSet) -> tuple[dict[int, float], dict[int, float]]:
    """Grid values (one-based index -> P) of the two bound-attaining step curves.

    The lower curve holds each interval at the previous lower bound and drops
    to the new one exactly at the quoted maturity; the upper curve drops to
    the next upper bound immediately after each quoted maturity.  Both satisfy
    every market-fit equation, which is what makes the bounds sharp.

    Undefined when a bound had to be clipped into [0, 1]: the clipped value
    is still attained, but by a curve with a different interior shape.
    """
    res = ois_model_free_bounds(quotes)
    if res.clipped:
        raise ValueError("bounds were clipped into [0, 1]; the step-curve "
                         "construction does not attain clipped bounds")
    p = quotes.schedule.standard_indices
    i0 = quotes.first_free_index
    low_curve: dict[int, float] = {}
    high_curve: dict[int, float] = {}
    for i, entry in enumerate(res.entries, start=1):
        if i < i0:
            low_curve[p[i - 1]] = entry.lower
            high_curve[p[i - 1]] = entry.lower
        else:
            prev = res.entries[i - 2]
            for k in range(p[i - 2] + 1, p[i - 1]):
                low_curve[k] = prev.lower
                high_curve[k] = entry.upper
            low_curve[p[i - 1]] = entry.lower
            high_curve[p[i - 1]] = entry.upper
    return low_curve, high_curve


def ois_detect_arbitrage(quotes: QuoteSet) -> ArbitrageReport:
    """First quote index whose rate sits below the no-arbitrage floor, if any.

    While maturities are exactly determined the floor keeps P(T_i) below
    P(T_{i-1}); afterwards it keeps the recursive lower bound below the upper
    one.  Detection never raises: zero-rate prefixes are handled by taking
    the well-defined limit of the recursion.  Any nondecreasing rate strip
    passes.
    """
    S, delta, p = _ois_arrays(quotes)
    n = len(quotes)
    i0 = quotes.first_free_index
    slack = tol("arbitrage_slack")

    exact: list[float] = []
    upper: list[float] = []
    head_pv = 0.0        # sum delta_k P(t_k) over the exactly determined grid
    head_accrual = 0.0   # sum delta_k over grid dates up to the previous maturity

    for i in range(1, n + 1):
        d = delta[p[i - 1] - 1]
        if i > 1:
            if i < i0:
                ref, width = exact[i - 2], d
            else:
                ref, width = upper[i - 2], _intermediate_accrual_sum(delta, p, i) + d
            if S[i - 2] > 0.0 and ref < 1.0:
                floor = 1.0 / (1.0 / S[i - 2] + width * ref / (1.0 - ref))
            else:
                floor = 0.0      # limit of the expression for a flat-at-par history
            if S[i - 1] < floor - slack:
                side = ("exact discount factor would increase"
                        if i < i0 else "lower bound would exceed upper bound")
                return ArbitrageReport(False, index=i,
                                       detail=f"rate {S[i - 1]} below floor {floor:.6g}; {side}")
        # advance the exact / upper-bound state
        if i < i0:
            v = (1.0 - S[i - 1] * head_pv) / (1.0 + S[i - 1] * d)
            exact.append(v)
            upper.append(v)
            head_pv += d * v
            head_accrual += d
        else:
            Hi = _intermediate_accrual_sum(delta, p, i)
            s_prev = S[i - 2] if i > 1 else 0.0
            if s_prev > 0.0:
                hi = (1.0 - (S[i - 1] / s_prev) * (1.0 - upper[i - 2])) \
                    / (1.0 + S[i - 1] * (Hi + d))
            else:
                # no previous quote, or a flat-at-par history: every earlier
                # discount factor equals one and the ratio term vanishes
                hi = (1.0 - S[i - 1] * head_accrual) / (1.0 + S[i - 1] * (Hi + d))
            hi = min(max(hi, 0.0), 1.0)
            upper.append(hi)
            head_accrual += Hi + d
    return ArbitrageReport(True)


# ---------------------------------------------------------------------------
# CDS survival probabilities
# ---------------------------------------------------------------------------


def cds_model_free_bounds(quotes: QuoteSet, discount) -> BoundsResult:
    """Survival-probability envelopes [Q_min, Q_max] at each quoted maturity.

    Uses the protection-leg representation integrated by parts, with the
    convention p_0 = 1 and T_0 = 0, and the auxiliary sums
        M_i = P(T_{i-1}) - P(T_i),
        N_i = sum of delta_k P(t_k) for grid dates k = p_{i-1} .. p_i - 1.
    Each lower bound consumes the previous upper bounds and vice versa.
    Bounds are clipped into [0, 1]; a crossed pair raises ArbitrageError.
    """
    if quotes.kind is not QuoteKind.CDS:
        raise ValueError("expected a CDS quote strip")
    disc = as_discount_curve(discount)
    check_monotone_discount(disc, quotes.maturities[-1])
    R = quotes.recovery
    S = np.asarray(quotes.rates)
    sched = quotes.schedule
    delta = np.asarray(sched.accruals)
    p = [1] + list(sched.standard_indices)        # p_0 := 1
    T = [0.0] + list(quotes.maturities)           # T_0 := 0
    n = len(quotes)

    PD_T = [float(disc.value(t)) for t in T]
    PD_grid = np.asarray(disc.value(np.asarray(sched.dates)))

    M = [PD_T[i - 1] - PD_T[i] for i in range(1, n + 1)]
    N = []
    for i in range(1, n + 1):
        lo, hi = p[i - 1], p[i] - 1               # one-based grid indices
        N.append(float(np.sum(delta[lo - 1:hi] * PD_grid[lo - 1:hi])))

    slack = tol("arbitrage_slack")
    q_min: list[float] = []      # Q_min(T_1..)
    q_max: list[float] = [1.0]   # Q_max(T_0..), index-aligned shifted by one
    any_clipped = False
    for i in range(1, n + 1):
        s = S[i - 1]
        d_pi = delta[p[i] - 1]
        num_min = (1.0 - R) - sum(
            ((1.0 - R) * M[k - 1] + s * N[k - 1]) * q_max[k - 1] for k in range(1, i + 1)
        )
        den_min = PD_T[i] * (1.0 - R + s * d_pi)
        lo = num_min / den_min
        num_max = (1.0 - R) - sum(
            ((1.0 - R) * M[k - 1] + s * N[k - 1]) * q_min[k - 1] for k in range(1, i)
        )
        den_max = PD_T[i - 1] * (1.0 - R) + s * (N[i - 1] + d_pi * PD_T[i])
        hi = num_max / den_max
        # monotone curves cannot exceed the previous envelope top, so the
        # running minimum is a valid (and on sane strips inactive) tightening
        hi = min(hi, q_max[i - 1])
        # A negative minimum numerator only means the lower bound degenerated
        # to the trivial one (the worst-case substitutions overshoot the
        # recovery budget on wide-spread strips); it does not certify an
        # empty feasible set, so it clips rather than raises.  The conditions
        # below each do certify one.
        if hi < -slack:
            raise ArbitrageError(
                i, f"upper bound {hi} is negative: the spread cannot be met "
                   "even by immediate default")
        if lo > hi + slack:
            raise ArbitrageError(i, f"lower bound {lo} exceeds upper bound {hi}")
        if lo > 1.0 + slack:
            raise ArbitrageError(i, f"survival lower bound {lo} exceeds one")
        if lo > q_max[i - 1] + slack:
            raise ArbitrageError(
                i, f"lower bound {lo} exceeds the previous upper bound "
                   f"{q_max[i - 1]}; no nonincreasing curve can fit both quotes")
        lo_c, hi_c = _clip_unit(lo, i, "lower"), _clip_unit(hi, i, "upper")
        any_clipped = any_clipped or lo_c != lo or hi_c != hi
        q_min.append(lo_c)
        q_max.append(hi_c)

    entries = tuple(
        BoundEntry(quotes.maturities[i], BoundKind.INTERVAL, q_min[i], q_max[i + 1])
        for i in range(n)
    )
    rectangles = _rectangles(quotes.maturities, q_min, q_max[1:])
    return BoundsResult(entries=entries, rectangles=rectangles,
                        H=(), M=tuple(M), N=tuple(N), clipped=any_clipped)
