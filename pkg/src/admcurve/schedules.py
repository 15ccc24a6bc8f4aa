"""Quote containers and payment-grid construction.

Time is measured in year fractions from the quotation date, which is pinned
at t = 0; there is no calendar arithmetic anywhere in the library.  Rates are
stored as pure decimals (a 0.0720% swap rate is 0.000720, a 58 bp spread is
0.0058), which removes unit ambiguity at every formula site.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .validation import (
    as_1d_array,
    check_non_negative,
    check_strictly_increasing,
    check_unit_interval,
)

GRID_SNAP = 1e-9  # tolerance for deciding a maturity sits on the uniform grid


class QuoteKind(Enum):
    OIS = "ois"
    CDS = "cds"


@dataclass(frozen=True)
class PaymentSchedule:
    """Fixed/premium payment grid shared by a strip of quotes.

    dates            strictly increasing payment times t_1 < ... < t_m (years)
    accruals         year fractions delta_k for the periods (t_{k-1}, t_k]
    standard_indices one-based index p_i of each quoted maturity: t_{p_i} = T_i
    """

    dates: tuple[float, ...]
    accruals: tuple[float, ...]
    standard_indices: tuple[int, ...]

    def __post_init__(self):
        dates = np.asarray(self.dates)
        if dates.size == 0 or dates[0] <= 0.0:
            raise ValueError("payment dates must be non-empty with first date > 0")
        check_strictly_increasing(dates, "payment dates")
        if len(self.accruals) != len(self.dates):
            raise ValueError("accruals and dates must have equal length")
        if any(d <= 0.0 for d in self.accruals):
            raise ValueError("accruals must be positive")
        idx = np.asarray(self.standard_indices)
        check_strictly_increasing(idx, "standard_indices")
        if idx[0] < 1 or idx[-1] != len(self.dates):
            raise ValueError("standard_indices must be one-based and end at the last date")

    @property
    def maturities(self) -> tuple[float, ...]:
        return tuple(self.dates[p - 1] for p in self.standard_indices)

    def date(self, k: int) -> float:
        """Payment date t_k for a one-based grid index (t_0 = 0)."""
        return 0.0 if k == 0 else self.dates[k - 1]


@dataclass(frozen=True)
class QuoteSet:
    """A strip of par quotes with its payment schedule.

    For CDS strips ``recovery`` is the expected recovery rate in [0, 1).
    ``first_free_index`` is the smallest one-based i with p_i != i, i.e. the
    first quoted maturity beyond which grid dates stop coinciding with quoted
    maturities and only bounds (not exact values) are available; it equals
    n + 1 when every maturity sits on its own grid index.
    """

    kind: QuoteKind
    maturities: tuple[float, ...]
    rates: tuple[float, ...]
    schedule: PaymentSchedule
    recovery: float | None = None

    def __post_init__(self):
        mats = as_1d_array(self.maturities, "maturities")
        rates = as_1d_array(self.rates, "rates")
        check_strictly_increasing(mats, "maturities")
        check_non_negative(rates, "rates")
        if mats.size != rates.size:
            raise ValueError("maturities and rates must have equal length")
        sched_mats = np.asarray(self.schedule.maturities)
        if sched_mats.size != mats.size or np.max(np.abs(sched_mats - mats)) > GRID_SNAP:
            raise ValueError("maturities are not aligned with schedule.standard_indices")
        if self.kind is QuoteKind.CDS:
            if self.recovery is None:
                raise ValueError("CDS quotes require a recovery rate")
            check_unit_interval(self.recovery, "recovery")

    def __len__(self) -> int:
        return len(self.maturities)

    @property
    def first_free_index(self) -> int:
        for i, p in enumerate(self.schedule.standard_indices, start=1):
            if p != i:
                return i
        return len(self.maturities) + 1


def build_ois_schedule(maturities) -> PaymentSchedule:
    """Annual payment grid t_k = k up to the last maturity, accruals of 1.

    Each maturity must be a whole number of years; strips with custom grids
    have to supply their own :class:`PaymentSchedule`.
    """
    mats = as_1d_array(maturities, "maturities")
    check_strictly_increasing(mats, "maturities")
    rounded = np.rint(mats)
    if np.max(np.abs(mats - rounded)) > GRID_SNAP or rounded[0] < 1:
        raise ValueError("OIS maturities must be whole numbers of years >= 1")
    last = int(rounded[-1])
    dates = tuple(float(k) for k in range(1, last + 1))
    accruals = (1.0,) * last
    standard = tuple(int(m) for m in rounded)
    return PaymentSchedule(dates, accruals, standard)


def build_cds_schedule(maturities, frequency: int = 4) -> PaymentSchedule:
    """Uniform premium grid with ``frequency`` payments per year.

    Every maturity must be a whole multiple of 1/frequency.
    """
    if int(frequency) != frequency or frequency < 1:
        raise ValueError("frequency must be a positive integer")
    frequency = int(frequency)
    mats = as_1d_array(maturities, "maturities")
    check_strictly_increasing(mats, "maturities")
    steps = mats * frequency
    rounded = np.rint(steps)
    if np.max(np.abs(steps - rounded)) > GRID_SNAP * frequency or rounded[0] < 1:
        raise ValueError(
            f"CDS maturities must be whole multiples of 1/{frequency} year"
        )
    last = int(rounded[-1])
    step = 1.0 / frequency
    dates = tuple(k * step for k in range(1, last + 1))
    accruals = (step,) * last
    standard = tuple(int(v) for v in rounded)
    return PaymentSchedule(dates, accruals, standard)


def ois_quotes(maturities, rates) -> QuoteSet:
    """Convenience constructor: annual-grid OIS quote strip."""
    mats = tuple(float(m) for m in as_1d_array(maturities, "maturities"))
    return QuoteSet(QuoteKind.OIS, mats, tuple(float(r) for r in rates),
                    build_ois_schedule(mats))


def cds_quotes(maturities, spreads, recovery: float, frequency: int = 4) -> QuoteSet:
    """Convenience constructor: uniform-grid CDS quote strip (spreads as decimals)."""
    mats = tuple(float(m) for m in as_1d_array(maturities, "maturities"))
    return QuoteSet(QuoteKind.CDS, mats, tuple(float(s) for s in spreads),
                    build_cds_schedule(mats, frequency), recovery=float(recovery))
