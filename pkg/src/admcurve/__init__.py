"""Arbitrage-free bounds and admissible term-structure construction.

The package answers three questions about a strip of OIS par rates or CDS
fair spreads:

* which discount factors / survival probabilities are pinned exactly and
  which only admit sharp model-free bounds (``bounds``),
* whether the quotes hide an arbitrage (``ois_detect_arbitrage``),
* how to build smooth arbitrage-free curves that reprice every quote, by
  bootstrapping piecewise-constant mean-reversion levels of a Levy-OU or
  extended CIR factor (``LevyOUCurve`` / ``ExtendedCIRCurve``).
"""

from .bounds import (
    ArbitrageError,
    ArbitrageReport,
    BoundEntry,
    BoundKind,
    BoundsResult,
    DegenerateQuoteError,
    Rectangle,
    cds_model_free_bounds,
    ois_detect_arbitrage,
    ois_exact_prefix,
    ois_extremal_curves,
    ois_model_free_bounds,
)
from .calibration import (
    BootstrapConfig,
    InadmissibleCurveError,
    MarketFitSystem,
    NoSolutionError,
    PinnedValue,
    assemble_cds_system,
    assemble_ois_system,
    bootstrap,
    convex_mix,
    repricing_errors,
    residuals_for,
)
from .discount import FlatDiscountCurve, as_discount_curve
from .dynamics import (
    CalibratedCurve,
    CurveVerdict,
    ExtendedCIRDynamics,
    LevyOUDynamics,
    StationaryPoint,
)
from .estimators import ExtendedCIRCurve, LevyOUCurve
from .levy import (
    BrownianMotion,
    GammaSubordinator,
    InverseGaussianSubordinator,
    cumulant,
    cumulant_deriv,
    make_driver,
    phi,
    psi,
    xi,
)
from .schedules import (
    PaymentSchedule,
    QuoteKind,
    QuoteSet,
    build_cds_schedule,
    build_ois_schedule,
    cds_quotes,
    ois_quotes,
)

__version__ = "0.1.0"

__all__ = [
    "ArbitrageError",
    "ArbitrageReport",
    "BootstrapConfig",
    "BoundEntry",
    "BoundKind",
    "BoundsResult",
    "BrownianMotion",
    "CalibratedCurve",
    "CurveVerdict",
    "DegenerateQuoteError",
    "ExtendedCIRCurve",
    "ExtendedCIRDynamics",
    "FlatDiscountCurve",
    "GammaSubordinator",
    "InadmissibleCurveError",
    "InverseGaussianSubordinator",
    "LevyOUCurve",
    "LevyOUDynamics",
    "MarketFitSystem",
    "NoSolutionError",
    "PaymentSchedule",
    "PinnedValue",
    "QuoteKind",
    "QuoteSet",
    "Rectangle",
    "StationaryPoint",
    "assemble_cds_system",
    "assemble_ois_system",
    "as_discount_curve",
    "bootstrap",
    "build_cds_schedule",
    "build_ois_schedule",
    "cds_model_free_bounds",
    "cds_quotes",
    "convex_mix",
    "cumulant",
    "cumulant_deriv",
    "make_driver",
    "ois_detect_arbitrage",
    "ois_exact_prefix",
    "ois_extremal_curves",
    "ois_model_free_bounds",
    "ois_quotes",
    "phi",
    "psi",
    "repricing_errors",
    "residuals_for",
    "xi",
]
