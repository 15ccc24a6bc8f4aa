"""Command-line surface.

Subcommands
-----------
ois-bounds   exact discount factors and model-free bounds for an OIS strip
cds-bounds   survival-probability bounds for a CDS strip
detect-arb   scan an OIS strip for hidden arbitrage
calibrate    bootstrap an admissible curve through the quotes
sweep        repeat calibrate over a list of parameter values
mix          convex combination of two exported curve samples

Exit codes: 0 success, 1 input/parse error, 2 arbitrage detected,
3 calibration failure.  Failures print machine-readable JSON diagnostics.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from .bounds import (
    ArbitrageError,
    BoundsResult,
    cds_model_free_bounds,
    ois_detect_arbitrage,
    ois_model_free_bounds,
)
from .calibration import (
    InadmissibleCurveError,
    NoSolutionError,
    convex_mix,
    repricing_errors,
    residuals_for,
)
from .csvio import (
    fmt,
    read_curve_csv,
    read_quote_csv,
    write_bounds_csv,
    write_bounds_json,
    write_curve_csv,
    write_json,
    write_rectangles_csv,
)
from .discount import FlatDiscountCurve
from .estimators import ExtendedCIRCurve, LevyOUCurve


def _sniff_kind(path: str) -> str:
    with open(path, newline="") as fh:
        header = [c.strip().lower() for c in next(csv.reader(fh))]
    if header == ["maturity_years", "rate"]:
        return "ois"
    if header == ["maturity_years", "spread_bp"]:
        return "cds"
    raise ValueError(f"{path}: unrecognised quote header {','.join(header)!r}")


def _diag(code: int, kind: str, **fields) -> int:
    payload = {"status": "error", "exit_code": code, "error": {"type": kind, **fields}}
    print(json.dumps(payload, sort_keys=True))
    return code


def _make_estimator(args, instrument: str):
    common = dict(x0=args.x0, a=args.a, sigma=args.sigma,
                  instrument=instrument, recovery=args.recovery,
                  discount=args.flat_rate, frequency=args.frequency)
    if args.model == "levy-ou":
        return LevyOUCurve(c=args.c, driver=args.driver,
                           jump_scale=args.jump_scale, **common)
    if args.model == "cir":
        return ExtendedCIRCurve(**common)
    raise ValueError(f"unknown model {args.model!r}")


def _fit_report(est, mats, rates, elapsed: float) -> dict:
    verdict = est.verdict_
    return {
        "model": est.get_params(),
        "instruments": [
            {"maturity": float(m), "quote": float(r),
             "implied_level": float(b), "repricing_error": float(e)}
            for m, r, b, e in zip(mats, rates, est.levels_, est.repricing_errors_)
        ],
        "verdict": "admissible" if verdict.admissible else "violation",
        "violation": None if verdict.admissible else {
            "interval": verdict.interval, "t_star": verdict.t_star,
            "reason": verdict.reason,
        },
        "timing_seconds": elapsed,
    }


def validate_containment(samples: np.ndarray, bounds: BoundsResult,
                         slack: float = 1e-9) -> bool:
    """Every sampled curve point lies inside the rectangle union."""
    for t, v, _, _ in samples:
        if t > bounds.maturities[-1] + 1e-12:
            return False
        lo, hi = bounds.envelope(float(t))
        if not (lo - slack <= v <= hi + slack):
            return False
    return True


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def _cmd_ois_bounds(args) -> int:
    quotes = read_quote_csv(args.input, "ois")
    result = ois_model_free_bounds(quotes)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_bounds_csv(out / "bounds.csv", result)
    write_rectangles_csv(out / "rectangles.csv", result)
    write_bounds_json(out / "bounds.json", result)
    print(f"wrote bounds for {len(result.entries)} maturities to {out}")
    return 0


def _cmd_cds_bounds(args) -> int:
    quotes = read_quote_csv(args.input, "cds", recovery=args.recovery,
                            frequency=args.frequency)
    result = cds_model_free_bounds(quotes, FlatDiscountCurve(args.flat_rate))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_bounds_csv(out / "bounds.csv", result)
    write_rectangles_csv(out / "rectangles.csv", result)
    write_bounds_json(out / "bounds.json", result)
    print(f"wrote bounds for {len(result.entries)} maturities to {out}")
    return 0


def _cmd_detect_arb(args) -> int:
    quotes = read_quote_csv(args.input, "ois")
    report = ois_detect_arbitrage(quotes)
    payload = {"status": "clean" if report.clean else "arbitrage",
               "index": report.index, "detail": report.detail}
    print(json.dumps(payload, sort_keys=True))
    return 0 if report.clean else 2


def _cmd_calibrate(args) -> int:
    kind = _sniff_kind(args.input)
    quotes = read_quote_csv(args.input, kind, recovery=args.recovery,
                            frequency=args.frequency)
    est = _make_estimator(args, kind)
    started = time.perf_counter()
    est.fit(quotes.maturities, quotes.rates)
    elapsed = time.perf_counter() - started
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_curve_csv(out / "curve.csv", est.sample(args.step))
    write_json(out / "report.json", _fit_report(est, quotes.maturities,
                                                quotes.rates, elapsed))
    if not est.admissible_:
        raise InadmissibleCurveError(est.verdict_.interval or 0,
                                     est.verdict_.t_star, est.verdict_.reason)
    print(f"calibrated {len(quotes)} instruments; curve and report in {out}")
    return 0


def _cmd_sweep(args) -> int:
    kind = _sniff_kind(args.input)
    quotes = read_quote_csv(args.input, kind, recovery=args.recovery,
                            frequency=args.frequency)
    values = [float(v) for v in args.values.split(",") if v.strip()]
    if not values:
        raise ValueError("--values must list at least one number")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    def run_one(value: float):
        est = _make_estimator(args, kind)
        est.set_params(**{args.param: value})
        est.fit(quotes.maturities, quotes.rates)
        return est

    with ThreadPoolExecutor(max_workers=min(4, len(values))) as pool:
        fitted = list(pool.map(run_one, values))

    if kind == "ois":
        bounds = ois_model_free_bounds(quotes)
    else:
        bounds = cds_model_free_bounds(quotes, FlatDiscountCurve(args.flat_rate))
    write_bounds_csv(out / "bounds_overlay.csv", bounds)

    summary = []
    for value, est in zip(values, fitted):
        name = f"curve_{args.param}_{value:g}.csv"
        write_curve_csv(out / name, est.sample(args.step))
        summary.append({
            "value": value, "file": name,
            "admissible": est.admissible_,
            "max_repricing_error": float(np.max(est.repricing_errors_)),
        })
    write_json(out / "sweep.json", {"param": args.param, "runs": summary})
    print(f"swept {args.param} over {len(values)} values into {out}")
    return 0


def _cmd_mix(args) -> int:
    a = read_curve_csv(args.curve_a)
    b = read_curve_csv(args.curve_b)
    if a.shape != b.shape or np.max(np.abs(a[:, 0] - b[:, 0])) > 1e-12:
        raise ValueError("curve samples are on different grids; refusing to mix")
    quotes = read_quote_csv(args.quotes, "ois")
    times = a[:, 0]
    mixed = args.alpha * a[:, 1] + (1.0 - args.alpha) * b[:, 1]

    # reprice the quotes off the mixed samples
    lookup = {round(float(t), 9): float(v) for t, v in zip(times, mixed)}
    missing = [d for d in quotes.schedule.dates if round(d, 9) not in lookup]
    if missing:
        raise ValueError(f"mixed grid lacks payment dates {missing[:3]}...")
    residuals = residuals_for(quotes)
    errors = repricing_errors(residuals, lambda t: lookup[round(float(t), 9)])

    spot = np.zeros_like(times)
    pos = times > 0
    spot[pos] = -np.log(mixed[pos]) / times[pos]
    logp = -np.log(mixed)
    fward = np.gradient(logp, times)
    spot[~pos] = fward[~pos]
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_curve_csv(out / "mixed.csv", np.column_stack([times, mixed, spot, fward]))
    write_json(out / "mix_report.json", {
        "alpha": args.alpha,
        "monotone": bool(np.all(np.diff(mixed) <= 1e-12)),
        "max_repricing_error": float(np.max(errors)),
    })
    print(f"mixed curves with alpha={args.alpha:g} into {out}")
    return 0


# ---------------------------------------------------------------------------
# parser / entry point
# ---------------------------------------------------------------------------


def _add_model_flags(sp) -> None:
    sp.add_argument("--model", choices=["levy-ou", "cir"], default="levy-ou")
    sp.add_argument("--x0", type=float, default=0.00063)
    sp.add_argument("--a", type=float, default=0.01)
    sp.add_argument("--sigma", type=float, default=1.0)
    sp.add_argument("--c", type=float, default=10.0)
    sp.add_argument("--driver", choices=["brownian", "gamma", "ig"], default="gamma")
    sp.add_argument("--lambda", dest="jump_scale", type=float, default=200.0,
                    help="jump-scale parameter of the subordinator drivers")
    sp.add_argument("--step", type=float, default=0.05,
                    help="sample step (years) for exported curves")


def _add_market_flags(sp) -> None:
    sp.add_argument("--recovery", type=float, default=0.4)
    sp.add_argument("--flat-rate", dest="flat_rate", type=float, default=0.03,
                    help="flat continuously compounded discounting rate")
    sp.add_argument("--frequency", type=int, default=4,
                    help="CDS premium payments per year")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="admcurve",
        description="Arbitrage-free bounds and admissible curve construction "
                    "from OIS and CDS quote strips.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("ois-bounds", help="bounds for an OIS discount strip")
    sp.add_argument("input")
    sp.add_argument("--out", default="out")
    sp.set_defaults(func=_cmd_ois_bounds)

    sp = sub.add_parser("cds-bounds", help="bounds for a CDS survival strip")
    sp.add_argument("input")
    sp.add_argument("--out", default="out")
    _add_market_flags(sp)
    sp.set_defaults(func=_cmd_cds_bounds)

    sp = sub.add_parser("detect-arb", help="scan an OIS strip for arbitrage")
    sp.add_argument("input")
    sp.set_defaults(func=_cmd_detect_arb)

    sp = sub.add_parser("calibrate", help="fit an admissible curve to quotes")
    sp.add_argument("input")
    sp.add_argument("--out", default="out")
    _add_model_flags(sp)
    _add_market_flags(sp)
    sp.set_defaults(func=_cmd_calibrate)

    sp = sub.add_parser("sweep", help="calibrate across a parameter list")
    sp.add_argument("input")
    sp.add_argument("--out", default="out")
    sp.add_argument("--param", default="c",
                    help="estimator parameter to sweep (e.g. c, x0)")
    sp.add_argument("--values", required=True,
                    help="comma-separated parameter values")
    _add_model_flags(sp)
    _add_market_flags(sp)
    sp.set_defaults(func=_cmd_sweep)

    sp = sub.add_parser("mix", help="convex mix of two exported OIS curves")
    sp.add_argument("quotes", help="OIS quote csv used for the repricing check")
    sp.add_argument("--curve-a", required=True)
    sp.add_argument("--curve-b", required=True)
    sp.add_argument("--alpha", type=float, default=0.5)
    sp.add_argument("--out", default="out")
    sp.set_defaults(func=_cmd_mix)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ArbitrageError as exc:
        return _diag(2, "arbitrage", index=exc.index, detail=exc.detail)
    except (NoSolutionError, InadmissibleCurveError) as exc:
        extra = {"step": exc.step}
        if isinstance(exc, InadmissibleCurveError):
            extra.update(t_star=exc.t_star, reason=exc.reason)
        return _diag(3, "calibration", detail=str(exc), **extra)
    except (ValueError, OSError, KeyError) as exc:
        return _diag(1, "input", detail=str(exc))


if __name__ == "__main__":
    sys.exit(main())
