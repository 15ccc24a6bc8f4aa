"""Central numerical tolerance table.

Every tolerance used by the library lives here so picking them apart in a
review (or overriding them in an emergency) happens in exactly one place.
The ``ADMCURVE_TOL_OVERRIDE`` environment variable can remap entries with a
comma-separated list such as ``equality=1e-10,quadrature_abs=1e-8``.  This
hook exists for debugging only; production code should never need it.
"""

from __future__ import annotations

import os

_DEFAULTS: dict[str, float] = {
    # floating-point equality in bound recursions
    "equality": 1e-12,
    # slack applied when testing strict arbitrage inequalities
    "arbitrage_slack": 1e-14,
    # absolute tolerance of the adaptive Gauss-Legendre quadrature
    "quadrature_abs": 1e-10,
    # absolute row-residual tolerance accepted after a bootstrap root solve
    "residual": 1e-12,
    # relative repricing tolerance for calibrated curves
    "reprice_rel": 1e-8,
    # |K'| stopping threshold for the stationary-point bisection
    "stationary_kprime": 1e-12,
}

_ENV_VAR = "ADMCURVE_TOL_OVERRIDE"


def _load() -> dict[str, float]:
    table = dict(_DEFAULTS)
    raw = os.environ.get(_ENV_VAR, "")
    if raw:
        for item in raw.split(","):
            item = item.strip()
            if not item:
                continue
            name, _, value = item.partition("=")
            name = name.strip()
            if name not in table:
                raise ValueError(f"unknown tolerance {name!r} in {_ENV_VAR}")
            table[name] = float(value)
    return table


TOL: dict[str, float] = _load()


def tol(name: str) -> float:
    """Look up a named tolerance."""
    return TOL[name]
