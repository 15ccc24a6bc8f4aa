"""Flat-file input and output.

All numeric output is printed with 12 significant digits, one fixed column
order per file kind, and LF line endings, so identical inputs produce
byte-identical files.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .bounds import BoundsResult
from .schedules import QuoteSet, cds_quotes, ois_quotes


def fmt(x: float) -> str:
    return f"{float(x):.12g}"


def read_quote_csv(path: str | Path, kind: str, recovery: float = 0.4,
                   frequency: int = 4) -> QuoteSet:
    """Parse a quote file.

    OIS files carry the header ``maturity_years,rate`` with decimal rates;
    CDS files carry ``maturity_years,spread_bp`` with spreads in basis
    points.
    """
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = [c.strip().lower() for c in next(reader)]
        except StopIteration:
            raise ValueError(f"{path}: empty quote file") from None
        rows = [row for row in reader if row and any(cell.strip() for cell in row)]
    expected = {"ois": ["maturity_years", "rate"],
                "cds": ["maturity_years", "spread_bp"]}[kind]
    if header != expected:
        raise ValueError(f"{path}: expected header {','.join(expected)!r}, got "
                         f"{','.join(header)!r}")
    try:
        mats = [float(r[0]) for r in rows]
        vals = [float(r[1]) for r in rows]
    except (ValueError, IndexError) as exc:
        raise ValueError(f"{path}: malformed quote row: {exc}") from None
    if kind == "ois":
        return ois_quotes(mats, vals)
    return cds_quotes(mats, [v / 1e4 for v in vals], recovery=recovery,
                      frequency=frequency)


def _write_rows(path: Path, header: list[str], rows) -> None:
    with path.open("w", newline="\n") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def write_bounds_csv(path: str | Path, result: BoundsResult) -> None:
    rows = [
        [fmt(e.maturity), e.kind.value,
         fmt(e.lower), fmt(e.upper)]
        for e in result.entries
    ]
    _write_rows(Path(path), ["maturity", "kind", "value_or_min", "max"], rows)


def write_rectangles_csv(path: str | Path, result: BoundsResult) -> None:
    rows = [
        [fmt(r.t_left), fmt(r.v_bottom), fmt(r.t_right), fmt(r.v_top)]
        for r in result.rectangles
    ]
    _write_rows(Path(path), ["t_left", "v_bottom", "t_right", "v_top"], rows)


def bounds_json_payload(result: BoundsResult) -> dict:
    return {
        "bounds": [
            {"maturity": e.maturity, "kind": e.kind.value,
             "value_or_min": e.lower, "max": e.upper}
            for e in result.entries
        ],
        "rectangles": [
            {"t_left": r.t_left, "v_bottom": r.v_bottom,
             "t_right": r.t_right, "v_top": r.v_top}
            for r in result.rectangles
        ],
    }


def write_bounds_json(path: str | Path, result: BoundsResult) -> None:
    with Path(path).open("w", newline="\n") as fh:
        json.dump(bounds_json_payload(result), fh, indent=2)
        fh.write("\n")


def write_curve_csv(path: str | Path, samples: np.ndarray) -> None:
    """Sampled curve table: t, discount_or_survival, spot_rate, forward_rate."""
    rows = [[fmt(t), fmt(v), fmt(s), fmt(f)] for t, v, s, f in samples]
    _write_rows(Path(path), ["t", "discount_or_survival", "spot_rate", "forward_rate"],
                rows)


def read_curve_csv(path: str | Path) -> np.ndarray:
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if [c.strip() for c in header] != ["t", "discount_or_survival",
                                           "spot_rate", "forward_rate"]:
            raise ValueError(f"{path}: not a curve sample file")
        rows = [[float(c) for c in row] for row in reader if row]
    return np.asarray(rows)


def write_json(path: str | Path, payload: dict) -> None:
    with Path(path).open("w", newline="\n") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")
