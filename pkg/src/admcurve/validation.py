"""Input-validation helpers shared by the estimators and schedule builders."""

from __future__ import annotations

import numpy as np


def as_1d_array(values, name: str) -> np.ndarray:
    """Coerce to a 1-D float array, rejecting empties and non-finite entries."""
    arr = np.asarray(values, dtype=float)
    if arr.ndim == 2 and arr.shape[1] == 1:
        arr = arr.ravel()
    if arr.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if arr.size == 0:
        raise ValueError(f"{name} must not be empty")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite values")
    return arr


def check_strictly_increasing(values: np.ndarray, name: str) -> None:
    if np.any(np.diff(values) <= 0.0):
        raise ValueError(f"{name} must be strictly increasing")


def check_non_negative(values: np.ndarray, name: str) -> None:
    if np.any(values < 0.0):
        raise ValueError(f"{name} must be non-negative")


def check_positive_scalar(value: float, name: str) -> float:
    value = float(value)
    if not np.isfinite(value) or value <= 0.0:
        raise ValueError(f"{name} must be a positive finite number, got {value}")
    return value


def check_unit_interval(value: float, name: str, *, closed_right: bool = False) -> float:
    value = float(value)
    hi_ok = value <= 1.0 if closed_right else value < 1.0
    if not (0.0 <= value and hi_ok):
        bracket = "[0, 1]" if closed_right else "[0, 1)"
        raise ValueError(f"{name} must lie in {bracket}, got {value}")
    return value
