"""Argument checks shared by the estimators and the command line."""

from __future__ import annotations

from numbers import Integral

import numpy as np
from sklearn.utils.validation import check_array


def check_int(value, name: str, minimum: int | None = None, maximum: int | None = None) -> int:
    if isinstance(value, bool) or not isinstance(value, Integral):
        raise TypeError(f"{name} must be an integer, got {type(value).__name__}")
    value = int(value)
    if minimum is not None and value < minimum:
        raise ValueError(f"{name} must be >= {minimum}, got {value}")
    if maximum is not None and value > maximum:
        raise ValueError(f"{name} must be <= {maximum}, got {value}")
    return value


def check_optional_int(value, name: str, minimum: int | None = None) -> int | None:
    return None if value is None else check_int(value, name, minimum)


def check_choice(value, name: str, choices) -> str:
    if value not in choices:
        raise ValueError(f"{name} must be one of {sorted(choices)}, got {value!r}")
    return value


def check_growth_vector(sizes) -> np.ndarray:
    """Non-empty 1-d vector of non-negative integers with a positive start layer."""
    arr = np.asarray(getattr(sizes, "layer_sizes", sizes))
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError("growth must be a non-empty 1-d sequence of layer sizes")
    if not np.issubdtype(arr.dtype, np.integer):
        if not np.all(np.equal(np.mod(arr, 1), 0)):
            raise ValueError("layer sizes must be integers")
        arr = arr.astype(np.int64)
    if (arr < 0).any() or arr[0] < 1:
        raise ValueError("layer sizes must be non-negative with a non-empty start layer")
    return arr.astype(np.int64)


def check_n_column(X) -> np.ndarray:
    """Accept a 1-d sequence or an ``(n_samples, 1)`` array of integer ``n`` values."""
    arr = np.asarray(X)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    arr = check_array(arr, dtype=None, ensure_2d=True)
    if arr.shape[1] != 1:
        raise ValueError(f"expected a single feature column of n values, got {arr.shape[1]} columns")
    col = arr[:, 0]
    if not np.all(np.equal(np.mod(col.astype(np.float64), 1), 0)):
        raise ValueError("n values must be integers")
    return col.astype(np.int64)
