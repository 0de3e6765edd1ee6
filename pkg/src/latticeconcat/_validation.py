"""Input checks shared by the estimator classes."""

from __future__ import annotations

import numpy as np

from .exceptions import LengthMismatch


def check_labels(labels, p: int, k: int) -> np.ndarray:
    labels = np.asarray(labels)
    if labels.dtype.kind not in "iu":
        if not np.all(np.equal(np.mod(labels, 1), 0)):
            raise ValueError("labels must be integers")
    labels = labels.astype(np.int64)
    if labels.ndim == 0 or labels.shape[-1] != k:
        raise LengthMismatch(f"labels must have trailing length {k}")
    if np.any((labels < 0) | (labels >= p)):
        raise ValueError(f"label entries must lie in [0, {p})")
    return labels


def check_symbols(symbols, order: int, length: int | None = None) -> np.ndarray:
    symbols = np.asarray(symbols)
    if symbols.dtype.kind not in "iu":
        raise ValueError("symbols must be integers")
    symbols = symbols.astype(np.int64)
    if length is not None and (symbols.ndim == 0 or symbols.shape[-1] != length):
        raise LengthMismatch(f"expected {length} symbols, got shape {symbols.shape}")
    if np.any((symbols < 0) | (symbols >= order)):
        raise ValueError(f"symbols must lie in [0, {order})")
    return symbols


def check_points(x, n: int) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim == 0 or x.shape[-1] != n:
        raise LengthMismatch(f"expected vectors of length {n}")
    if not np.all(np.isfinite(x)):
        raise ValueError("input contains non-finite values")
    return x


def check_positive(name: str, value, allow_zero: bool = False) -> float:
    value = float(value)
    ok = value >= 0 if allow_zero else value > 0
    if not ok or not np.isfinite(value):
        raise ValueError(f"{name} must be {'non-negative' if allow_zero else 'positive'}, got {value}")
    return value
