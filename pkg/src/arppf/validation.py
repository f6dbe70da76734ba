"""Input validation helpers for point arrays.

Every public entry point funnels its input through :func:`check_points`, so
the filtering and distance code can assume finite, time-sorted ``(n, 2)``
float64 arrays throughout.
"""
from __future__ import annotations

import numpy as np

__all__ = ["check_points", "check_positive", "check_count"]


def check_points(X, *, sorted_by_t: bool = True, copy: bool = False) -> np.ndarray:
    """Coerce ``X`` to a float64 array of shape ``(n, 2)`` with columns (t, v).

    Rejects NaN/infinite samples and, by default, timestamps that are not
    non-decreasing. Accepts anything ``np.asarray`` understands, including
    an empty list (yielding shape ``(0, 2)``).
    """
    X = np.array(X, dtype=np.float64, copy=copy) if copy else np.asarray(X, dtype=np.float64)
    if X.size == 0:
        return X.reshape(0, 2)
    if X.ndim != 2 or X.shape[1] != 2:
        raise ValueError(f"expected points of shape (n, 2), got {X.shape}")
    if not np.isfinite(X).all():
        bad = int(np.flatnonzero(~np.isfinite(X).all(axis=1))[0])
        raise ValueError(f"non-finite sample at index {bad}")
    if sorted_by_t and X.shape[0] > 1 and np.any(np.diff(X[:, 0]) < 0):
        bad = int(np.flatnonzero(np.diff(X[:, 0]) < 0)[0]) + 1
        raise ValueError(f"timestamps not sorted: regression at index {bad}")
    return X


def check_positive(value: float, name: str) -> float:
    value = float(value)
    if not np.isfinite(value) or value <= 0:
        raise ValueError(f"{name} must be a positive finite number, got {value}")
    return value


def check_count(value: int, name: str) -> int:
    if int(value) != value or int(value) < 1:
        raise ValueError(f"{name} must be a positive integer, got {value}")
    return int(value)
