"""Bucket-preemption filtering and the Douglas-Peucker baseline.

The preemption filter keeps, for every grid bucket, the first point (in input
order) that lands in it and drops the rest. The retained set is therefore a
subsequence of the input, at most one point per bucket, and no dropped point
is farther than one bucket diagonal from a kept one.

Both algorithms are exposed twice: as plain functions over ``(n, 2)`` arrays,
and as scikit-learn style transformers (:class:`RppfFilter`,
:class:`DouglasPeucker`) so they slot into existing pipelines.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from .grid import BucketGrid, bucket_ids, make_grid
from .validation import check_points, check_positive

__all__ = [
    "FilterResult",
    "rppf_filter",
    "douglas_peucker",
    "point_segment_distance",
    "RppfFilter",
    "DouglasPeucker",
]

# Above this many buckets the dense first-writer table would outweigh the
# data; fall back to sort-based dedup with O(n) memory.
_DENSE_BUCKET_LIMIT = 1 << 22


@dataclass(frozen=True)
class FilterResult:
    """Outcome of one preemption pass: kept points plus occupancy counts."""

    retained: np.ndarray
    occupied_buckets: int
    input_count: int


def rppf_filter(X, grid: BucketGrid) -> FilterResult:
    """Keep the first point of every occupied bucket, in input order.

    ``X`` must be sorted by time and lie entirely inside ``grid``; a point
    outside the grid rejects the whole call (build the grid from the data
    extent, or clip first).
    """
    X = check_points(X)
    n = X.shape[0]
    if n == 0:
        return FilterResult(X, 0, 0)
    ids = bucket_ids(grid, X)
    if grid.n_buckets <= _DENSE_BUCKET_LIMIT:
        # Reversed scatter: later writes win, so writing indices in reverse
        # leaves each bucket holding its earliest point.
        occ = np.full(grid.n_buckets, -1, dtype=np.int64)
        occ[ids[::-1]] = np.arange(n - 1, -1, -1, dtype=np.int64)
        keep = occ[occ >= 0]
        keep.sort()
    else:
        _, keep = np.unique(ids, return_index=True)
        keep.sort()
    return FilterResult(X[keep], int(keep.size), n)


def point_segment_distance(p, a, b) -> float:
    """Euclidean distance from point ``p`` to the closed segment ``[a, b]``."""
    pt, pv = float(p[0]), float(p[1])
    at, av = float(a[0]), float(a[1])
    bt, bv = float(b[0]), float(b[1])
    dt, dv = bt - at, bv - av
    length_sq = dt * dt + dv * dv
    if length_sq == 0.0:
        return math.hypot(pt - at, pv - av)
    s = ((pt - at) * dt + (pv - av) * dv) / length_sq
    s = min(1.0, max(0.0, s))
    return math.hypot(pt - (at + s * dt), pv - (av + s * dv))


def _segment_distances(P: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    # Vectorized twin of point_segment_distance.
    d = b - a
    length_sq = float(d @ d)
    if length_sq == 0.0:
        return np.hypot(P[:, 0] - a[0], P[:, 1] - a[1])
    s = np.clip(((P - a) @ d) / length_sq, 0.0, 1.0)
    return np.hypot(P[:, 0] - (a[0] + s * d[0]), P[:, 1] - (a[1] + s * d[1]))


def douglas_peucker(X, epsilon: float) -> np.ndarray:
    """Classic recursive chord simplification, run iteratively.

    Endpoints are always kept. Within a chord, the farthest point splits the
    range when its distance exceeds ``epsilon``; the split point is chosen as
    the first index attaining the maximum, so the recursion tree does not
    depend on ``epsilon`` and a larger tolerance retains a subset of a
    smaller one. The explicit stack keeps 100k-point collinear inputs from
    blowing the call depth.
    """
    epsilon = check_positive(epsilon, "epsilon")
    X = check_points(X)
    n = X.shape[0]
    if n < 2:
        return X
    keep = np.zeros(n, dtype=bool)
    keep[0] = keep[n - 1] = True
    stack = [(0, n - 1)]
    while stack:
        lo, hi = stack.pop()
        if hi - lo < 2:
            continue
        dists = _segment_distances(X[lo + 1 : hi], X[lo], X[hi])
        split = lo + 1 + int(np.argmax(dists))
        if dists[split - lo - 1] > epsilon:
            keep[split] = True
            stack.append((lo, split))
            stack.append((split, hi))
    return X[keep]


class RppfFilter(BaseEstimator, TransformerMixin):
    """Bucket-preemption downsampler with a scikit-learn interface.

    Parameters
    ----------
    n_t, n_v : int
        Bucket counts along the time and value axes (one bucket per display
        pixel reproduces the charting use case).
    t_range, v_range : tuple of (min, max), optional
        Grid extent. Either may be omitted, in which case ``fit`` learns it
        from the data.
    """

    def __init__(self, n_t: int = 300, n_v: int = 100, t_range=None, v_range=None):
        self.n_t = n_t
        self.n_v = n_v
        self.t_range = t_range
        self.v_range = v_range

    def fit(self, X, y=None):
        X = check_points(X)
        t_range = self.t_range
        v_range = self.v_range
        if t_range is None:
            if X.shape[0] == 0:
                raise ValueError("cannot learn t_range from an empty series")
            t_range = (float(X[:, 0].min()), float(X[:, 0].max()))
        if v_range is None:
            if X.shape[0] == 0:
                raise ValueError("cannot learn v_range from an empty series")
            v_range = (float(X[:, 1].min()), float(X[:, 1].max()))
        self.grid_ = make_grid(t_range, v_range, self.n_t, self.n_v)
        return self

    def transform(self, X) -> np.ndarray:
        if not hasattr(self, "grid_"):
            raise AttributeError("RppfFilter is not fitted yet; call fit first")
        return rppf_filter(X, self.grid_).retained


class DouglasPeucker(BaseEstimator, TransformerMixin):
    """Douglas-Peucker simplification as a stateless transformer."""

    def __init__(self, epsilon: float = 1.0):
        self.epsilon = epsilon

    def fit(self, X, y=None):
        check_positive(self.epsilon, "epsilon")
        return self

    def transform(self, X) -> np.ndarray:
        return douglas_peucker(X, self.epsilon)
