"""Pixel-bucket lattice over a time/value window.

A :class:`BucketGrid` partitions ``[t_min, t_max] x [v_min, v_max]`` into
``n_t x n_v`` rectangular buckets. Its diagonal is the worst-case distance
between any two points sharing a bucket, which is what makes bucket
preemption a bounded-error simplification.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import GridError, OutOfRangeError
from .validation import check_count

__all__ = ["BucketGrid", "make_grid", "bucket_index"]


@dataclass(frozen=True)
class BucketGrid:
    t_min: float
    t_max: float
    v_min: float
    v_max: float
    n_t: int
    n_v: int

    @property
    def bucket_width(self) -> float:
        return (self.t_max - self.t_min) / self.n_t

    @property
    def bucket_height(self) -> float:
        return (self.v_max - self.v_min) / self.n_v

    @property
    def diagonal(self) -> float:
        return math.hypot(self.bucket_width, self.bucket_height)

    @property
    def n_buckets(self) -> int:
        return self.n_t * self.n_v


def make_grid(
    t_range: tuple[float, float],
    v_range: tuple[float, float],
    n_t: int,
    n_v: int,
) -> BucketGrid:
    """Build a grid, collapsing a degenerate value range to a single row.

    When ``v_min == v_max`` (a flatlined series) the grid keeps one value
    bucket of height 0, so the diagonal reduces to the bucket width and
    filtering still works.
    """
    t_min, t_max = float(t_range[0]), float(t_range[1])
    v_min, v_max = float(v_range[0]), float(v_range[1])
    n_t, n_v = check_count(n_t, "n_t"), check_count(n_v, "n_v")
    if not (math.isfinite(t_min) and math.isfinite(t_max) and t_max > t_min):
        raise GridError(f"time range must satisfy t_max > t_min, got ({t_min}, {t_max})")
    if not (math.isfinite(v_min) and math.isfinite(v_max) and v_max >= v_min):
        raise GridError(f"value range must satisfy v_max >= v_min, got ({v_min}, {v_max})")
    if v_max == v_min:
        n_v = 1
    return BucketGrid(t_min, t_max, v_min, v_max, n_t, n_v)


def bucket_index(grid: BucketGrid, t: float, v: float) -> tuple[int, int]:
    """Map a point to its (time, value) bucket indices.

    Points exactly on the max boundary clamp into the last bucket, so data
    extremes are bucketed rather than rejected.
    """
    if not (grid.t_min <= t <= grid.t_max and grid.v_min <= v <= grid.v_max):
        raise OutOfRangeError(
            f"point ({t}, {v}) outside grid "
            f"[{grid.t_min}, {grid.t_max}] x [{grid.v_min}, {grid.v_max}]"
        )
    i = min(int(math.floor((t - grid.t_min) / grid.bucket_width)), grid.n_t - 1)
    if grid.bucket_height == 0.0:
        return i, 0
    j = min(int(math.floor((v - grid.v_min) / grid.bucket_height)), grid.n_v - 1)
    return i, j


def bucket_ids(grid: BucketGrid, X: np.ndarray) -> np.ndarray:
    """Vectorized flat bucket ids ``i * n_v + j`` for an (n, 2) point array.

    Same arithmetic as :func:`bucket_index` (floor of the same IEEE division),
    so scalar and vector paths agree bit for bit. Raises when any point lies
    outside the grid.
    """
    t, v = X[:, 0], X[:, 1]
    if X.shape[0] and not (
        (t >= grid.t_min).all()
        and (t <= grid.t_max).all()
        and (v >= grid.v_min).all()
        and (v <= grid.v_max).all()
    ):
        inside = (t >= grid.t_min) & (t <= grid.t_max) & (v >= grid.v_min) & (v <= grid.v_max)
        bad = int(np.flatnonzero(~inside)[0])
        raise OutOfRangeError(
            f"point ({t[bad]}, {v[bad]}) at index {bad} outside grid "
            f"[{grid.t_min}, {grid.t_max}] x [{grid.v_min}, {grid.v_max}]"
        )
    i = np.minimum(np.floor((t - grid.t_min) / grid.bucket_width).astype(np.int64), grid.n_t - 1)
    if grid.bucket_height == 0.0:
        j = np.zeros(X.shape[0], dtype=np.int64)
    else:
        j = np.minimum(
            np.floor((v - grid.v_min) / grid.bucket_height).astype(np.int64), grid.n_v - 1
        )
    return i * grid.n_v + j
