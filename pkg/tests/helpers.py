"""Shared reference implementations used as test oracles."""
import numpy as np

from arppf import BucketGrid, bucket_index, make_grid


def occupancy_oracle(points: np.ndarray, grid: BucketGrid) -> np.ndarray:
    """Reference first-preemption scan: plain dict walk, scalar bucketing."""
    seen = {}
    for idx in range(points.shape[0]):
        key = bucket_index(grid, points[idx, 0], points[idx, 1])
        if key not in seen:
            seen[key] = idx
    keep = sorted(seen.values())
    return points[keep]


def grid_over(points: np.ndarray, n_t: int, n_v: int) -> BucketGrid:
    """Grid spanning the data extent, widened when the time axis is degenerate."""
    t_lo, t_hi = float(points[:, 0].min()), float(points[:, 0].max())
    v_lo, v_hi = float(points[:, 1].min()), float(points[:, 1].max())
    if t_hi == t_lo:
        t_hi = t_lo + 1.0
    return make_grid((t_lo, t_hi), (v_lo, v_hi), n_t, n_v)


def points_csv(points: np.ndarray) -> str:
    body = "\n".join(f"{t!r},{v!r}" for t, v in points.tolist())
    return "t,v\n" + body + ("\n" if body else "")
