"""Two-tier range queries: raw on short spans, preprocessed segments on long.

The resolver picks the path. Short requests (span below the cutoff, by
default the smallest span whose target time bucket is at least one batch
interval wide) read raw points and filter them once, so the result carries a
single bucket diagonal of error. Long requests read the preprocessed
segments instead: the range is expanded outward to batch boundaries, the
target grid's value axis is rebuilt from the segments' exact raw extents,
and one final filter pass runs over the fetched points. The reported
distance bound composes the worst per-segment preprocessing bound with the
final grid diagonal.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from .errors import NoSegmentsError
from .filters import rppf_filter
from .grid import BucketGrid, make_grid
from .store import SeriesCatalogEntry, SeriesStore
from .validation import check_count

__all__ = ["QueryParams", "QueryPlan", "QueryMeta", "QueryResult", "QueryEngine"]

_MODES = ("auto", "raw", "preprocessed")


@dataclass(frozen=True)
class QueryParams:
    series_id: str
    t_from: float
    t_to: float
    n_t_target: int = 300
    n_v_target: int = 100
    mode: str = "auto"

    def __post_init__(self):
        if not self.t_to > self.t_from:
            raise ValueError(f"need t_to > t_from, got ({self.t_from}, {self.t_to})")
        check_count(self.n_t_target, "n_t_target")
        check_count(self.n_v_target, "n_v_target")
        if self.mode not in _MODES:
            raise ValueError(f"mode must be one of {_MODES}, got {self.mode!r}")


@dataclass(frozen=True)
class QueryPlan:
    series_id: str
    path: str  # "raw" | "preprocessed"
    aligned_range: tuple[float, float]
    n_t_target: int
    n_v_target: int
    segments_needed: tuple[int, int] | None  # batch index range [k0, k1)
    raw_cutoff_reason: str


@dataclass(frozen=True)
class QueryMeta:
    path: str
    raw_points_scanned: int
    points_fetched: int
    points_returned: int
    target_grid: BucketGrid | None
    distance_bound: float
    elapsed_s: float
    aligned_from: float
    aligned_to: float


@dataclass(frozen=True, eq=False)
class QueryResult:
    points: np.ndarray
    meta: QueryMeta

    def to_dict(self) -> dict:
        grid = self.meta.target_grid
        return {
            "points": self.points.tolist(),
            "meta": {
                "path": self.meta.path,
                "raw_points_scanned": self.meta.raw_points_scanned,
                "points_fetched": self.meta.points_fetched,
                "points_returned": self.meta.points_returned,
                "distance_bound": self.meta.distance_bound,
                "elapsed_ms": self.meta.elapsed_s * 1000.0,
                "aligned_from": self.meta.aligned_from,
                "aligned_to": self.meta.aligned_to,
                "target_grid": None
                if grid is None
                else {
                    "t_min": grid.t_min,
                    "t_max": grid.t_max,
                    "v_min": grid.v_min,
                    "v_max": grid.v_max,
                    "n_t": grid.n_t,
                    "n_v": grid.n_v,
                    "diagonal": grid.diagonal,
                },
            },
        }


class QueryEngine:
    """Stateless query front over a :class:`SeriesStore`.

    ``raw_cutoff_span`` overrides the span below which auto mode bypasses
    segments; the default is ``n_t_target * t_pre``, the geometric condition
    under which the preprocessing buckets are no coarser than the target's.
    """

    def __init__(self, store: SeriesStore, raw_cutoff_span: float | None = None):
        self.store = store
        self.raw_cutoff_span = raw_cutoff_span

    def resolve(self, params: QueryParams, catalog: SeriesCatalogEntry | None = None) -> QueryPlan:
        if catalog is None:
            catalog = self.store.catalog_entry(params.series_id)
        cfg = catalog.preprocess_config
        available = cfg is not None and catalog.segment_count > 0

        if params.mode == "preprocessed" and not available:
            raise NoSegmentsError(f"series {params.series_id!r} has no preprocessed segments")
        if params.mode == "raw" or not available:
            reason = "forced by mode" if params.mode == "raw" else "no preprocessed segments"
            return QueryPlan(
                params.series_id,
                "raw",
                (params.t_from, params.t_to),
                params.n_t_target,
                params.n_v_target,
                None,
                reason,
            )

        span = params.t_to - params.t_from
        cutoff = (
            self.raw_cutoff_span
            if self.raw_cutoff_span is not None
            else params.n_t_target * cfg.t_pre
        )
        if params.mode == "auto" and span < cutoff:
            return QueryPlan(
                params.series_id,
                "raw",
                (params.t_from, params.t_to),
                params.n_t_target,
                params.n_v_target,
                None,
                f"span {span:g} below raw cutoff {cutoff:g}",
            )

        k0 = math.floor(params.t_from / cfg.t_pre)
        k1 = math.ceil(params.t_to / cfg.t_pre)
        aligned = (k0 * cfg.t_pre, k1 * cfg.t_pre)
        return QueryPlan(
            params.series_id,
            "preprocessed",
            aligned,
            params.n_t_target,
            params.n_v_target,
            (k0, k1),
            f"span {span:g} at or above cutoff {cutoff:g}",
        )

    def execute(self, plan: QueryPlan) -> QueryResult:
        start = time.perf_counter()
        t_from, t_to = plan.aligned_range
        if plan.path == "raw":
            points = self.store.read_raw(plan.series_id, t_from, t_to)
            if points.shape[0] == 0:
                return self._empty(plan, start)
            grid = make_grid(
                (t_from, t_to),
                (float(points[:, 1].min()), float(points[:, 1].max())),
                plan.n_t_target,
                plan.n_v_target,
            )
            result = rppf_filter(points, grid)
            return QueryResult(
                result.retained,
                QueryMeta(
                    path="raw",
                    raw_points_scanned=result.input_count,
                    points_fetched=result.input_count,
                    points_returned=result.occupied_buckets,
                    target_grid=grid,
                    distance_bound=grid.diagonal,
                    elapsed_s=time.perf_counter() - start,
                    aligned_from=t_from,
                    aligned_to=t_to,
                ),
            )

        span = self.store.read_segment_span(plan.series_id, t_from, t_to)
        if span is None:
            return self._empty(plan, start)
        fetched = span.points
        # Exact raw value extent comes from the segments, so the chart's value
        # axis matches what the raw path would have produced.
        grid = make_grid(
            (t_from, t_to), (span.v_min, span.v_max), plan.n_t_target, plan.n_v_target
        )
        result = rppf_filter(fetched, grid)
        bound = span.max_bound + grid.diagonal
        return QueryResult(
            result.retained,
            QueryMeta(
                path="preprocessed",
                raw_points_scanned=0,
                points_fetched=int(fetched.shape[0]),
                points_returned=result.occupied_buckets,
                target_grid=grid,
                distance_bound=bound,
                elapsed_s=time.perf_counter() - start,
                aligned_from=t_from,
                aligned_to=t_to,
            ),
        )

    def query(self, params: QueryParams) -> QueryResult:
        return self.execute(self.resolve(params))

    def _empty(self, plan: QueryPlan, start: float) -> QueryResult:
        return QueryResult(
            np.empty((0, 2)),
            QueryMeta(
                path=plan.path,
                raw_points_scanned=0,
                points_fetched=0,
                points_returned=0,
                target_grid=None,
                distance_bound=0.0,
                elapsed_s=time.perf_counter() - start,
                aligned_from=plan.aligned_range[0],
                aligned_to=plan.aligned_range[1],
            ),
        )
