"""Batch preprocessing: per-interval multi-pass preemption with bounded memory.

A series is cut into intervals of length ``t_pre`` aligned to the global
epoch, and each interval is filtered through a grid of a single time bucket
by ``n_v_pre`` value buckets. Splitting the interval's points into several
passes caps live memory at one chunk plus one bucket row, at the price of one
extra bucket diagonal in the distance bound per pass; the per-pass diagonals
are recorded so the true accumulated bound ships with every segment.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Protocol

import numpy as np

from .errors import OutOfRangeError
from .filters import rppf_filter
from .grid import make_grid
from .validation import check_count, check_points, check_positive

__all__ = [
    "BatchConfig",
    "Segment",
    "MemoryStats",
    "PreprocessReport",
    "plan_batches",
    "run_batch",
    "preprocess_series",
]


@dataclass(frozen=True)
class BatchConfig:
    """Preprocessing knobs: interval length, pass count, value-bucket count."""

    t_pre: float
    passes: int = 1
    n_v_pre: int = 100

    def __post_init__(self):
        check_positive(self.t_pre, "t_pre")
        check_count(self.passes, "passes")
        check_count(self.n_v_pre, "n_v_pre")


@dataclass(frozen=True, eq=False)
class Segment:
    """Persisted outcome of one batch: kept points plus exact accounting.

    ``v_min``/``v_max`` track every raw point of the interval (not just the
    kept ones), which is what lets a later query reconstruct the exact value
    axis. ``pass_diagonals`` are the bucket diagonals of each executed pass;
    their sum bounds the distance between the interval's raw points and
    ``retained``.
    """

    series_id: str
    batch_index: int
    t_start: float
    t_end: float
    v_min: float | None
    v_max: float | None
    passes_used: int
    retained: np.ndarray
    raw_count: int
    pass_diagonals: tuple[float, ...]

    @property
    def distance_bound(self) -> float:
        # Diagonals are non-negative by construction; plain sum matches
        # chained_bound without its per-element validation.
        return float(sum(self.pass_diagonals))


@dataclass(frozen=True)
class MemoryStats:
    """Live point count at each pass's peak, and the configured ceiling."""

    per_pass_peak: tuple[int, ...]
    bound_per_pass: int


@dataclass
class PreprocessReport:
    raw_total: int = 0
    retained_total: int = 0
    batches: int = 0
    segments_written: int = 0
    max_pass_peak: int = 0
    bound_per_pass: int = 0
    pass_peaks: tuple[int, ...] = ()
    segment_bounds: dict[int, float] = field(default_factory=dict)

    @property
    def retention_ratio(self) -> float:
        return self.retained_total / self.raw_total if self.raw_total else 0.0

    def to_dict(self) -> dict:
        return {
            "raw_total": self.raw_total,
            "retained_total": self.retained_total,
            "retention_ratio": self.retention_ratio,
            "batches": self.batches,
            "segments_written": self.segments_written,
            "max_pass_peak": self.max_pass_peak,
            "bound_per_pass": self.bound_per_pass,
            "pass_peaks": list(self.pass_peaks),
            "max_segment_bound": max(self.segment_bounds.values(), default=0.0),
        }


def plan_batches(t_from: float, t_to: float, t_pre: float) -> list[tuple[float, float]]:
    """Half-open intervals ``[k*t_pre, (k+1)*t_pre)`` covering ``[t_from, t_to)``.

    Intervals align to multiples of ``t_pre`` from epoch 0 and expand outward,
    so the same batch boundaries serve every overlapping query.
    """
    check_positive(t_pre, "t_pre")
    if not t_to > t_from:
        raise ValueError(f"need t_to > t_from, got ({t_from}, {t_to})")
    k = math.floor(t_from / t_pre)
    intervals = []
    while k * t_pre < t_to:
        intervals.append((k * t_pre, (k + 1) * t_pre))
        k += 1
    return intervals


def batch_index_of(t_start: float, t_pre: float) -> int:
    return round(t_start / t_pre)


def run_batch(
    points,
    interval: tuple[float, float],
    config: BatchConfig,
    series_id: str = "",
    batch_index: int | None = None,
) -> tuple[Segment, MemoryStats]:
    """Filter one interval's points in ``config.passes`` sequential passes.

    Pass i re-filters the survivors of pass i-1 together with the next chunk
    under a grid spanning the running value extent of all raw points seen so
    far; a grown extent simply re-buckets the survivors, while points already
    dropped stay dropped (that irreversibility is exactly why each pass adds
    its diagonal to the bound).
    """
    t_start, t_end = float(interval[0]), float(interval[1])
    if not t_end > t_start:
        raise ValueError(f"empty interval ({t_start}, {t_end})")
    X = check_points(points)
    n = X.shape[0]
    if n and not (X[0, 0] >= t_start and X[-1, 0] < t_end):
        raise OutOfRangeError(
            f"points span [{X[0, 0]}, {X[-1, 0]}] outside batch [{t_start}, {t_end})"
        )
    if batch_index is None:
        batch_index = batch_index_of(t_start, t_end - t_start)

    chunk_size = math.ceil(n / config.passes) if n else 0
    bound = (math.ceil(n / config.passes) if n else 0) + config.n_v_pre
    if n == 0:
        segment = Segment(series_id, batch_index, t_start, t_end, None, None, 0, X, 0, ())
        return segment, MemoryStats((), bound)

    retained = X[:0]
    v_lo = v_hi = None
    diagonals: list[float] = []
    peaks: list[int] = []
    for lo in range(0, n, chunk_size):
        chunk = X[lo : lo + chunk_size]
        c_lo, c_hi = float(chunk[:, 1].min()), float(chunk[:, 1].max())
        v_lo = c_lo if v_lo is None else min(v_lo, c_lo)
        v_hi = c_hi if v_hi is None else max(v_hi, c_hi)
        grid = make_grid((t_start, t_end), (v_lo, v_hi), 1, config.n_v_pre)
        peaks.append(chunk.shape[0] + retained.shape[0])
        working = np.concatenate([retained, chunk]) if retained.shape[0] else chunk
        retained = rppf_filter(working, grid).retained
        diagonals.append(grid.diagonal)

    segment = Segment(
        series_id,
        batch_index,
        t_start,
        t_end,
        v_lo,
        v_hi,
        len(diagonals),
        retained,
        n,
        tuple(diagonals),
    )
    return segment, MemoryStats(tuple(peaks), bound)


class RawSource(Protocol):
    """Range-readable raw points, as handed out by the store."""

    series_id: str

    def extent(self) -> tuple[float, float] | None: ...

    def read(self, t_from: float, t_to: float) -> np.ndarray: ...


def preprocess_series(
    raw_source: RawSource,
    config: BatchConfig,
    sink: Callable[[Segment], None],
) -> PreprocessReport:
    """Run every aligned batch of the source's extent through ``run_batch``.

    Intervals with no points produce no segment. Sink failures propagate with
    the offending batch index attached.
    """
    report = PreprocessReport(bound_per_pass=config.n_v_pre)
    extent = raw_source.extent()
    if extent is None:
        return report
    t_min, t_max = extent
    pass_peaks = [0] * config.passes
    for t_start, t_end in plan_batches(t_min, np.nextafter(t_max, math.inf), config.t_pre):
        points = raw_source.read(t_start, t_end)
        report.batches += 1
        if points.shape[0] == 0:
            continue
        k = batch_index_of(t_start, config.t_pre)
        segment, mem = run_batch(points, (t_start, t_end), config, raw_source.series_id, k)
        try:
            sink(segment)
        except Exception as exc:
            raise RuntimeError(f"segment write failed for batch {k}") from exc
        report.raw_total += segment.raw_count
        report.retained_total += segment.retained.shape[0]
        report.segments_written += 1
        report.max_pass_peak = max(report.max_pass_peak, max(mem.per_pass_peak))
        report.bound_per_pass = max(report.bound_per_pass, mem.bound_per_pass)
        for i, peak in enumerate(mem.per_pass_peak):
            pass_peaks[i] = max(pass_peaks[i], peak)
        report.segment_bounds[k] = segment.distance_bound
    report.pass_peaks = tuple(pass_peaks)
    return report
