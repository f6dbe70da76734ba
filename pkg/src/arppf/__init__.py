"""Pixel-bucket preemption filtering for time-series charting backends.

Core pieces: bounded-error downsampling filters (:func:`rppf_filter`,
:func:`douglas_peucker`, plus scikit-learn transformer wrappers), exact
Hausdorff distance metrics, a memory-bounded batch preprocessor, an embedded
segment store, and a two-tier query engine. The ``arppf`` CLI drives dataset
generation, experiments, benchmarks, and the HTTP service.
"""

from .datasets import DATASET_KINDS, DatasetSpec, generate
from .errors import (
    CsvFormatError,
    EmptySetError,
    GridError,
    NoDataError,
    NoSegmentsError,
    OutOfRangeError,
    TimestampOrderError,
    UnknownSeriesError,
)
from .filters import (
    DouglasPeucker,
    FilterResult,
    RppfFilter,
    douglas_peucker,
    point_segment_distance,
    rppf_filter,
)
from .grid import BucketGrid, bucket_index, make_grid
from .metrics import (
    UNIT_SCALE,
    AxisScale,
    chained_bound,
    directed_hausdorff_brute,
    directed_hausdorff_grid,
    hausdorff,
)
from .preprocess import (
    BatchConfig,
    MemoryStats,
    PreprocessReport,
    Segment,
    plan_batches,
    preprocess_series,
    run_batch,
)
from .query import QueryEngine, QueryParams, QueryPlan, QueryResult
from .store import SeriesCatalogEntry, SeriesStore

__version__ = "0.1.0"

__all__ = [
    "AxisScale",
    "BatchConfig",
    "BucketGrid",
    "CsvFormatError",
    "DATASET_KINDS",
    "DatasetSpec",
    "DouglasPeucker",
    "EmptySetError",
    "FilterResult",
    "GridError",
    "MemoryStats",
    "NoDataError",
    "NoSegmentsError",
    "OutOfRangeError",
    "PreprocessReport",
    "QueryEngine",
    "QueryParams",
    "QueryPlan",
    "QueryResult",
    "RppfFilter",
    "Segment",
    "SeriesCatalogEntry",
    "SeriesStore",
    "TimestampOrderError",
    "UNIT_SCALE",
    "UnknownSeriesError",
    "bucket_index",
    "chained_bound",
    "directed_hausdorff_brute",
    "directed_hausdorff_grid",
    "douglas_peucker",
    "generate",
    "hausdorff",
    "make_grid",
    "plan_batches",
    "point_segment_distance",
    "preprocess_series",
    "rppf_filter",
    "run_batch",
    "__version__",
]
