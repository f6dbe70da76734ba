"""Exception types shared across the package."""


class GridError(ValueError):
    """Invalid bucket-grid geometry (bad range or bucket count)."""


class OutOfRangeError(ValueError):
    """A point falls outside the grid it is being bucketed against."""


class EmptySetError(ValueError):
    """A set-distance was requested for an empty point set."""


class CsvFormatError(ValueError):
    """Malformed CSV during ingestion. ``row`` is 1-based and counts the header."""

    def __init__(self, message: str, row: int):
        super().__init__(f"row {row}: {message}")
        self.row = row


class TimestampOrderError(ValueError):
    """An ingested timestamp regressed below the preceding one."""

    def __init__(self, message: str, row: int):
        super().__init__(f"row {row}: {message}")
        self.row = row


class UnknownSeriesError(KeyError):
    """Lookup of a series id the store has never seen."""


class NoSegmentsError(RuntimeError):
    """Preprocessed-path query on a series with no stored segments."""


class NoDataError(RuntimeError):
    """Operation requires raw points but the series is empty."""
