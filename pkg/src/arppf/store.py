"""Embedded file-backed store for raw series and preprocessed segments.

Layout, one directory per series under the store root:

    <series_id>/meta.json            counts, extent, preprocessing config
    <series_id>/raw.bin              little-endian float64 (t, v) records
    <series_id>/segments/b<k>.seg    one file per batch: JSON header line,
                                     then little-endian float64 point records
    <series_id>/segments.pack        derived read-combined copy of all
                                     segment files (rebuilt after
                                     preprocessing, dropped on any segment
                                     rewrite); purely a read optimization

Writes go through a per-series lock and land via write-to-temp-then-rename,
so a reader sees either the old or the new version of a file, never a torn
one. The raw log is append-only; readers trust meta.json's record count and
ignore any trailing partial record from an interrupted append.
"""
from __future__ import annotations

import csv
import io
import json
import math
import os
import re
import threading
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import (
    CsvFormatError,
    NoDataError,
    TimestampOrderError,
    UnknownSeriesError,
)
from .preprocess import BatchConfig, PreprocessReport, Segment, preprocess_series
from .validation import check_points

__all__ = ["SeriesCatalogEntry", "SeriesStore", "encode_segment", "decode_segment"]

_RECORD = np.dtype("<f8")
_RECORD_BYTES = 16  # two little-endian float64 per point
_SERIES_ID = re.compile(r"^[A-Za-z0-9][A-Za-z0-9._-]{0,127}$")
_PACK_MAGIC = b"ARPPF-PACK1\n"


@dataclass(frozen=True)
class SegmentSpan:
    """Aggregate view of all segments intersecting a range: the fetched
    points in time order plus the extent and bound a query needs."""

    points: np.ndarray
    v_min: float
    v_max: float
    max_bound: float
    segment_count: int


@dataclass(frozen=True)
class SeriesCatalogEntry:
    series_id: str
    raw_count: int
    t_min: float | None
    t_max: float | None
    preprocess_config: BatchConfig | None
    segment_count: int

    def to_dict(self) -> dict:
        cfg = self.preprocess_config
        return {
            "series_id": self.series_id,
            "raw_count": self.raw_count,
            "t_min": self.t_min,
            "t_max": self.t_max,
            "preprocess_config": None
            if cfg is None
            else {"t_pre": cfg.t_pre, "passes": cfg.passes, "n_v_pre": cfg.n_v_pre},
            "segment_count": self.segment_count,
        }


def encode_segment(segment: Segment) -> bytes:
    """Segment file image: one JSON header line, then raw point records."""
    header = {
        "series_id": segment.series_id,
        "batch_index": segment.batch_index,
        "t_start": segment.t_start,
        "t_end": segment.t_end,
        "v_min": segment.v_min,
        "v_max": segment.v_max,
        "passes_used": segment.passes_used,
        "pass_diagonals": list(segment.pass_diagonals),
        "raw_count": segment.raw_count,
    }
    body = np.ascontiguousarray(segment.retained, dtype=_RECORD).tobytes()
    return json.dumps(header, separators=(",", ":")).encode() + b"\n" + body


def decode_segment(data: bytes) -> Segment:
    nl = data.index(b"\n")
    header = json.loads(data[:nl])
    points = np.frombuffer(data[nl + 1 :], dtype=_RECORD).reshape(-1, 2).copy()
    return Segment(
        series_id=header["series_id"],
        batch_index=header["batch_index"],
        t_start=header["t_start"],
        t_end=header["t_end"],
        v_min=header["v_min"],
        v_max=header["v_max"],
        passes_used=header["passes_used"],
        retained=points,
        raw_count=header["raw_count"],
        pass_diagonals=tuple(header["pass_diagonals"]),
    )


def _atomic_write(path: Path, data: bytes) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_bytes(data)
    os.replace(tmp, path)


class SeriesStore:
    """Single-writer-per-series, multi-reader store rooted at a directory."""

    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._locks: dict[str, threading.Lock] = {}
        self._locks_guard = threading.Lock()

    # -- paths ---------------------------------------------------------

    def _dir(self, series_id: str) -> Path:
        if not _SERIES_ID.match(series_id):
            raise ValueError(f"invalid series id {series_id!r}")
        return self.root / series_id

    def _lock(self, series_id: str) -> threading.Lock:
        with self._locks_guard:
            return self._locks.setdefault(series_id, threading.Lock())

    def _meta(self, series_id: str) -> dict:
        path = self._dir(series_id) / "meta.json"
        if not path.exists():
            raise UnknownSeriesError(series_id)
        return json.loads(path.read_text())

    def _write_meta(self, series_id: str, meta: dict) -> None:
        _atomic_write(self._dir(series_id) / "meta.json", json.dumps(meta).encode())

    # -- raw ingestion and reads ----------------------------------------

    def ingest_csv(self, series_id: str, source) -> int:
        """Append ``t,v`` CSV rows to the series' raw log; returns row count.

        Rejects malformed rows, NaN/infinite samples, and timestamps that
        regress below the preceding row (or the stored tail), reporting the
        1-based row number (header is row 1).
        """
        if isinstance(source, bytes):
            source = io.BytesIO(source)
        elif isinstance(source, str):
            source = io.BytesIO(source.encode())
        try:
            text = io.TextIOWrapper(source, encoding="utf-8-sig", newline="")
            rows = csv.reader(text)
            header = next(rows, None)
        except UnicodeDecodeError as exc:
            raise CsvFormatError(f"not valid UTF-8: {exc}", row=1) from None
        if header is None or [c.strip() for c in header] != ["t", "v"]:
            raise CsvFormatError(f"expected header 't,v', got {header!r}", row=1)

        with self._lock(series_id):
            sdir = self._dir(series_id)
            sdir.mkdir(parents=True, exist_ok=True)
            meta_path = sdir / "meta.json"
            if meta_path.exists():
                meta = json.loads(meta_path.read_text())
            else:
                meta = {"series_id": series_id, "raw_count": 0, "t_min": None,
                        "t_max": None, "preprocess": None, "segment_count": 0}
            last_t = meta["t_max"] if meta["raw_count"] else -math.inf

            parsed: list[tuple[float, float]] = []
            try:
                for rownum, row in enumerate(rows, start=2):
                    if not row:
                        continue
                    if len(row) != 2:
                        raise CsvFormatError(f"expected 2 fields, got {len(row)}", row=rownum)
                    try:
                        t, v = float(row[0]), float(row[1])
                    except ValueError:
                        raise CsvFormatError(f"not a number: {row!r}", row=rownum) from None
                    if not (math.isfinite(t) and math.isfinite(v)):
                        raise CsvFormatError(f"non-finite sample: {row!r}", row=rownum)
                    if t < last_t:
                        raise TimestampOrderError(
                            f"timestamp {t} regresses below {last_t}", row=rownum
                        )
                    last_t = t
                    parsed.append((t, v))
            except csv.Error as exc:
                raise CsvFormatError(str(exc), row=text.line_num) from None

            if not parsed:
                if not meta_path.exists():
                    self._write_meta(series_id, meta)
                return 0

            blob = np.asarray(parsed, dtype=_RECORD).tobytes()
            raw_path = sdir / "raw.bin"
            offset = meta["raw_count"] * _RECORD_BYTES
            mode = "r+b" if raw_path.exists() else "wb"
            with open(raw_path, mode) as f:
                f.seek(offset)
                f.write(blob)
                f.truncate()
                f.flush()
            meta["t_min"] = parsed[0][0] if meta["raw_count"] == 0 else meta["t_min"]
            meta["t_max"] = parsed[-1][0]
            meta["raw_count"] += len(parsed)
            self._write_meta(series_id, meta)
            return len(parsed)

    def read_raw(self, series_id: str, t_from: float, t_to: float) -> np.ndarray:
        """All raw points with t in ``[t_from, t_to)``, time-ordered."""
        if not t_to > t_from:
            raise ValueError(f"need t_to > t_from, got ({t_from}, {t_to})")
        meta = self._meta(series_id)
        points = self._read_raw_all(series_id, meta)
        lo, hi = np.searchsorted(points[:, 0], [t_from, t_to], side="left")
        return points[lo:hi]

    def _read_raw_all(self, series_id: str, meta: dict) -> np.ndarray:
        count = meta["raw_count"]
        if count == 0:
            return np.empty((0, 2))
        raw = np.fromfile(self._dir(series_id) / "raw.bin", dtype=_RECORD, count=2 * count)
        return raw.reshape(-1, 2)

    # -- segments --------------------------------------------------------

    def write_segment(self, segment: Segment) -> None:
        """Durably record a segment; same (series, batch) replaces atomically."""
        check_points(segment.retained)
        with self._lock(segment.series_id):
            meta = self._meta(segment.series_id)
            fresh = self._write_segment_locked(segment)
            self._drop_pack(segment.series_id)
            if fresh:
                meta["segment_count"] = meta.get("segment_count", 0) + 1
                self._write_meta(segment.series_id, meta)

    def _write_segment_locked(self, segment: Segment) -> bool:
        seg_dir = self._dir(segment.series_id) / "segments"
        seg_dir.mkdir(parents=True, exist_ok=True)
        path = seg_dir / f"b{segment.batch_index}.seg"
        fresh = not path.exists()
        _atomic_write(path, encode_segment(segment))
        return fresh

    def _drop_pack(self, series_id: str) -> None:
        pack = self._dir(series_id) / "segments.pack"
        if pack.exists():
            pack.unlink()

    def _segment_files(self, series_id: str) -> list[Path]:
        seg_dir = self._dir(series_id) / "segments"
        if not seg_dir.is_dir():
            return []
        return list(seg_dir.glob("b*.seg"))

    def read_segments(self, series_id: str, t_from: float, t_to: float) -> list[Segment]:
        """Segments whose interval intersects ``[t_from, t_to)``, by t_start."""
        if not t_to > t_from:
            raise ValueError(f"need t_to > t_from, got ({t_from}, {t_to})")
        self._meta(series_id)
        pack = self._dir(series_id) / "segments.pack"
        if pack.exists():
            segments = self._read_pack(series_id, pack)
        else:
            segments = [decode_segment(p.read_bytes()) for p in self._segment_files(series_id)]
            segments.sort(key=lambda s: s.t_start)
        return [s for s in segments if s.t_start < t_to and s.t_end > t_from]

    def read_segment_span(self, series_id: str, t_from: float, t_to: float) -> SegmentSpan | None:
        """Aggregate of the segments intersecting ``[t_from, t_to)``.

        Equivalent to concatenating ``read_segments`` output, but served as a
        single contiguous slice of the pack when one is present; this is the
        query engine's hot path. Returns None when nothing intersects or
        every intersecting segment is empty.
        """
        if not t_to > t_from:
            raise ValueError(f"need t_to > t_from, got ({t_from}, {t_to})")
        self._meta(series_id)
        pack = self._dir(series_id) / "segments.pack"
        if not pack.exists():
            segments = [s for s in self.read_segments(series_id, t_from, t_to)
                        if s.retained.shape[0]]
            if not segments:
                return None
            return SegmentSpan(
                points=np.concatenate([s.retained for s in segments]),
                v_min=min(s.v_min for s in segments),
                v_max=max(s.v_max for s in segments),
                max_bound=max(s.distance_bound for s in segments),
                segment_count=len(segments),
            )
        toc, diags, points = self._load_pack(series_id, pack)
        # Batches are disjoint and sorted by t_start, so both interval
        # columns are monotone and the intersecting rows form one run.
        first = int(np.searchsorted(toc[:, 2], t_from, side="right"))
        last = int(np.searchsorted(toc[:, 1], t_to, side="left"))
        if first >= last:
            return None
        n_points = toc[:, 7].astype(np.int64)
        live = n_points[first:last] > 0
        if not live.any():
            return None
        p_off = np.concatenate([[0], np.cumsum(n_points)])
        d_counts = toc[:, 8].astype(np.int64)
        d_end = np.cumsum(d_counts)
        d_csum = np.concatenate([[0.0], np.cumsum(diags)])
        bounds = (d_csum[d_end] - d_csum[d_end - d_counts])[first:last]
        return SegmentSpan(
            points=points[p_off[first] : p_off[last]],
            v_min=float(toc[first:last, 3][live].min()),
            v_max=float(toc[first:last, 4][live].max()),
            max_bound=float(bounds[live].max()),
            segment_count=int(live.sum()),
        )

    # -- consolidated pack (read-path optimization) -----------------------

    def finalize_segments(self, series_id: str) -> None:
        """Rebuild the combined pack from the per-batch segment files."""
        with self._lock(series_id):
            files = self._segment_files(series_id)
            segments = [decode_segment(p.read_bytes()) for p in files]
            segments.sort(key=lambda s: s.t_start)
            if not segments:
                self._drop_pack(series_id)
                return
            toc = np.empty((len(segments), 9))
            diags: list[float] = []
            blobs: list[np.ndarray] = []
            for i, s in enumerate(segments):
                toc[i] = (
                    s.batch_index,
                    s.t_start,
                    s.t_end,
                    math.nan if s.v_min is None else s.v_min,
                    math.nan if s.v_max is None else s.v_max,
                    s.passes_used,
                    s.raw_count,
                    s.retained.shape[0],
                    len(s.pass_diagonals),
                )
                diags.extend(s.pass_diagonals)
                blobs.append(s.retained)
            header = json.dumps({"n": len(segments), "n_diags": len(diags)}).encode()
            parts = [
                _PACK_MAGIC,
                header,
                b"\n",
                toc.astype(_RECORD).tobytes(),
                np.asarray(diags, dtype=_RECORD).tobytes(),
                np.concatenate(blobs).astype(_RECORD).tobytes(),
            ]
            _atomic_write(self._dir(series_id) / "segments.pack", b"".join(parts))

    def _load_pack(self, series_id: str, pack: Path):
        data = pack.read_bytes()
        if not data.startswith(_PACK_MAGIC):
            raise ValueError(f"corrupt segment pack for {series_id!r}")
        nl = data.index(b"\n", len(_PACK_MAGIC))
        header = json.loads(data[len(_PACK_MAGIC) : nl])
        n, n_diags = header["n"], header["n_diags"]
        body = np.frombuffer(data, dtype=_RECORD, offset=nl + 1)
        toc = body[: n * 9].reshape(n, 9)
        diags = body[n * 9 : n * 9 + n_diags]
        points = body[n * 9 + n_diags :].reshape(-1, 2)
        return toc, diags, points

    def _read_pack(self, series_id: str, pack: Path) -> list[Segment]:
        toc_arr, diags_arr, points = self._load_pack(series_id, pack)
        toc = toc_arr.tolist()
        diags = diags_arr.tolist()
        segments = []
        d_off = p_off = 0
        for row in toc:
            n_pts, n_d = int(row[7]), int(row[8])
            segments.append(
                Segment(
                    series_id=series_id,
                    batch_index=int(row[0]),
                    t_start=row[1],
                    t_end=row[2],
                    v_min=None if math.isnan(row[3]) else row[3],
                    v_max=None if math.isnan(row[4]) else row[4],
                    passes_used=int(row[5]),
                    retained=points[p_off : p_off + n_pts],
                    raw_count=int(row[6]),
                    pass_diagonals=tuple(diags[d_off : d_off + n_d]),
                )
            )
            d_off += n_d
            p_off += n_pts
        return segments

    # -- catalog -----------------------------------------------------------

    def catalog_entry(self, series_id: str) -> SeriesCatalogEntry:
        meta = self._meta(series_id)
        cfg = meta.get("preprocess")
        return SeriesCatalogEntry(
            series_id=meta["series_id"],
            raw_count=meta["raw_count"],
            t_min=meta["t_min"],
            t_max=meta["t_max"],
            preprocess_config=None if cfg is None else BatchConfig(**cfg),
            segment_count=meta.get("segment_count", 0),
        )

    def list_series(self) -> list[SeriesCatalogEntry]:
        entries = []
        for child in sorted(self.root.iterdir()) if self.root.is_dir() else []:
            if child.is_dir() and (child / "meta.json").exists():
                entries.append(self.catalog_entry(child.name))
        return entries

    # -- preprocessing glue -------------------------------------------------

    def raw_source(self, series_id: str):
        return _StoreRawSource(self, series_id)

    def preprocess(self, series_id: str, config: BatchConfig) -> PreprocessReport:
        """Replace the series' segments with a fresh run under ``config``."""
        meta = self._meta(series_id)
        if meta["raw_count"] == 0:
            raise NoDataError(f"series {series_id!r} has no raw points")
        with self._lock(series_id):
            for stale in self._segment_files(series_id):
                stale.unlink()
            self._drop_pack(series_id)
            report = preprocess_series(
                self.raw_source(series_id), config, self._write_segment_locked
            )
            meta["preprocess"] = {
                "t_pre": config.t_pre,
                "passes": config.passes,
                "n_v_pre": config.n_v_pre,
            }
            meta["segment_count"] = report.segments_written
            self._write_meta(series_id, meta)
        self.finalize_segments(series_id)
        return report


class _StoreRawSource:
    def __init__(self, store: SeriesStore, series_id: str):
        self._store = store
        self.series_id = series_id

    def extent(self) -> tuple[float, float] | None:
        meta = self._store._meta(self.series_id)
        if meta["raw_count"] == 0:
            return None
        return meta["t_min"], meta["t_max"]

    def read(self, t_from: float, t_to: float) -> np.ndarray:
        return self._store.read_raw(self.series_id, t_from, t_to)
