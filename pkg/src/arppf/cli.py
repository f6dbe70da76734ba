"""Command-line harness: dataset generation, filtering, experiments, benchmarks, serving.

Exit codes: 0 success, 1 measured value exceeded its theoretical bound,
2 usage error.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import os
import statistics
import sys
import tempfile
import time
from pathlib import Path

import numpy as np

from .datasets import DATASET_KINDS, DatasetSpec, generate
from .errors import CsvFormatError
from .filters import douglas_peucker, rppf_filter
from .grid import make_grid
from .metrics import directed_hausdorff_grid
from .preprocess import BatchConfig, plan_batches, run_batch
from .query import QueryEngine, QueryParams
from .store import SeriesStore

# The display convention of the reference experiments: a 300 x 100 grid of
# unit buckets, values in [0, 100], bucket diagonal sqrt(2).
REFERENCE_GRID = ((0.0, 300.0), (0.0, 100.0), 300, 100)
SQRT2 = math.sqrt(2.0)


def write_csv_points(path: Path, points: np.ndarray) -> None:
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["t", "v"])
        w.writerows([repr(t), repr(v)] for t, v in points.tolist())


def load_csv_points(path: Path) -> np.ndarray:
    with open(path, newline="") as f:
        rows = csv.reader(f)
        header = next(rows, None)
        if header is None or [c.strip() for c in header] != ["t", "v"]:
            raise CsvFormatError(f"expected header 't,v', got {header!r}", row=1)
        out = []
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
            out.append((t, v))
    return np.asarray(out, dtype=np.float64) if out else np.empty((0, 2))


def _dp_distance_bound(simplified: np.ndarray, epsilon: float) -> float:
    # Every dropped point sits within epsilon of its bracketing final chord,
    # and within half that chord's length of the nearer endpoint.
    if simplified.shape[0] < 2:
        return epsilon
    d = np.diff(simplified, axis=0)
    longest = float(np.hypot(d[:, 0], d[:, 1]).max())
    return longest / 2.0 + epsilon


def _arppf_pipeline(points: np.ndarray, config: BatchConfig):
    """In-memory two-tier run: batch preprocessing, then the final target filter.

    Returns (final points, end-to-end bound, fetched count, per-pass peak
    maxima, per-batch stats).
    """
    t = points[:, 0]
    segments = []
    pass_peaks = [0] * config.passes
    for t_start, t_end in plan_batches(t[0], np.nextafter(t[-1], math.inf), config.t_pre):
        lo, hi = np.searchsorted(t, [t_start, t_end], side="left")
        if lo == hi:
            continue
        seg, mem = run_batch(points[lo:hi], (t_start, t_end), config)
        segments.append(seg)
        for i, peak in enumerate(mem.per_pass_peak):
            pass_peaks[i] = max(pass_peaks[i], peak)
    fetched = np.concatenate([s.retained for s in segments])
    target = make_grid(*REFERENCE_GRID)
    final = rppf_filter(fetched, target).retained
    bound = max(s.distance_bound for s in segments) + target.diagonal
    return final, bound, int(fetched.shape[0]), pass_peaks, segments


def cmd_generate(args) -> int:
    spec = DatasetSpec(args.dataset, args.n, args.seed, args.t_extent)
    points = generate(spec)
    out = Path(args.out)
    write_csv_points(out, points)
    out.with_suffix(out.suffix + ".meta.json").write_text(json.dumps(spec.metadata()))
    print(f"wrote {points.shape[0]} points to {out}")
    return 0


def cmd_filter(args) -> int:
    points = load_csv_points(Path(args.infile))
    if args.algo == "dp":
        simplified = douglas_peucker(points, args.epsilon)
        bound = _dp_distance_bound(simplified, args.epsilon)
    else:
        n_t, n_v = args.grid
        grid = make_grid(
            (points[:, 0].min(), points[:, 0].max()),
            (points[:, 1].min(), points[:, 1].max()),
            n_t,
            n_v,
        )
        simplified = rppf_filter(points, grid).retained
        bound = grid.diagonal
    measured = directed_hausdorff_grid(points, simplified)
    write_csv_points(Path(args.out), simplified)
    report = {
        "algo": args.algo,
        "input_count": int(points.shape[0]),
        "output_count": int(simplified.shape[0]),
        "hausdorff": measured,
        "bound": bound,
    }
    if args.report:
        Path(args.report).write_text(json.dumps(report, indent=2))
    print(json.dumps(report))
    return 1 if measured > bound * (1 + 1e-9) else 0


def cmd_evaluate(args) -> int:
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    target = make_grid(*REFERENCE_GRID)

    distance_rows = []  # dataset, algorithm, points_out, hausdorff, bound
    fetch_rows = []  # dataset, algorithm, points_fetched, raw_count
    memory_rows = []  # dataset, passes, pass, peak, bound
    violations = []

    for kind in DATASET_KINDS:
        points = generate(DatasetSpec(kind, args.n, args.seed))
        raw_count = int(points.shape[0])

        def record(algorithm: str, output: np.ndarray, bound: float, fetched: int):
            measured = directed_hausdorff_grid(points, output, cell=1.0)
            distance_rows.append((kind, algorithm, int(output.shape[0]), measured, bound))
            fetch_rows.append((kind, algorithm, fetched, raw_count))
            if measured > bound * (1 + 1e-9):
                violations.append(f"{kind}/{algorithm}: {measured} > {bound}")

        for eps in (1.4, 0.7):
            simplified = douglas_peucker(points, eps)
            record(f"dp_eps_{eps}", simplified, _dp_distance_bound(simplified, eps), raw_count)

        record("rppf", rppf_filter(points, target).retained, target.diagonal, raw_count)

        for passes in (1, 5):
            config = BatchConfig(t_pre=1.0, passes=passes, n_v_pre=100)
            final, bound, fetched, peaks, segments = _arppf_pipeline(points, config)
            record(f"arppf_pass{passes}", final, bound, fetched)
            per_pass_bound = max(
                math.ceil(s.raw_count / passes) for s in segments
            ) + config.n_v_pre
            for i, peak in enumerate(peaks, start=1):
                memory_rows.append((kind, passes, i, peak, per_pass_bound))
                if peak > per_pass_bound:
                    violations.append(f"{kind}/pass{passes}[{i}]: {peak} > {per_pass_bound}")

    _write_table(out_dir / "distance.csv",
                 ["dataset", "algorithm", "points_out", "hausdorff", "bound"], distance_rows)
    _write_table(out_dir / "fetch.csv",
                 ["dataset", "algorithm", "points_fetched", "raw_count"], fetch_rows)
    _write_table(out_dir / "memory.csv",
                 ["dataset", "passes", "pass", "peak", "bound"], memory_rows)
    rollup = {
        "n": args.n,
        "seed": args.seed,
        "grid": {"n_t": 300, "n_v": 100, "diagonal": target.diagonal},
        "distance": [dict(zip(["dataset", "algorithm", "points_out", "hausdorff", "bound"], r))
                     for r in distance_rows],
        "fetch": [dict(zip(["dataset", "algorithm", "points_fetched", "raw_count"], r))
                  for r in fetch_rows],
        "memory": [dict(zip(["dataset", "passes", "pass", "peak", "bound"], r))
                   for r in memory_rows],
        "violations": violations,
    }
    (out_dir / "report.json").write_text(json.dumps(rollup, indent=2))
    print(f"evaluate: {len(distance_rows)} distance rows, "
          f"{len(violations)} bound violations -> {out_dir}")
    for v in violations:
        print(f"VIOLATION {v}", file=sys.stderr)
    return 1 if violations else 0


def _write_table(path: Path, header: list[str], rows) -> None:
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(header)
        w.writerows(rows)


def cmd_bench(args) -> int:
    points = load_csv_points(Path(args.infile))
    if points.shape[0] == 0:
        print("bench: input CSV is empty", file=sys.stderr)
        return 2
    data_dir = args.data_dir or tempfile.mkdtemp(prefix="arppf-bench-")
    store = SeriesStore(data_dir)
    series_id = "bench"
    store.ingest_csv(
        series_id,
        "t,v\n" + "\n".join(f"{t!r},{v!r}" for t, v in points.tolist()) + "\n",
    )
    config = BatchConfig(t_pre=args.t_pre, passes=args.passes, n_v_pre=args.v_buckets)
    store.preprocess(series_id, config)

    engine = QueryEngine(store)
    entry = store.catalog_entry(series_id)
    full = QueryParams(series_id, entry.t_min, np.nextafter(entry.t_max, math.inf),
                       mode="preprocessed")
    pre_plan = engine.resolve(full)
    raw_plan = engine.resolve(
        QueryParams(series_id, *pre_plan.aligned_range, mode="raw")
    )

    # interleaved so cache and load drift hit both paths alike
    raw_samples: list[float] = []
    pre_samples: list[float] = []
    raw_result = pre_result = None
    for _ in range(args.repeat):
        t0 = time.perf_counter()
        raw_result = engine.execute(raw_plan)
        raw_samples.append(time.perf_counter() - t0)
        t0 = time.perf_counter()
        pre_result = engine.execute(pre_plan)
        pre_samples.append(time.perf_counter() - t0)
    raw_ms = statistics.median(raw_samples) * 1e3
    pre_ms = statistics.median(pre_samples) * 1e3
    report = {
        "repeat": args.repeat,
        "raw_median_ms": raw_ms,
        "preprocessed_median_ms": pre_ms,
        "speedup": raw_ms / pre_ms if pre_ms else math.inf,
        "raw_points_fetched": raw_result.meta.points_fetched,
        "preprocessed_points_fetched": pre_result.meta.points_fetched,
        "fetched_ratio": pre_result.meta.points_fetched / raw_result.meta.points_fetched,
        "raw_distance_bound": raw_result.meta.distance_bound,
        "preprocessed_distance_bound": pre_result.meta.distance_bound,
        "data_dir": str(data_dir),
    }
    if args.out:
        Path(args.out).write_text(json.dumps(report, indent=2))
    print(json.dumps(report, indent=2))
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    store = SeriesStore(args.data_dir)
    app = create_app(store, ui_dir=args.ui_dir)
    uvicorn.run(app, host=args.addr, port=args.port, log_level="warning")
    return 0


def _grid_spec(text: str) -> tuple[int, int]:
    try:
        w, h = text.lower().split("x")
        return int(w), int(h)
    except ValueError:
        raise argparse.ArgumentTypeError(f"grid must look like 300x100, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="arppf")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write a synthetic dataset as CSV")
    p.add_argument("--dataset", required=True, choices=DATASET_KINDS)
    p.add_argument("--n", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--t-extent", type=float, default=300.0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("filter", help="apply a simplification algorithm to a CSV")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--grid", type=_grid_spec, default=(300, 100), metavar="WxH")
    p.add_argument("--algo", required=True, choices=["rppf", "dp"])
    p.add_argument("--epsilon", type=float)
    p.add_argument("--out", required=True)
    p.add_argument("--report")
    p.set_defaults(func=cmd_filter)

    p = sub.add_parser("evaluate", help="run the full dataset x algorithm comparison")
    p.add_argument("--reproduce-paper", action="store_true",
                   help="run the reference experiment matrix")
    p.add_argument("--n", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("bench", help="time raw-path vs preprocessed-path queries")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--t-pre", type=float, required=True)
    p.add_argument("--passes", type=int, default=1)
    p.add_argument("--v-buckets", type=int, default=100)
    p.add_argument("--repeat", type=int, default=10)
    p.add_argument("--data-dir")
    p.add_argument("--out")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--addr", default=os.environ.get("ARPPF_ADDR", "127.0.0.1"))
    p.add_argument("--port", type=int, default=int(os.environ.get("ARPPF_PORT", "8237")))
    p.add_argument("--data-dir", required=True)
    p.add_argument("--ui-dir")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "filter" and args.algo == "dp" and args.epsilon is None:
        parser.error("--algo dp requires --epsilon")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
