"""Acceptance suite: the release criteria, one test (and one printed line) each.

Heavy artifacts (the five 100k reference datasets, their preprocessed stores)
are built once per session and shared. Run with ``pytest tests/test_acceptance.py -v -s``
to see the per-criterion lines as they pass.
"""
import json
import math

import numpy as np
import pytest

from arppf import (
    BatchConfig,
    DATASET_KINDS,
    DatasetSpec,
    QueryEngine,
    QueryParams,
    SeriesStore,
    directed_hausdorff_brute,
    directed_hausdorff_grid,
    douglas_peucker,
    generate,
    hausdorff,
    make_grid,
    rppf_filter,
)
from arppf.cli import main as cli_main

from helpers import points_csv

SQRT2 = math.sqrt(2.0)
REL = 1 + 1e-9
N = 100_000
SEED = 42
REFERENCE_GRID = make_grid((0.0, 300.0), (0.0, 100.0), 300, 100)


def report(name: str, ok: bool, detail: str) -> None:
    print(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
    assert ok, f"{name}: {detail}"


@pytest.fixture(scope="module")
def datasets():
    return {kind: generate(DatasetSpec(kind, N, seed=SEED)) for kind in DATASET_KINDS}


@pytest.fixture(scope="module")
def prepared(datasets, tmp_path_factory):
    """Lazily built (kind, passes) -> store/engine/report bundles."""
    cache = {}

    def build(kind: str, passes: int):
        key = (kind, passes)
        if key not in cache:
            root = tmp_path_factory.mktemp(f"{kind}-p{passes}")
            store = SeriesStore(root)
            store.ingest_csv(kind, points_csv(datasets[kind]))
            rep = store.preprocess(kind, BatchConfig(t_pre=1.0, passes=passes, n_v_pre=100))
            cache[key] = {
                "store": store,
                "engine": QueryEngine(store),
                "report": rep,
            }
        return cache[key]

    return build


@pytest.fixture(scope="module")
def rppf_outputs(datasets):
    out = {}
    for kind, X in datasets.items():
        retained = rppf_filter(X, REFERENCE_GRID).retained
        out[kind] = (retained, directed_hausdorff_grid(X, retained, cell=1.0))
    return out


def full_extent_query(bundle, kind):
    return bundle["engine"].query(
        QueryParams(kind, 0.0, 300.0, n_t_target=300, n_v_target=100, mode="preprocessed")
    )


def test_rppf_diagonal_bound(rppf_outputs):
    worst = max(h for _, h in rppf_outputs.values())
    ok = all(h <= SQRT2 * REL for _, h in rppf_outputs.values())
    detail = ", ".join(f"{k}={h:.4f}" for k, (_, h) in rppf_outputs.items())
    report("rppf-diagonal-bound", ok and worst <= 1.41422 * REL, f"max h {worst:.5f} <= sqrt(2); {detail}")


def test_arppf_chained_bound(datasets, prepared):
    failures = []
    details = []
    for kind in DATASET_KINDS:
        X = datasets[kind]
        t = X[:, 0]
        for passes in (1, 5):
            bundle = prepared(kind, passes)
            for seg in bundle["store"].read_segments(kind, 0.0, 300.0):
                lo, hi = np.searchsorted(t, [seg.t_start, seg.t_end], side="left")
                h_batch = directed_hausdorff_brute(X[lo:hi], seg.retained)
                if h_batch > seg.distance_bound * REL:
                    failures.append(f"{kind}/p{passes} batch {seg.batch_index}")
            result = full_extent_query(bundle, kind)
            h_end = directed_hausdorff_grid(X, result.points, cell=1.0)
            if h_end > result.meta.distance_bound * REL:
                failures.append(f"{kind}/p{passes} end-to-end")
            details.append(f"{kind}/p{passes}: h={h_end:.3f}<=bound={result.meta.distance_bound:.3f}")
    report("arppf-chained-bound", not failures,
           "; ".join(details) if not failures else f"violations: {failures}")


def test_one_pass_equivalence(datasets, prepared):
    mismatches = 0
    batches = 0
    for kind in DATASET_KINDS:
        X = datasets[kind]
        t = X[:, 0]
        for seg in prepared(kind, 1)["store"].read_segments(kind, 0.0, 300.0):
            lo, hi = np.searchsorted(t, [seg.t_start, seg.t_end], side="left")
            grid = make_grid((seg.t_start, seg.t_end), (seg.v_min, seg.v_max), 1, 100)
            direct = rppf_filter(X[lo:hi], grid).retained
            batches += 1
            if not np.array_equal(seg.retained, direct):
                mismatches += 1
    report("one-pass-equivalence", mismatches == 0,
           f"{batches} batches across {len(DATASET_KINDS)} datasets, {mismatches} mismatches")


def test_fetch_reduction(prepared):
    fetched = {}
    for kind in DATASET_KINDS:
        bundle = prepared(kind, 1)
        result = full_extent_query(bundle, kind)
        fetched[kind] = result.meta.points_fetched
    ok = all(v <= 30_000 for v in fetched.values())
    report("fetch-reduction", ok,
           "points fetched (cap 30000): " + ", ".join(f"{k}={v}" for k, v in fetched.items()))


def test_per_pass_memory(prepared):
    peaks = {kind: prepared(kind, 5)["report"].max_pass_peak for kind in DATASET_KINDS}
    ok = all(p <= 167 for p in peaks.values())

    rng = np.random.default_rng(SEED)
    worked = np.column_stack([np.sort(rng.uniform(0, 1, 1800)), rng.uniform(0, 100, 1800)])
    from arppf import run_batch

    _, mem = run_batch(worked, (0, 1), BatchConfig(1.0, passes=6, n_v_pre=200))
    worked_ok = all(p <= 500 for p in mem.per_pass_peak) and max(mem.per_pass_peak) <= 0.28 * 1800
    report("per-pass-memory", ok and worked_ok,
           f"5-pass peaks (cap 167): {peaks}; 1800pt/6-pass peak {max(mem.per_pass_peak)} <= 500 (28% of 1800)")


def test_dp_failure_mode(datasets, rppf_outputs):
    X = datasets["linear"]
    dp_out = douglas_peucker(X, 1.4)
    h_dp = directed_hausdorff_grid(X, dp_out)
    two_points = dp_out.shape[0] == 2
    blows_up = h_dp > 10 * SQRT2
    rppf_fine = rppf_outputs["linear"][1] <= SQRT2 * REL

    monotone = {}
    for kind in DATASET_KINDS:
        Xk = datasets[kind]
        h_small = directed_hausdorff_grid(Xk, douglas_peucker(Xk, 0.7), cell=1.0)
        h_large = directed_hausdorff_grid(Xk, douglas_peucker(Xk, 1.4), cell=1.0)
        monotone[kind] = h_small <= h_large * REL
    ok = two_points and blows_up and rppf_fine and all(monotone.values())
    report("dp-failure-mode", ok,
           f"linear dp(1.4) -> {dp_out.shape[0]} pts, h={h_dp:.1f} (> {10 * SQRT2:.1f}); "
           f"rppf h={rppf_outputs['linear'][1]:.3f}; eps-monotone: {monotone}")


def test_hausdorff_oracle_equivalence():
    rng = np.random.default_rng(2024)
    mismatches = 0
    trials = 200
    for _ in range(trials):
        nx, ny = rng.integers(1, 500, size=2)
        span = 10.0 ** rng.uniform(-2, 3)
        X = rng.uniform(-span, span, size=(nx, 2))
        Y = rng.uniform(-span, span, size=(ny, 2))
        cell = 10.0 ** rng.uniform(-1.5, 1.5) * span / 10
        if directed_hausdorff_grid(X, Y, cell=cell) != directed_hausdorff_brute(X, Y):
            mismatches += 1
    report("hausdorff-oracle-equivalence", mismatches == 0,
           f"{trials} random instances (|X|,|Y|<=500), {mismatches} inequalities (exact compare)")


def test_relative_speedup(tmp_path_factory):
    work = tmp_path_factory.mktemp("bench")
    src = work / "uniform.csv"
    assert cli_main(["generate", "--dataset", "uniform", "--n", str(N), "--seed",
                     str(SEED), "--out", str(src)]) == 0
    out = work / "bench.json"
    assert cli_main(["bench", "--in", str(src), "--t-pre", "1", "--passes", "1",
                     "--v-buckets", "100", "--repeat", "11",
                     "--data-dir", str(work / "store"), "--out", str(out)]) == 0
    body = json.loads(out.read_text())
    faster = body["preprocessed_median_ms"] < body["raw_median_ms"]
    reduced = body["fetched_ratio"] <= 0.30
    report("relative-speedup", faster and reduced,
           f"raw {body['raw_median_ms']:.2f}ms vs preprocessed {body['preprocessed_median_ms']:.2f}ms "
           f"(speedup {body['speedup']:.2f}x), fetched ratio {body['fetched_ratio']:.3f} <= 0.30, "
           f"{body['repeat']} repeats")


def test_triangle_inequality_suite():
    rng = np.random.default_rng(99)
    tri_bad = 0
    for _ in range(100):
        sizes = rng.integers(1, 200, size=3)
        A, B, C = (rng.uniform(0, 100, size=(s, 2)) for s in sizes)
        if hausdorff(A, C) > hausdorff(A, B) + hausdorff(B, C) + 1e-9:
            tri_bad += 1

    pair_bad = 0
    for trial in range(40):
        n = int(rng.integers(50, 400))
        A = np.column_stack([np.sort(rng.uniform(0, 100, n)), rng.uniform(0, 50, n)])
        g1 = make_grid((0, 100), (0, 50), int(rng.integers(2, 40)), int(rng.integers(2, 40)))
        g2 = make_grid((0, 100), (0, 50), int(rng.integers(2, 40)), int(rng.integers(2, 40)))
        B = rppf_filter(A, g1).retained
        C = rppf_filter(A, g2).retained
        if hausdorff(B, C) > (g1.diagonal + g2.diagonal) * REL:
            pair_bad += 1
    report("triangle-inequality-suite", tri_bad == 0 and pair_bad == 0,
           f"100 random triples: {tri_bad} violations; "
           f"40 filtered-pair checks H(B,C) <= D_B + D_C: {pair_bad} violations")
