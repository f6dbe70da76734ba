"""HTTP front-end: ingestion, preprocessing, and range queries over a store.

Responses follow the JSON shapes published in ``schemas/api.schema.json``;
errors always carry a machine-readable ``code`` plus ``message``. The app
serves the explorer UI as static files when pointed at a built bundle.
"""
from __future__ import annotations

from pathlib import Path

from fastapi import FastAPI, Query, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel
from starlette.concurrency import run_in_threadpool

from .errors import (
    CsvFormatError,
    NoDataError,
    NoSegmentsError,
    TimestampOrderError,
    UnknownSeriesError,
)
from .preprocess import BatchConfig
from .query import QueryEngine, QueryParams
from .store import SeriesStore

__all__ = ["create_app"]


class PreprocessRequest(BaseModel):
    t_pre: float
    passes: int = 1
    n_v: int = 100


def _error(status: int, code: str, message: str, detail=None) -> JSONResponse:
    body = {"code": code, "message": message}
    if detail is not None:
        body["detail"] = detail
    return JSONResponse(body, status_code=status)


def create_app(store: SeriesStore, ui_dir: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="arppf", version="0.1.0")
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )
    engine = QueryEngine(store)

    @app.exception_handler(UnknownSeriesError)
    async def _unknown(request: Request, exc: UnknownSeriesError):
        return _error(404, "unknown-series", f"no such series: {exc.args[0]}")

    @app.exception_handler(CsvFormatError)
    async def _malformed(request: Request, exc: CsvFormatError):
        return _error(400, "malformed-csv", str(exc), detail={"row": exc.row})

    @app.exception_handler(TimestampOrderError)
    async def _order(request: Request, exc: TimestampOrderError):
        return _error(409, "out-of-order", str(exc), detail={"row": exc.row})

    @app.exception_handler(NoSegmentsError)
    async def _no_segments(request: Request, exc: NoSegmentsError):
        return _error(409, "no-segments", str(exc))

    @app.exception_handler(NoDataError)
    async def _no_data(request: Request, exc: NoDataError):
        return _error(404, "no-data", str(exc))

    @app.exception_handler(ValueError)
    async def _invalid(request: Request, exc: ValueError):
        return _error(422, "invalid-params", str(exc))

    @app.get("/api/series")
    async def list_series() -> list[dict]:
        entries = await run_in_threadpool(store.list_series)
        return [e.to_dict() for e in entries]

    @app.post("/api/series/{series_id}/ingest")
    async def ingest(series_id: str, request: Request) -> dict:
        body = await request.body()
        count = await run_in_threadpool(store.ingest_csv, series_id, body)
        return {"ingested": count}

    @app.post("/api/series/{series_id}/preprocess")
    async def preprocess(series_id: str, req: PreprocessRequest) -> dict:
        config = BatchConfig(t_pre=req.t_pre, passes=req.passes, n_v_pre=req.n_v)
        report = await run_in_threadpool(store.preprocess, series_id, config)
        return report.to_dict()

    @app.get("/api/series/{series_id}/points")
    async def points(
        series_id: str,
        t_from: float = Query(alias="from"),
        t_to: float = Query(alias="to"),
        buckets_t: int = 300,
        buckets_v: int = 100,
        mode: str = "auto",
    ) -> dict:
        params = QueryParams(
            series_id=series_id,
            t_from=t_from,
            t_to=t_to,
            n_t_target=buckets_t,
            n_v_target=buckets_v,
            mode=mode,
        )
        result = await run_in_threadpool(engine.query, params)
        return result.to_dict()

    if ui_dir is not None and Path(ui_dir).is_dir():
        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app
