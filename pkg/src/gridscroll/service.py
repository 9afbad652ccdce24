"""HTTP surface: window/locate/release endpoints plus a JSON-lines event stream.

Wire conventions: key tuples travel as arrays of field values in schema
order, datetimes as ISO-8601 strings, doubles as JSON numbers; scrollbar
positions use the ``lambda`` name; ordinals, where exposed for diagnostics,
are decimal strings because they exceed 64-bit integers.
"""

from __future__ import annotations

import json
import threading
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse, StreamingResponse

from .config import AppConfig
from .dataset import KeySchema, Row, ingest_csv
from .engine import (
    MaxPositionChanged,
    ScrollEngine,
    start,
    ThumbCorrected,
    WindowChanged,
)
from .errors import GridScrollError, SchemaError


def rows_json(schema: KeySchema, rows) -> list[dict]:
    return [
        {
            "key": [schema.to_json_value(i, v) for i, v in enumerate(row.key)],
            "payload": list(row.payload),
        }
        for row in rows
    ]


def event_json(schema: KeySchema, event) -> dict:
    if isinstance(event, WindowChanged):
        return {
            "type": "window_changed",
            "lambda": event.position,
            "generation": event.generation,
            "rows": rows_json(schema, event.rows),
        }
    if isinstance(event, ThumbCorrected):
        return {
            "type": "thumb_corrected",
            "lambda": event.position,
            "generation": event.generation,
        }
    if isinstance(event, MaxPositionChanged):
        return {"type": "lambda_max_changed", "lambda_max": event.max_position}
    return {"type": type(event).__name__}


def create_app(config: AppConfig | None = None, engine: ScrollEngine | None = None) -> FastAPI:
    """Service over an existing engine, or over a dataset loaded on startup."""
    app = FastAPI(title="gridscroll")
    app.state.engine = engine
    app.state.load_error = None

    if engine is None:
        if config is None:
            raise ValueError("create_app needs a config or a ready engine")

        def load() -> None:
            try:
                schema = config.schema()
                table = ingest_csv(config.dataset, schema, slow_latency=config.slow_latency)
                app.state.engine = start(table, config.engine_config())
            except Exception as exc:  # surfaced as 503 detail
                app.state.load_error = str(exc)

        @app.on_event("startup")
        def schedule_load() -> None:
            threading.Thread(target=load, name="gridscroll-ingest", daemon=True).start()

    @app.on_event("shutdown")
    def shutdown() -> None:
        eng = app.state.engine
        if eng is not None:
            eng.close()

    def ready() -> ScrollEngine | JSONResponse:
        eng = app.state.engine
        if eng is None:
            detail = app.state.load_error or "ingestion in progress"
            return JSONResponse({"detail": detail}, status_code=503)
        return eng

    @app.get("/api/meta")
    def meta():
        eng = ready()
        if not isinstance(eng, ScrollEngine):
            return eng
        return {
            "lambda_max": eng.max_position,
            "lambda_max_exact": eng.max_position_exact,
            "h": eng.config.window_rows,
            "schema": {
                "key_fields": eng.schema.describe(),
                "payload_fields": list(eng.table.payload_names),
            },
        }

    @app.get("/api/window")
    def window(request: Request):
        eng = ready()
        if not isinstance(eng, ScrollEngine):
            return eng
        raw = request.query_params.get("lambda")
        if raw is None:
            return JSONResponse({"detail": "missing lambda parameter"}, status_code=400)
        try:
            position = int(raw)
        except ValueError:
            return JSONResponse({"detail": f"bad lambda {raw!r}"}, status_code=400)
        changed = eng.window_at(position)
        return {
            "rows": rows_json(eng.schema, changed.rows),
            "lambda": changed.position,
            "generation": changed.generation,
        }

    @app.post("/api/locate")
    async def locate(request: Request):
        eng = ready()
        if not isinstance(eng, ScrollEngine):
            return eng
        try:
            body = await request.json()
        except json.JSONDecodeError:
            return JSONResponse({"detail": "body must be JSON"}, status_code=400)
        if not isinstance(body, dict) or "keys" not in body:
            return JSONResponse({"detail": "body needs a 'keys' array"}, status_code=400)
        try:
            keys = eng.schema.parse_key_json(body["keys"])
            rows, estimate = eng.position_to(keys)
        except (SchemaError, GridScrollError) as exc:
            return JSONResponse({"detail": str(exc)}, status_code=400)
        return {
            "rows": rows_json(eng.schema, rows),
            "lambda_estimate": estimate,
            "generation": eng.generation,
        }

    @app.post("/api/release", status_code=202)
    def release():
        eng = ready()
        if not isinstance(eng, ScrollEngine):
            return eng
        return {"scheduled": eng.on_scroll_release()}

    @app.get("/api/events")
    def events(request: Request):
        eng = ready()
        if not isinstance(eng, ScrollEngine):
            return eng
        try:
            cursor = int(request.query_params.get("since", "0"))
        except ValueError:
            return JSONResponse({"detail": "bad since parameter"}, status_code=400)

        def stream(cursor: int):
            while True:
                batch = eng.wait_events(cursor, timeout=0.5)
                if batch:
                    for event in batch:
                        yield json.dumps(event_json(eng.schema, event)) + "\n"
                    cursor += len(batch)
                else:
                    yield "\n"  # heartbeat keeps proxies and clients alive

        return StreamingResponse(stream(cursor), media_type="application/x-ndjson")

    @app.get("/api/debug/points")
    def debug_points():
        eng = ready()
        if not isinstance(eng, ScrollEngine):
            return eng
        return {
            "points": [
                {"lambda": p, "kappa": str(o)} for p, o in eng.interpolation_points()
            ]
        }

    static_dir = Path(config.static_dir) if config is not None else None
    if static_dir is not None and static_dir.is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="ui")

    return app
