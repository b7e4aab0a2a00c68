"""HTTP surface for rewriting and scoring: /v1/rewrite, /v1/score, /healthz."""

from __future__ import annotations

import json
import logging
import time
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from mi_rewrite.config import PipelineConfig
from mi_rewrite.models.train_utils import seed_all
from mi_rewrite.pipeline import RewritePipeline

log = logging.getLogger(__name__)


def _error(status: int, code: str, message: str, field: str | None = None) -> JSONResponse:
    body: dict = {"code": code, "message": message}
    if field is not None:
        body["field"] = field
    return JSONResponse(status_code=status, content=body)


async def _parse_pair(request: Request):
    """Returns (prompt, response, options) or an error response."""
    try:
        data = json.loads(await request.body())
    except json.JSONDecodeError:
        return _error(400, "malformed", "request body is not valid JSON")
    if not isinstance(data, dict):
        return _error(400, "malformed", "request body must be a JSON object")
    out = []
    for field in ("prompt", "response"):
        value = data.get(field)
        if not isinstance(value, str):
            return _error(400, "malformed", f"{field} must be a string", field=field)
        if not value.strip():
            return _error(422, "empty_field", f"{field} must be non-empty", field=field)
        out.append(value)
    options = data.get("options", {})
    if not isinstance(options, dict):
        return _error(400, "malformed", "options must be an object", field="options")
    return out[0], out[1], options


def create_app(config: str | Path | PipelineConfig | None = None, pipeline=None) -> FastAPI:
    """App factory; a missing or unloadable pipeline serves 503s, not crashes."""
    app = FastAPI()
    app.state.pipeline = pipeline
    app.state.config = None
    app.state.load_error = None

    if pipeline is None and config is not None:
        try:
            cfg = config if isinstance(config, PipelineConfig) else PipelineConfig.load(config)
            app.state.config = cfg
            app.state.pipeline = RewritePipeline.from_config(cfg)
        except (OSError, ValueError) as exc:
            app.state.load_error = str(exc)
            log.warning("models not loaded: %s", exc)

    def _seed_for(options: dict) -> int:
        if "seed" in options:
            return int(options["seed"])
        if app.state.config is not None:
            return app.state.config.seed
        return 0

    @app.get("/healthz")
    async def healthz():
        pipe = app.state.pipeline
        return {
            "status": "ok",
            "models": {
                "discriminator": pipe is not None,
                "scorer": pipe is not None,
                "generator": pipe is not None,
            },
        }

    @app.post("/v1/rewrite")
    async def rewrite(request: Request):
        parsed = await _parse_pair(request)
        if isinstance(parsed, JSONResponse):
            return parsed
        prompt, response, options = parsed
        if app.state.pipeline is None:
            return _error(503, "models_not_loaded", "no pipeline is loaded")
        try:
            seed_all(_seed_for(options))
        except (TypeError, ValueError):
            return _error(400, "malformed", "options.seed must be an integer", field="options")
        started = time.perf_counter()
        result = app.state.pipeline.rewrite(prompt, response)
        log.info("rewrite took %.3fs", time.perf_counter() - started)
        return {"result": result.to_json()}

    @app.post("/v1/score")
    async def score(request: Request):
        parsed = await _parse_pair(request)
        if isinstance(parsed, JSONResponse):
            return parsed
        prompt, response, _ = parsed
        if app.state.pipeline is None:
            return _error(503, "models_not_loaded", "no pipeline is loaded")
        started = time.perf_counter()
        prediction = app.state.pipeline.classify(prompt, response)
        value = app.state.pipeline.score(prompt, response)
        log.info("score took %.3fs", time.perf_counter() - started)
        body = prediction.to_json()
        body["score"] = value
        return body

    return app
