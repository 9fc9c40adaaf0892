"""HTTP service exposing the annotation wire contract.

    POST /annotate {id,title,body} -> annotation layers (interchange schema,
                                      minus the article block)
    POST /qa {context,question}    -> {answer, score}
    GET  /health                   -> {status: ready|loading}

Engine selection is environment-driven (SIDECAR_ENGINE=rules|neural,
default rules). The service is stateless across requests; for a fixed
engine and model set, identical input yields identical output.
"""

from __future__ import annotations

import os
from contextlib import asynccontextmanager

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from .rules import RuleEngine

DEFAULT_MAX_TEXT_LENGTH = 100_000


class AnnotateRequest(BaseModel):
    id: str = Field(min_length=1)
    title: str = Field(min_length=1)
    body: str = Field(min_length=1)


class QaRequest(BaseModel):
    context: str = Field(min_length=1)
    question: str = Field(min_length=1)


def _build_engine():
    kind = os.environ.get("SIDECAR_ENGINE", "rules")
    if kind == "rules":
        return RuleEngine()
    if kind == "neural":
        from .neural import NeuralEngine

        engine = NeuralEngine()
        engine.load()
        return engine
    raise ValueError(f"unknown SIDECAR_ENGINE {kind!r} (expected rules or neural)")


def create_app() -> FastAPI:
    @asynccontextmanager
    async def lifespan(app: FastAPI):
        app.state.engine = _build_engine()
        yield
        app.state.engine = None

    app = FastAPI(title="annotation-sidecar", lifespan=lifespan)
    app.state.engine = None
    app.state.max_text_length = int(
        os.environ.get("SIDECAR_MAX_TEXT_LENGTH", DEFAULT_MAX_TEXT_LENGTH))

    @app.exception_handler(RequestValidationError)
    async def malformed(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"error": "malformed request",
                                                      "detail": exc.errors()})

    @app.get("/health")
    def health():
        return {"status": "ready" if app.state.engine is not None else "loading"}

    @app.post("/annotate")
    def annotate(request: AnnotateRequest):
        if app.state.engine is None:
            return JSONResponse(status_code=503, content={"error": "model not loaded"})
        if len(request.body) > app.state.max_text_length:
            return JSONResponse(status_code=413, content={
                "error": f"body exceeds {app.state.max_text_length} characters"})
        return app.state.engine.annotate(request.id, request.title, request.body)

    @app.post("/qa")
    def qa(request: QaRequest):
        if app.state.engine is None:
            return JSONResponse(status_code=503, content={"error": "model not loaded"})
        if len(request.context) > app.state.max_text_length:
            return JSONResponse(status_code=413, content={
                "error": f"context exceeds {app.state.max_text_length} characters"})
        answer, score = app.state.engine.qa(request.context, request.question)
        return {"answer": answer, "score": max(0.0, min(1.0, score))}

    return app


app = create_app()
