"""Read-only HTTP API over a loaded index.

Every endpoint is a thin projection of the query modules; no domain logic
lives here. The index is an immutable snapshot, so requests are served
concurrently without locking and identical requests yield identical
bodies. Every non-2xx response body is {"error": {"code", "message"}}.
"""
from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, Response
from starlette.exceptions import HTTPException as StarletteHTTPException
from starlette.staticfiles import StaticFiles

from .errors import TokenNotFoundError, TokenRefError
from .evaluate import cross_evaluate, frame_to_dict
from .indexing import RecommenderIndex
from .model import TokenRef
from .recommend import MODELS, recommend, recommendation_payload
from .serialize import render_json

MAX_PAGE_LIMIT = 200
MAX_K = 100

_STATUS_CODES = {
    400: "bad_request",
    404: "not_found",
    405: "method_not_allowed",
}


class ApiError(Exception):
    """Maps straight onto the error envelope."""

    def __init__(self, status: int, code: str, message: str):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message


def _error_body(status: int, code: str, message: str) -> JSONResponse:
    return JSONResponse(
        status_code=status, content={"error": {"code": code, "message": message}}
    )


def _json(payload) -> Response:
    # Shared renderer keeps HTTP bodies byte-identical to CLI output.
    return Response(content=render_json(payload), media_type="application/json")


def create_app(index: RecommenderIndex, static_dir: str | None = None) -> FastAPI:
    app = FastAPI(title="nft-recsys", version="0.1.0")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.exception_handler(ApiError)
    async def handle_api_error(request: Request, exc: ApiError):
        return _error_body(exc.status, exc.code, exc.message)

    @app.exception_handler(StarletteHTTPException)
    async def handle_http_exception(request: Request, exc: StarletteHTTPException):
        code = _STATUS_CODES.get(exc.status_code, "http_error")
        return _error_body(exc.status_code, code, str(exc.detail))

    @app.exception_handler(RequestValidationError)
    async def handle_validation_error(request: Request, exc: RequestValidationError):
        return _error_body(400, "invalid_parameter", str(exc.errors()[:1]))

    def resolve_ref(contract: str, token_id: str) -> TokenRef:
        try:
            return TokenRef(contract, token_id)
        except TokenRefError as exc:
            raise ApiError(404, "token_not_found", str(exc)) from None

    @app.get("/health")
    def health():
        return _json({"status": "ok", "tokens": index.n_tokens})

    @app.get("/tokens")
    def tokens(offset: int = 0, limit: int = 50):
        if offset < 0:
            raise ApiError(400, "invalid_paging", "offset must be >= 0")
        if not 1 <= limit <= MAX_PAGE_LIMIT:
            raise ApiError(
                400, "invalid_paging", f"limit must be in 1..{MAX_PAGE_LIMIT}"
            )
        window = index.collection_.tokens[offset : offset + limit]
        items = [
            {
                "id": t.ref.display(),
                "name": t.name,
                "image_url": t.image_url,
                "total_rarity": index.rarity_totals_[offset + i],
            }
            for i, t in enumerate(window)
        ]
        return _json(
            {
                "tokens": items,
                "total": index.n_tokens,
                "offset": offset,
                "limit": limit,
            }
        )

    @app.get("/recommendations/{contract}/{token_id}")
    def recommendations(contract: str, token_id: str, model: str = "both", k: int = 10):
        if model not in MODELS:
            raise ApiError(400, "invalid_model", f"model must be one of {MODELS}")
        if not 0 <= k <= MAX_K:
            raise ApiError(400, "invalid_k", f"k must be in 0..{MAX_K}")
        ref = resolve_ref(contract, token_id)
        try:
            results = recommend(ref, model, k, index)
        except TokenNotFoundError as exc:
            raise ApiError(404, "token_not_found", str(exc)) from None
        return _json(recommendation_payload(ref, model, k, results))

    @app.get("/evaluation/{contract}/{token_id}")
    def evaluation(contract: str, token_id: str, k: int = 10):
        if not 0 <= k <= MAX_K:
            raise ApiError(400, "invalid_k", f"k must be in 0..{MAX_K}")
        ref = resolve_ref(contract, token_id)
        try:
            frame = cross_evaluate(ref, k, index)
        except TokenNotFoundError as exc:
            raise ApiError(404, "token_not_found", str(exc)) from None
        return _json(frame_to_dict(frame))

    if static_dir is not None:
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")

    return app
