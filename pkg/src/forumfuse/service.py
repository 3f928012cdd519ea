"""HTTP surface over the curation engine.

JSON in, JSON out; every response body carries ``schema_version`` and
every non-success body carries exactly one ``error`` envelope.  The
service holds no state of its own: it is a thin adapter over a single
engine instance, whose event log remains the source of truth.
"""
from __future__ import annotations

from typing import Optional

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from .core.schema import DIMENSION_NAMES, SCHEMA_VERSION, parse_area
from .core.types import LabelVector, Post
from .engine import CurationEngine, PostStatus
from .errors import (
    ConflictError,
    ForumFuseError,
    NotFoundError,
    ValidationError,
)
from .fusion.types import FusedVerdict


class PostIn(BaseModel):
    post_id: str = Field(min_length=1)
    course_id: str = Field(min_length=1)
    area: str = Field(min_length=1)
    text: str
    gold: Optional[list[int]] = None


class ResolutionIn(BaseModel):
    labels: list[int]
    response: str


def _error_body(code: str, message: str, detail: dict | None = None) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "error": {"code": code, "message": message, "detail": detail or {}},
    }


def _verdict_view(verdict: FusedVerdict | None) -> dict | None:
    if verdict is None:
        return None
    return {
        "labels": dict(zip(DIMENSION_NAMES, verdict.labels)),
        "confidence": verdict.confidence,
        "per_dimension": {
            name: {"probs": list(d.fused.probs), "label": d.label, "margin": d.margin}
            for name, d in zip(DIMENSION_NAMES, verdict.per_dimension)
        },
    }


def gating_dimension(verdict: FusedVerdict | None) -> str | None:
    """Dimension whose weakest fused winner capped the confidence."""
    if verdict is None:
        return None
    worst = min(range(len(verdict.per_dimension)),
                key=lambda i: max(verdict.per_dimension[i].fused.probs))
    return DIMENSION_NAMES[worst]


def _post_state_view(state) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "post_id": state.post_id,
        "status": state.status.value,
        "verdict": _verdict_view(state.verdict),
        "priority": state.priority,
        "confidence": state.confidence,
        "response": state.response.to_dict() if state.response else None,
        "reason": state.reason,
        "referral_id": state.referral_id,
        "created_at": state.created_at,
        "updated_at": state.updated_at,
    }


def _referral_view(item, texts: dict[str, str]) -> dict:
    return {
        "referral_id": item.referral_id,
        "post_id": item.post_id,
        # Post text lives only in this process (the store is outcome-only),
        # so it is None for referrals recovered from a replayed log.
        "text": texts.get(item.post_id),
        "priority": item.priority,
        "created_at": item.created_at,
        "reason": item.reason,
        "verdict": _verdict_view(item.verdict),
        "gating_dimension": gating_dimension(item.verdict),
        "open": item.open,
        "resolution": item.resolution.to_dict() if item.resolution else None,
    }


def create_app(engine: CurationEngine, api_token: str | None = None) -> FastAPI:
    app = FastAPI(title="forum curation service", docs_url=None, redoc_url=None)
    app.state.engine = engine
    texts: dict[str, str] = {}

    @app.exception_handler(RequestValidationError)
    async def bad_body(request: Request, exc: RequestValidationError):
        return JSONResponse(
            status_code=400,
            content=_error_body("invalid-request", "request body failed validation",
                                {"errors": [str(e.get("msg", e)) for e in exc.errors()[:5]]}),
        )

    @app.exception_handler(NotFoundError)
    async def not_found(request: Request, exc: NotFoundError):
        return JSONResponse(status_code=404, content=_error_body("not-found", str(exc)))

    @app.exception_handler(ConflictError)
    async def conflict(request: Request, exc: ConflictError):
        return JSONResponse(status_code=409, content=_error_body("conflict", str(exc)))

    @app.exception_handler(ValidationError)
    async def invalid(request: Request, exc: ValidationError):
        return JSONResponse(status_code=400, content=_error_body("invalid-request", str(exc)))

    @app.exception_handler(ForumFuseError)
    async def internal(request: Request, exc: ForumFuseError):
        return JSONResponse(status_code=500, content=_error_body("internal", str(exc)))

    @app.middleware("http")
    async def check_token(request: Request, call_next):
        if api_token is not None and request.url.path != "/healthz":
            header = request.headers.get("authorization", "")
            if header != f"Bearer {api_token}":
                return JSONResponse(
                    status_code=401,
                    content=_error_body("unauthorized", "missing or invalid bearer token"),
                )
        return await call_next(request)

    @app.get("/healthz")
    async def healthz():
        return {"schema_version": SCHEMA_VERSION, "status": "ok"}

    @app.post("/posts")
    async def submit_post(body: PostIn):
        gold = None
        if body.gold is not None:
            gold = LabelVector(labels=tuple(int(v) for v in body.gold))
        post = Post(
            post_id=body.post_id,
            course_id=body.course_id,
            area=parse_area(body.area),
            text=body.text,
            gold=gold,
        )
        state = engine.process_post(post)
        texts[post.post_id] = post.text
        # Provider outage is accepted-but-deferred rather than an error.
        code = 202 if state.reason == "no-scores" else 200
        return JSONResponse(status_code=code, content=_post_state_view(state))

    @app.get("/posts/{post_id}")
    async def get_post(post_id: str):
        state = engine.store.posts.get(post_id)
        if state is None:
            raise NotFoundError(f"unknown post {post_id!r}")
        return _post_state_view(state)

    @app.get("/referrals")
    async def referrals(status: str = "open"):
        if status == "open":
            items = engine.open_referrals()
        elif status == "resolved":
            items = sorted(
                (r for r in engine.store.referrals.values() if not r.open),
                key=lambda r: (-r.priority, r.seq),
            )
        elif status == "all":
            items = sorted(engine.store.referrals.values(), key=lambda r: (-r.priority, r.seq))
        else:
            raise ValidationError(f"unknown status filter {status!r}")
        return {
            "schema_version": SCHEMA_VERSION,
            "items": [_referral_view(r, texts) for r in items],
            "count": len(items),
        }

    @app.get("/referrals/{referral_id}")
    async def referral(referral_id: str):
        item = engine.store.referrals.get(referral_id)
        if item is None:
            raise NotFoundError(f"unknown referral {referral_id!r}")
        return {"schema_version": SCHEMA_VERSION, **_referral_view(item, texts)}

    @app.post("/referrals/{referral_id}/resolution")
    async def resolve(referral_id: str, body: ResolutionIn):
        labels = LabelVector(labels=tuple(int(v) for v in body.labels))
        state = engine.resolve_referral(referral_id, labels, body.response)
        return _post_state_view(state)

    @app.get("/report")
    async def report():
        return {"schema_version": SCHEMA_VERSION, **engine.report().to_dict()}

    return app
