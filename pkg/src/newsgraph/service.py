"""HTTP/JSON query service over a frozen network index.

Exposes entity suggestion, the four exploration modes, and article
recommendation. Every response body is rendered through the canonical
serializer, so replaying a recorded request against the same snapshot
yields byte-identical JSON; the CLI calls the same ``run_*`` operations,
which keeps both front ends in lockstep. A per-client budget caps
concurrently active queries; client fingerprints are hashed before being
stored or compared.
"""

from __future__ import annotations

import hashlib
import threading
from contextlib import contextmanager
from dataclasses import dataclass
from datetime import date
from typing import Literal

from fastapi import FastAPI, Query, Request, Response
from fastapi.exceptions import RequestValidationError
from pydantic import BaseModel, ConfigDict, Field

from . import payloads
from .engine import QueryContext, TopicEngine
from .model import (
    DateRange,
    EmptyContextError,
    NodeRef,
    entity_node,
)
from .store import FrozenIndex

DEFAULT_QUERY_LIMIT = 2
RETRY_AFTER_SECONDS = 1


class ApiError(Exception):
    """Domain error carrying an HTTP status and the offending field."""

    def __init__(self, status: int, message: str, field: str | None = None):
        super().__init__(message)
        self.status = status
        self.message = message
        self.field = field


class ThrottledError(Exception):
    pass


class ClientBudgetRegistry:
    """Tracks concurrently active queries per hashed client fingerprint.

    Admission succeeds while the client's active count is below the limit;
    completion must release the slot. Raw fingerprints never enter the
    registry, only their sha256 digests.
    """

    def __init__(self, limit: int = DEFAULT_QUERY_LIMIT):
        if limit < 1:
            raise ValueError("query limit must be at least 1")
        self.limit = limit
        self._lock = threading.Lock()
        self._active: dict[str, int] = {}
        self._peak: dict[str, int] = {}

    @staticmethod
    def _digest(fingerprint: str) -> str:
        return hashlib.sha256(fingerprint.encode("utf-8")).hexdigest()

    def admit(self, fingerprint: str) -> bool:
        key = self._digest(fingerprint)
        with self._lock:
            active = self._active.get(key, 0)
            if active >= self.limit:
                return False
            active += 1
            self._active[key] = active
            if active > self._peak.get(key, 0):
                self._peak[key] = active
            return True

    def release(self, fingerprint: str) -> None:
        key = self._digest(fingerprint)
        with self._lock:
            active = self._active.get(key, 0)
            if active <= 1:
                self._active.pop(key, None)
            else:
                self._active[key] = active - 1

    def active_count(self, fingerprint: str) -> int:
        with self._lock:
            return self._active.get(self._digest(fingerprint), 0)

    def peak_active(self, fingerprint: str) -> int:
        with self._lock:
            return self._peak.get(self._digest(fingerprint), 0)


@dataclass(frozen=True, slots=True)
class EntitySuggestion:
    entity_id: str
    label: str
    etype: str
    description: str | None
    match_score: float
    occurrence_count: int


def _tokens_prefix_match(query_tokens: list[str], label_tokens: list[str]) -> bool:
    # Each query token must prefix a distinct label token, in label order.
    matched = 0
    for token in label_tokens:
        if matched < len(query_tokens) and token.startswith(query_tokens[matched]):
            matched += 1
    return matched == len(query_tokens)


def suggest_entities(index: FrozenIndex, q: str, limit: int) -> list[EntitySuggestion]:
    """Case-insensitive token-prefix search over entity labels.

    The match score is the ratio of matched query characters to label
    length, clamped to [0, 1]; ties break by total occurrence count, then
    entity id.
    """
    query = q.strip().lower()
    if not query:
        return []
    query_tokens = query.split()
    matched_chars = sum(len(t) for t in query_tokens)
    results = []
    for nid, node, info in index.entities():
        label_tokens = info.label.lower().split()
        if not _tokens_prefix_match(query_tokens, label_tokens):
            continue
        score = min(1.0, matched_chars / len(info.label)) if info.label else 0.0
        results.append(
            EntitySuggestion(
                entity_id=node.id,
                label=info.label,
                etype=info.etype,
                description=info.description,
                match_score=score,
                occurrence_count=int(index.node_total_occ[nid]),
            )
        )
    results.sort(key=lambda s: (-s.match_score, -s.occurrence_count, s.entity_id))
    return results[: max(limit, 0)]


class RangeBody(BaseModel):
    model_config = ConfigDict(extra="forbid")
    start: date
    end: date


class QueryBody(BaseModel):
    model_config = ConfigDict(extra="forbid")
    range: RangeBody
    outlets: list[str] | None = None
    num_edges: int = Field(default=10, ge=1, le=100)
    num_terms: int = Field(default=10, ge=0, le=100)


class TargetedBody(QueryBody):
    entity_a: str
    entity_b: str


class TermsBody(QueryBody):
    entity_a: str
    entity_b: str


class AdjacentBody(QueryBody):
    entity: str


class NodeDescriptor(BaseModel):
    model_config = ConfigDict(extra="forbid")
    kind: Literal["entity", "term"]
    id: str


class RecommendBody(QueryBody):
    nodes: list[NodeDescriptor]
    num_articles: int = Field(default=10, ge=1, le=100)


# -- shared query operations (HTTP endpoints and CLI both call these) ------


def build_context(index: FrozenIndex, body: QueryBody) -> QueryContext:
    try:
        drange = DateRange(start=body.range.start, end=body.range.end)
    except ValueError as exc:
        raise ApiError(400, str(exc), "range") from exc
    span = index.corpus_span()
    if span is None:
        raise ApiError(400, "store holds no documents, no valid date range", "range")
    if drange.end < span[0] or drange.start > span[1]:
        raise ApiError(
            400,
            f"range does not overlap corpus span {span[0].isoformat()}..{span[1].isoformat()}",
            "range",
        )
    outlets: frozenset[str] | None = None
    if body.outlets is not None:
        if not body.outlets:
            raise ApiError(400, "outlets must be omitted or non-empty", "outlets")
        unknown = sorted(set(body.outlets) - set(index.outlets))
        if unknown:
            raise ApiError(400, f"unknown outlets: {', '.join(unknown)}", "outlets")
        outlets = frozenset(body.outlets)
    return QueryContext(
        range=drange,
        outlets=outlets,
        num_edges=body.num_edges,
        num_terms=body.num_terms,
    )


def require_entity(index: FrozenIndex, entity_id: str, field: str) -> NodeRef:
    node = entity_node(entity_id)
    if node not in index.node_index:
        raise ApiError(404, f"unknown entity: {entity_id}", field)
    return node


def require_pair(index: FrozenIndex, a_id: str, b_id: str) -> tuple[NodeRef, NodeRef]:
    if a_id == b_id:
        raise ApiError(400, "entity pair must be two distinct entities", "entity_b")
    return require_entity(index, a_id, "entity_a"), require_entity(index, b_id, "entity_b")


def run_global(index: FrozenIndex, engine: TopicEngine, body: QueryBody) -> dict:
    ctx = build_context(index, body)
    try:
        seeds = engine.global_edge_ranking(ctx)
        topics = engine.build_topics(seeds, ctx)
    except EmptyContextError:
        topics = []
    return payloads.topics_payload(index, "global", ctx, topics)


def run_targeted(index: FrozenIndex, engine: TopicEngine, body: TargetedBody) -> dict:
    ctx = build_context(index, body)
    a, b = require_pair(index, body.entity_a, body.entity_b)
    seed = engine.targeted_edge(a, b, ctx)
    topics = engine.build_topics([seed], ctx) if seed is not None else []
    return payloads.topics_payload(index, "targeted", ctx, topics)


def run_terms(index: FrozenIndex, engine: TopicEngine, body: TermsBody) -> dict:
    ctx = build_context(index, body)
    a, b = require_pair(index, body.entity_a, body.entity_b)
    try:
        terms = engine.expand_terms(a, b, ctx)
    except EmptyContextError:
        terms = []
    return payloads.terms_payload(index, ctx, a, b, terms)


def run_adjacent(index: FrozenIndex, engine: TopicEngine, body: AdjacentBody) -> dict:
    ctx = build_context(index, body)
    entity = require_entity(index, body.entity, "entity")
    try:
        edges = engine.adjacent_entities(entity, ctx)
    except EmptyContextError:
        edges = []
    return payloads.adjacent_payload(index, ctx, entity, edges)


def run_recommend(index: FrozenIndex, engine: TopicEngine, body: RecommendBody) -> dict:
    ctx = build_context(index, body)
    refs: list[NodeRef] = []
    seen: set[NodeRef] = set()
    for desc in body.nodes:
        node = NodeRef(desc.kind, desc.id)
        if node not in index.node_index:
            raise ApiError(404, f"unknown node: {desc.kind}:{desc.id}", "nodes")
        if node not in seen:
            seen.add(node)
            refs.append(node)
    if len(refs) < 2:
        raise ApiError(400, "recommendation needs at least two distinct nodes", "nodes")
    articles = engine.recommend_articles(refs, ctx, body.num_articles)
    return payloads.recommend_payload(ctx, refs, articles)


def _json_response(payload: dict, status: int = 200, headers: dict | None = None) -> Response:
    return Response(
        content=payloads.canonical_dumps(payload),
        status_code=status,
        media_type="application/json",
        headers=headers,
    )


def create_app(
    index: FrozenIndex,
    *,
    query_limit: int = DEFAULT_QUERY_LIMIT,
    cache_enabled: bool = True,
    ui_dir: str | None = None,
) -> FastAPI:
    """Build the service around one immutable index snapshot."""
    app = FastAPI(title="newsgraph", docs_url=None, redoc_url=None, openapi_url=None)
    engine = TopicEngine(index, cache_enabled=cache_enabled)
    registry = ClientBudgetRegistry(limit=query_limit)
    app.state.index = index
    app.state.engine = engine
    app.state.registry = registry

    @contextmanager
    def admitted(request: Request):
        fingerprint = request.headers.get("x-client-fp", "")
        if not registry.admit(fingerprint):
            raise ThrottledError()
        try:
            yield
        finally:
            registry.release(fingerprint)

    @app.exception_handler(ApiError)
    async def handle_api_error(request: Request, exc: ApiError) -> Response:
        return _json_response(payloads.error_payload(exc.message, exc.field), exc.status)

    @app.exception_handler(ThrottledError)
    async def handle_throttled(request: Request, exc: ThrottledError) -> Response:
        payload = {
            "error": {
                "message": "too many active queries for this client",
                "retry_after_seconds": RETRY_AFTER_SECONDS,
            }
        }
        return _json_response(payload, 429, headers={"Retry-After": str(RETRY_AFTER_SECONDS)})

    @app.exception_handler(RequestValidationError)
    async def handle_validation(request: Request, exc: RequestValidationError) -> Response:
        errors = exc.errors()
        if errors:
            loc = [str(part) for part in errors[0]["loc"] if part != "body"]
            field = ".".join(loc) if loc else "body"
            message = errors[0]["msg"]
        else:
            field, message = "body", "invalid request body"
        return _json_response(payloads.error_payload(message, field), 400)

    @app.exception_handler(Exception)
    async def handle_internal(request: Request, exc: Exception) -> Response:
        return _json_response(payloads.error_payload("internal error"), 500)

    @app.get("/api/suggest")
    def api_suggest(q: str = "", limit: int = Query(default=10, ge=1, le=100)) -> Response:
        return _json_response(payloads.suggest_payload(q, suggest_entities(index, q, limit)))

    @app.get("/api/meta")
    def api_meta() -> Response:
        return _json_response(payloads.meta_payload(index))

    @app.get("/api/health")
    def api_health() -> Response:
        payload = payloads.meta_payload(index)
        payload["status"] = "ok"
        return _json_response(payload)

    @app.post("/api/topics/global")
    def api_topics_global(body: QueryBody, request: Request) -> Response:
        with admitted(request):
            return _json_response(run_global(index, engine, body))

    @app.post("/api/topics/targeted")
    def api_topics_targeted(body: TargetedBody, request: Request) -> Response:
        with admitted(request):
            return _json_response(run_targeted(index, engine, body))

    @app.post("/api/expand/terms")
    def api_expand_terms(body: TermsBody, request: Request) -> Response:
        with admitted(request):
            return _json_response(run_terms(index, engine, body))

    @app.post("/api/expand/adjacent")
    def api_expand_adjacent(body: AdjacentBody, request: Request) -> Response:
        with admitted(request):
            return _json_response(run_adjacent(index, engine, body))

    @app.post("/api/recommend")
    def api_recommend(body: RecommendBody, request: Request) -> Response:
        with admitted(request):
            return _json_response(run_recommend(index, engine, body))

    if ui_dir is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app
