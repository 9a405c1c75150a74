"""Canonical JSON payload builders shared by the HTTP service and the CLI.

Both front ends serialize through :func:`canonical_dumps`, so identical
queries produce byte-identical output regardless of transport. All
payloads carry a schema version.
"""

from __future__ import annotations

import json
from typing import Sequence

from .engine import ArticleRec, QueryContext
from .model import KIND_ENTITY, NodeRef, ScoredEdge, TopicGraph
from .store import FrozenIndex

SCHEMA_VERSION = 1


def canonical_dumps(payload: dict) -> str:
    """Serialize with sorted keys and no whitespace; unicode kept literal."""
    return json.dumps(payload, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def node_descriptor(node: NodeRef) -> dict:
    return {"kind": node.kind, "id": node.id}


def entity_json(index: FrozenIndex, node: NodeRef) -> dict:
    info = index.entity_info.get(index.node_index.get(node, -1))
    return {
        "id": node.id,
        "kind": KIND_ENTITY,
        "type": info.etype if info else None,
        "label": info.label if info else node.id,
        "description": info.description if info else None,
    }


def edge_json(edge: ScoredEdge) -> dict:
    view = edge.view
    return {
        "source": node_descriptor(view.pair[0]),
        "target": node_descriptor(view.pair[1]),
        "weight": edge.weight,
        "doc_count": view.doc_count,
        "days_active": view.days_active,
        "proximity_sum": view.proximity_sum,
    }


def term_entry(term: NodeRef, weight: float) -> dict:
    return {"id": term.id, "weight": weight}


def context_json(ctx: QueryContext) -> dict:
    return {
        "range": {"start": ctx.range.start.isoformat(), "end": ctx.range.end.isoformat()},
        "outlets": sorted(ctx.outlets) if ctx.outlets is not None else None,
        "num_edges": ctx.num_edges,
        "num_terms": ctx.num_terms,
    }


def topic_json(index: FrozenIndex, topic: TopicGraph) -> dict:
    entities = sorted(topic.entities, key=lambda n: n.id)
    terms = []
    for edge in topic.seed_edges:
        pair = edge.view.pair
        expansion = topic.terms.get(pair)
        if expansion is None:
            continue
        terms.append(
            {
                "pair": [pair[0].id, pair[1].id],
                "terms": [term_entry(t, s) for t, s in expansion],
            }
        )
    return {
        "entities": [entity_json(index, n) for n in entities],
        "edges": [edge_json(e) for e in topic.seed_edges],
        "terms": terms,
    }


def topics_payload(index: FrozenIndex, mode: str, ctx: QueryContext, topics: Sequence[TopicGraph]) -> dict:
    return {
        "version": SCHEMA_VERSION,
        "mode": mode,
        "context": context_json(ctx),
        "topics": [topic_json(index, t) for t in topics],
    }


def terms_payload(index: FrozenIndex, ctx: QueryContext, a: NodeRef, b: NodeRef, terms: list[tuple[NodeRef, float]]) -> dict:
    return {
        "version": SCHEMA_VERSION,
        "context": context_json(ctx),
        "pair": [a.id, b.id],
        "terms": [term_entry(t, s) for t, s in terms],
    }


def adjacent_payload(index: FrozenIndex, ctx: QueryContext, entity: NodeRef, edges: Sequence[ScoredEdge]) -> dict:
    neighbors = []
    for edge in edges:
        v, w = edge.view.pair
        other = w if v == entity else v
        neighbors.append({"entity": entity_json(index, other), "edge": edge_json(edge)})
    return {
        "version": SCHEMA_VERSION,
        "context": context_json(ctx),
        "entity": entity_json(index, entity),
        "neighbors": neighbors,
    }


def recommend_payload(ctx: QueryContext, nodes: Sequence[NodeRef], articles: Sequence[ArticleRec]) -> dict:
    return {
        "version": SCHEMA_VERSION,
        "context": context_json(ctx),
        "nodes": [node_descriptor(n) for n in nodes],
        "articles": [
            {
                "id": a.doc_id,
                "date": a.date.isoformat(),
                "outlet": a.outlet,
                "coverage": a.coverage,
                "proximity": a.proximity,
                "url": a.url,
                "title": a.title,
            }
            for a in articles
        ],
    }


def suggest_payload(query: str, suggestions: Sequence) -> dict:
    return {
        "version": SCHEMA_VERSION,
        "query": query,
        "suggestions": [
            {
                "entity_id": s.entity_id,
                "label": s.label,
                "etype": s.etype,
                "description": s.description,
                "match_score": s.match_score,
                "occurrence_count": s.occurrence_count,
            }
            for s in suggestions
        ],
    }


def meta_payload(index: FrozenIndex) -> dict:
    span = index.corpus_span()
    return {
        "version": SCHEMA_VERSION,
        "corpus": {
            "start": span[0].isoformat() if span else None,
            "end": span[1].isoformat() if span else None,
            "documents": index.document_count,
        },
        "outlets": sorted(index.outlets),
        "nodes": index.node_counts_by_type(),
        "pairs": index.pair_count,
        "edge_cells": index.edge_cell_count,
    }


def error_payload(message: str, field: str | None = None) -> dict:
    error: dict = {"message": message}
    if field is not None:
        error["field"] = field
    return {"error": error}
