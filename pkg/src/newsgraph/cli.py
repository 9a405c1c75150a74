"""Command line front end: build stores, run queries, launch the service.

All output is JSON. Query subcommands print exactly the payload the HTTP
endpoints would return (same operations, same serializer), so the two
transports can be diffed byte for byte. ``--pretty`` re-indents for
humans.

Exit codes: 0 success, 1 I/O or internal failure, 2 usage or invalid
parameters, 3 unknown entity or node.
"""

from __future__ import annotations

import json
import sys
import time
from collections import Counter
from datetime import datetime

import click
from pydantic import ValidationError

from .engine import TopicEngine
from .ingest import DEFAULT_ENTITY_WINDOW, admit_document, extract_cooccurrences, read_corpus
from .model import DuplicateDocumentError, FilterLimits, NewsgraphError, SnapshotFormatError
from .payloads import canonical_dumps, error_payload
from .service import (
    AdjacentBody,
    ApiError,
    NodeDescriptor,
    QueryBody,
    RangeBody,
    RecommendBody,
    TargetedBody,
    TermsBody,
    create_app,
    run_adjacent,
    run_global,
    run_recommend,
    run_targeted,
    run_terms,
)
from .store import NetworkStore

_MAX_PARSE_WARNINGS = 5

_DATE = click.DateTime(formats=["%Y-%m-%d"])


def _emit(payload: dict, pretty: bool) -> None:
    if pretty:
        click.echo(json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False))
    else:
        click.echo(canonical_dumps(payload))


def _fail(message: str, field: str | None, code: int) -> None:
    click.echo(canonical_dumps(error_payload(message, field)), err=True)
    sys.exit(code)


@click.group()
def main() -> None:
    """Build, query, and serve entity cooccurrence networks."""


@main.command()
@click.argument("corpus_path", metavar="CORPUS", type=click.Path(exists=True, dir_okay=False))
@click.argument("store_path", metavar="STORE", type=click.Path(dir_okay=False))
@click.option("--min-chars", default=200, show_default=True, type=click.IntRange(min=0),
              help="Reject documents shorter than this many characters.")
@click.option("--max-chars", default=20000, show_default=True, type=click.IntRange(min=0),
              help="Reject documents longer than this many characters.")
@click.option("--max-entities", default=100, show_default=True, type=click.IntRange(min=0),
              help="Reject documents mentioning more distinct entities than this.")
@click.option("--window", default=DEFAULT_ENTITY_WINDOW, show_default=True, type=click.IntRange(min=1),
              help="Maximum sentence distance for entity cooccurrence.")
@click.option("--pretty", is_flag=True, help="Indent the report for reading.")
def build(corpus_path: str, store_path: str, min_chars: int, max_chars: int,
          max_entities: int, window: int, pretty: bool) -> None:
    """Ingest a JSONL corpus into a network snapshot at STORE."""
    limits = FilterLimits(min_chars=min_chars, max_chars=max_chars, max_entities=max_entities)
    store = NetworkStore()
    read = 0
    admitted = 0
    rejected: Counter[str] = Counter()
    warnings = 0
    started = time.perf_counter()
    try:
        with open(corpus_path, encoding="utf-8") as handle:
            for parsed in read_corpus(handle):
                read += 1
                if parsed.error is not None:
                    rejected["parse_error"] += 1
                    if warnings < _MAX_PARSE_WARNINGS:
                        click.echo(f"line {parsed.line_no}: {parsed.error}", err=True)
                        warnings += 1
                    continue
                doc = parsed.doc
                reason = admit_document(doc, limits)
                if reason is not None:
                    rejected[reason] += 1
                    continue
                try:
                    store.insert_document(extract_cooccurrences(doc, entity_window=window), doc)
                except DuplicateDocumentError:
                    rejected["duplicate_id"] += 1
                    continue
                admitted += 1
    except OSError as exc:
        _fail(f"cannot read corpus: {exc}", None, 1)
    try:
        store.save(store_path)
    except OSError as exc:
        _fail(f"cannot write store: {exc}", None, 1)
    elapsed = time.perf_counter() - started
    report = {
        "documents_read": read,
        "documents_admitted": admitted,
        "documents_rejected": {
            "too_short": rejected.get("too_short", 0),
            "too_long": rejected.get("too_long", 0),
            "too_many_entities": rejected.get("too_many_entities", 0),
            "parse_error": rejected.get("parse_error", 0),
            "duplicate_id": rejected.get("duplicate_id", 0),
        },
        "nodes": store.index().node_counts_by_type(),
        "aggregated_edge_cells": store.edge_cell_count,
        "elapsed_seconds": round(elapsed, 3),
    }
    _emit(report, pretty)


def _load_index(store_path: str):
    try:
        return NetworkStore.load(store_path).index()
    except SnapshotFormatError as exc:
        _fail(f"cannot load store: {exc}", None, 1)
    except OSError as exc:
        _fail(f"cannot read store: {exc}", None, 1)


@main.group()
@click.argument("store_path", metavar="STORE", type=click.Path(exists=True, dir_okay=False))
@click.option("--cache/--no-cache", "cache_enabled", default=True, show_default=True,
              help="Cache term-expansion rankings per context.")
@click.option("--pretty", is_flag=True, help="Indent output for reading.")
@click.pass_context
def query(ctx: click.Context, store_path: str, cache_enabled: bool, pretty: bool) -> None:
    """Run one exploration query against the snapshot at STORE."""
    index = _load_index(store_path)
    ctx.obj = {
        "index": index,
        "engine": TopicEngine(index, cache_enabled=cache_enabled),
        "pretty": pretty,
    }


def _range_options(fn):
    options = [
        click.option("--from", "start", metavar="YYYY-MM-DD", required=True, type=_DATE,
                     help="Range start (inclusive)."),
        click.option("--to", "end", metavar="YYYY-MM-DD", required=True, type=_DATE,
                     help="Range end (inclusive)."),
        click.option("--outlet", "outlets", multiple=True,
                     help="Restrict to this outlet; repeat to allow several."),
        click.option("-k", "--num-edges", default=10, show_default=True,
                     type=click.IntRange(1, 100), help="Edges to return."),
        click.option("-m", "--num-terms", default=10, show_default=True,
                     type=click.IntRange(0, 100), help="Terms per edge."),
    ]
    for option in reversed(options):
        fn = option(fn)
    return fn


def _base_body(start: datetime, end: datetime, outlets: tuple[str, ...], num_edges: int, num_terms: int) -> dict:
    return {
        "range": RangeBody(start=start.date(), end=end.date()),
        "outlets": list(outlets) if outlets else None,
        "num_edges": num_edges,
        "num_terms": num_terms,
    }


def _execute(obj: dict, op, body) -> None:
    try:
        payload = op(obj["index"], obj["engine"], body)
    except ApiError as exc:
        code = 3 if exc.status == 404 else 2 if exc.status == 400 else 1
        _fail(exc.message, exc.field, code)
    except NewsgraphError as exc:
        _fail(str(exc), None, 1)
    else:
        _emit(payload, obj["pretty"])


@query.command("global")
@_range_options
@click.pass_obj
def query_global(obj: dict, start, end, outlets, num_edges, num_terms) -> None:
    """Strongest entity pairs across the whole context."""
    _execute(obj, run_global, QueryBody(**_base_body(start, end, outlets, num_edges, num_terms)))


@query.command("targeted")
@click.option("--entity-a", required=True, help="First entity id.")
@click.option("--entity-b", required=True, help="Second entity id.")
@_range_options
@click.pass_obj
def query_targeted(obj: dict, entity_a, entity_b, start, end, outlets, num_edges, num_terms) -> None:
    """The edge between two chosen entities, expanded with terms."""
    body = TargetedBody(entity_a=entity_a, entity_b=entity_b,
                        **_base_body(start, end, outlets, num_edges, num_terms))
    _execute(obj, run_targeted, body)


@query.command("terms")
@click.option("--entity-a", required=True, help="First entity id.")
@click.option("--entity-b", required=True, help="Second entity id.")
@_range_options
@click.pass_obj
def query_terms(obj: dict, entity_a, entity_b, start, end, outlets, num_edges, num_terms) -> None:
    """Terms shared by an entity pair, ranked by combined edge weight."""
    body = TermsBody(entity_a=entity_a, entity_b=entity_b,
                     **_base_body(start, end, outlets, num_edges, num_terms))
    _execute(obj, run_terms, body)


@query.command("adjacent")
@click.option("--entity", required=True, help="Entity id to expand around.")
@_range_options
@click.pass_obj
def query_adjacent(obj: dict, entity, start, end, outlets, num_edges, num_terms) -> None:
    """Entities most strongly connected to the given one."""
    body = AdjacentBody(entity=entity, **_base_body(start, end, outlets, num_edges, num_terms))
    _execute(obj, run_adjacent, body)


@query.command("recommend")
@click.option("--node", "nodes", multiple=True, metavar="KIND:ID", required=True,
              help="Selected node as kind:id, e.g. entity:Q76 or term:elect; repeat per node.")
@click.option("-n", "--num-articles", default=10, show_default=True,
              type=click.IntRange(1, 100), help="Articles to return.")
@_range_options
@click.pass_obj
def query_recommend(obj: dict, nodes, num_articles, start, end, outlets, num_edges, num_terms) -> None:
    """Articles covering several of the selected nodes."""
    descriptors = []
    for spec in nodes:
        kind, sep, node_id = spec.partition(":")
        if not sep or not node_id:
            raise click.BadParameter(f"expected KIND:ID, got {spec!r}", param_hint="--node")
        try:
            descriptors.append(NodeDescriptor(kind=kind, id=node_id))
        except ValidationError:
            raise click.BadParameter(f"node kind must be entity or term, got {kind!r}", param_hint="--node")
    body = RecommendBody(nodes=descriptors, num_articles=num_articles,
                         **_base_body(start, end, outlets, num_edges, num_terms))
    _execute(obj, run_recommend, body)


@main.command()
@click.argument("store_path", metavar="STORE", type=click.Path(exists=True, dir_okay=False))
@click.option("--host", default="127.0.0.1", show_default=True, help="Bind address.")
@click.option("--port", default=8765, show_default=True, type=click.IntRange(1, 65535), help="Bind port.")
@click.option("--query-limit", default=2, show_default=True, type=click.IntRange(min=1),
              help="Maximum concurrently active queries per client.")
@click.option("--cache/--no-cache", "cache_enabled", default=True, show_default=True,
              help="Cache term-expansion rankings per context.")
@click.option("--ui-dir", type=click.Path(exists=True, file_okay=False), default=None,
              help="Directory of built UI assets to serve at /.")
def serve(store_path: str, host: str, port: int, query_limit: int, cache_enabled: bool,
          ui_dir: str | None) -> None:
    """Serve the HTTP API for the snapshot at STORE until interrupted."""
    import uvicorn

    index = _load_index(store_path)
    app = create_app(index, query_limit=query_limit, cache_enabled=cache_enabled, ui_dir=ui_dir)
    uvicorn.run(app, host=host, port=port, log_level="warning")


if __name__ == "__main__":
    main()
