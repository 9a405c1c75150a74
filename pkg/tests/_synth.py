"""Seeded synthetic corpora plus a large directly-built index.

Small corpora go through the real parse/admit/extract pipeline so tests
exercise the same code path as the CLI. The performance fixture skips
text entirely and fabricates index columns, because a million-cell
corpus would dominate the test run with tokenization.
"""

from __future__ import annotations

import json
from datetime import date, timedelta

import numpy as np

from newsgraph.ingest import (
    DEFAULT_ENTITY_WINDOW,
    admit_document,
    extract_cooccurrences,
    parse_document,
)
from newsgraph.model import FilterLimits, NodeRef
from newsgraph.store import EntityInfo, FrozenIndex, NetworkStore

WORD_POOL = [
    "relations", "national", "agreement", "conditional", "operations",
    "political", "engineering", "statement", "possibly", "controlled",
    "generalization", "economy", "हिन्दी", "election", "manifesto",
    "negotiation", "sensational", "triplicate", "dependency", "formalize",
    "happiness", "arguing", "borders", "crisis", "ministers", "protest",
    "analysts", "marked", "deputies", "sanctions", "pipeline", "budget",
    "aviation", "responded", "allegations", "tribunal", "verdict",
    "exports", "refinery", "stability", "coalition", "mandate",
    "subsidies", "turnout", "ballots", "recount", "inquiry", "hearings",
]
SHORT_WORDS = ["a", "an", "of", "to", "the", "in", "on", "is", "as", "by"]
PUNCT = [",", ".", ";", "!", "?"]
LABEL_WORDS = [
    "Northwind", "Meridian", "Caldera", "Vantage", "Orchard", "Pinnacle",
    "Harbor", "Council", "Summit", "Province", "Ministry", "Accord",
]
ETYPES = ["actor", "organization", "location"]


def make_entities(rng: np.random.Generator, count: int) -> list[dict]:
    entities = []
    for i in range(count):
        n_tokens = int(rng.integers(1, 3))
        tokens = [LABEL_WORDS[int(rng.integers(0, len(LABEL_WORDS)))] for _ in range(n_tokens)]
        # suffix keeps labels distinct without inventing new words
        entities.append(
            {
                "entity_id": f"E{i:03d}",
                "label": " ".join(tokens) + f" {i:03d}",
                "type": ETYPES[i % len(ETYPES)],
                "description": f"synthetic entity {i}" if i % 3 == 0 else None,
            }
        )
    return entities


def _random_sentence(rng: np.random.Generator) -> list[str]:
    n = int(rng.integers(4, 15))
    tokens = []
    for _ in range(n):
        roll = rng.random()
        if roll < 0.6:
            tokens.append(WORD_POOL[int(rng.integers(0, len(WORD_POOL)))])
        elif roll < 0.85:
            tokens.append(SHORT_WORDS[int(rng.integers(0, len(SHORT_WORDS)))])
        else:
            tokens.append(PUNCT[int(rng.integers(0, len(PUNCT)))])
    return tokens


def random_doc(
    rng: np.random.Generator,
    doc_num: int,
    entities: list[dict],
    outlets: list[str],
    start: date,
    n_days: int,
) -> dict:
    sentences = [_random_sentence(rng) for _ in range(int(rng.integers(3, 13)))]
    n_mentioned = min(int(rng.integers(2, 9)), len(entities))
    chosen = rng.choice(len(entities), size=n_mentioned, replace=False)
    mentions = []
    for ei in chosen:
        ent = entities[int(ei)]
        for _ in range(int(rng.integers(1, 4))):
            si = int(rng.integers(0, len(sentences)))
            mention = {
                "sentence": si,
                "entity_id": ent["entity_id"],
                "type": ent["type"],
                "label": ent["label"],
            }
            if ent["description"] is not None:
                mention["description"] = ent["description"]
            mentions.append(mention)
            if rng.random() < 0.7:
                # plant the label tokens so exclusion has something to strip
                tokens = ent["label"].split()
                pos = int(rng.integers(0, len(sentences[si]) + 1))
                sentences[si][pos:pos] = tokens
            if rng.random() < 0.2:
                # scatter one label token into another sentence; it stays a term
                other = int(rng.integers(0, len(sentences)))
                if other != si:
                    sentences[other].append(ent["label"].split()[0])
    record = {
        "id": f"doc{doc_num:05d}",
        "outlet": outlets[int(rng.integers(0, len(outlets)))],
        "date": (start + timedelta(days=int(rng.integers(0, n_days)))).isoformat(),
        "char_count": int(rng.integers(200, 4001)),
        "sentences": sentences,
        "entities": mentions,
    }
    if rng.random() < 0.3:
        record["url"] = f"https://example.test/{doc_num}"
    if rng.random() < 0.3:
        record["title"] = f"Synthetic story {doc_num}"
    return record


def random_corpus(
    seed: int,
    n_docs: int,
    n_entities: int = 30,
    outlets: tuple[str, ...] = ("wire", "daily", "herald", "tribune"),
    n_days: int = 30,
    start: date = date(2021, 3, 1),
) -> list[dict]:
    rng = np.random.default_rng(seed)
    entities = make_entities(rng, n_entities)
    return [
        random_doc(rng, i, entities, list(outlets), start, n_days) for i in range(n_docs)
    ]


def corpus_lines(records: list[dict]) -> str:
    return "".join(json.dumps(r, ensure_ascii=False) + "\n" for r in records)


def parse_records(records: list[dict], limits: FilterLimits = FilterLimits()) -> list:
    """Parsed documents that pass admission, in corpus order."""
    docs = []
    for record in records:
        doc = parse_document(json.dumps(record, ensure_ascii=False))
        if admit_document(doc, limits) is None:
            docs.append(doc)
    return docs


def build_store(
    records: list[dict],
    window: int = DEFAULT_ENTITY_WINDOW,
    limits: FilterLimits = FilterLimits(),
) -> NetworkStore:
    store = NetworkStore()
    for doc in parse_records(records, limits):
        store.insert_document(extract_cooccurrences(doc, window), doc)
    return store


# -- large fixture for the performance criterion ---------------------------


def synth_big_index(
    seed: int = 7,
    n_entities: int = 2000,
    n_terms: int = 20000,
    n_days: int = 180,
    n_outlets: int = 5,
    n_ee_pairs: int = 30000,
    n_et_pairs: int = 50000,
    cell_draws: int = 1_150_000,
    docs_per_bucket: int = 40,
) -> tuple[FrozenIndex, dict]:
    """Fabricate index columns directly: >= 1M edge cells, vectorized.

    Node cells are the union of incident edge-cell documents, so node
    document counts dominate edge counts the way real extraction
    guarantees. Returns the index plus ids useful for targeted queries.
    """
    rng = np.random.default_rng(seed)
    start_ord = date(2025, 1, 1).toordinal()

    nodes = [NodeRef("entity", f"e{i:04d}") for i in range(n_entities)]
    nodes += [NodeRef("term", f"t{i:05d}") for i in range(n_terms)]
    entity_info = {
        i: EntityInfo(label=f"Entity {i:04d}", etype=ETYPES[i % 3]) for i in range(n_entities)
    }
    outlets = [f"outlet{i}" for i in range(n_outlets)]

    # entity-entity pairs: a < b over entity node ids, deduplicated
    ee_a = rng.integers(0, n_entities, n_ee_pairs * 2)
    ee_b = rng.integers(0, n_entities, n_ee_pairs * 2)
    lo, hi = np.minimum(ee_a, ee_b), np.maximum(ee_a, ee_b)
    keep = lo != hi
    uniq = np.unique(lo[keep] * n_entities + hi[keep])[:n_ee_pairs]
    ee_pairs = np.stack([uniq // n_entities, uniq % n_entities], axis=1)

    # one guaranteed-dense pair sharing a block of terms for expansion
    ea, eb = int(ee_pairs[0, 0]), int(ee_pairs[0, 1])
    shared_terms = np.arange(100)

    et_e = rng.integers(0, n_entities, n_et_pairs * 2)
    et_t = rng.integers(0, n_terms, n_et_pairs * 2)
    uniq_et = np.unique(et_e * n_terms + et_t)[: n_et_pairs - 2 * len(shared_terms)]
    et_pairs = np.stack([uniq_et // n_terms, n_entities + uniq_et % n_terms], axis=1)
    forced = np.concatenate(
        [
            np.stack([np.full(len(shared_terms), ea), n_entities + shared_terms], axis=1),
            np.stack([np.full(len(shared_terms), eb), n_entities + shared_terms], axis=1),
        ]
    )
    et_all = np.unique(np.concatenate([et_pairs, forced]), axis=0)

    pair_a = np.concatenate([ee_pairs[:, 0], et_all[:, 0]])
    pair_b = np.concatenate([ee_pairs[:, 1], et_all[:, 1]])
    n_pairs = len(pair_a)
    forced_pair_rows = np.nonzero(
        ((pair_a == ea) | (pair_a == eb)) & (pair_b >= n_entities + 0) & (pair_b < n_entities + 100)
    )[0]
    ee_target_row = np.nonzero((pair_a == ea) & (pair_b == eb))[0]

    # cell draws: random (pair, day, outlet), deduplicated via composite key
    draw_pair = rng.integers(0, n_pairs, cell_draws)
    # make sure the demo pair and its term edges appear on plenty of days
    boost = np.concatenate([np.repeat(ee_target_row, 400), np.repeat(forced_pair_rows, 8)])
    draw_pair = np.concatenate([draw_pair, boost])
    n_draw = len(draw_pair)
    draw_day = rng.integers(0, n_days, n_draw)
    draw_out = rng.integers(0, n_outlets, n_draw)
    key = (draw_pair * n_days + draw_day) * n_outlets + draw_out
    ukey = np.unique(key)
    e_pair = ukey // (n_days * n_outlets)
    e_day = start_ord + (ukey // n_outlets) % n_days
    e_out = ukey % n_outlets

    n_cells = len(ukey)
    day_off = (ukey // n_outlets) % n_days
    bucket = (day_off * n_outlets + e_out) * docs_per_bucket
    e_doc = bucket + rng.integers(0, docs_per_bucket, n_cells)
    e_delta = rng.integers(0, 6, n_cells)
    e_doc_off = np.arange(n_cells + 1, dtype=np.int64)

    # node cells: union of incident docs per (node, day, outlet)
    n_docs = n_days * n_outlets * docs_per_bucket
    stacked_node = np.concatenate([pair_a[e_pair], pair_b[e_pair]])
    stacked_day = np.concatenate([day_off, day_off])
    stacked_out = np.concatenate([e_out, e_out])
    stacked_doc = np.concatenate([e_doc, e_doc])
    nkey = (
        ((stacked_node * n_days + stacked_day) * n_outlets + stacked_out) * n_docs + stacked_doc
    )
    unkey = np.unique(nkey)
    n_doc_idx = unkey % n_docs
    cell_of = unkey // n_docs
    n_node = cell_of // (n_days * n_outlets)
    n_day = start_ord + (cell_of // n_outlets) % n_days
    n_out = cell_of % n_outlets
    cell_bounds = np.nonzero(np.diff(cell_of))[0] + 1
    starts = np.concatenate([[0], cell_bounds])
    n_doc_off = np.concatenate([starts, [len(unkey)]]).astype(np.int64)
    n_node = n_node[starts]
    n_day = n_day[starts]
    n_out = n_out[starts]
    n_doc_occ = np.ones(len(unkey), dtype=np.int64)

    doc_ids = [f"d{i:06d}" for i in range(n_docs)]
    doc_day = start_ord + np.arange(n_docs) // (n_outlets * docs_per_bucket)
    doc_out = (np.arange(n_docs) // docs_per_bucket) % n_outlets

    index = FrozenIndex(
        nodes=nodes,
        entity_info=entity_info,
        outlets=outlets,
        pair_a=pair_a.astype(np.int64),
        pair_b=pair_b.astype(np.int64),
        e_pair=e_pair.astype(np.int64),
        e_day=e_day.astype(np.int64),
        e_out=e_out.astype(np.int64),
        e_doc_off=e_doc_off,
        e_doc_idx=e_doc.astype(np.int64),
        e_doc_delta=e_delta.astype(np.int64),
        n_node=n_node.astype(np.int64),
        n_day=n_day.astype(np.int64),
        n_out=n_out.astype(np.int64),
        n_doc_off=n_doc_off,
        n_doc_idx=n_doc_idx.astype(np.int64),
        n_doc_occ=n_doc_occ,
        doc_ids=doc_ids,
        doc_day=doc_day.astype(np.int64),
        doc_out=doc_out.astype(np.int64),
        doc_extra={},
    )
    meta = {
        "entity_a": f"e{ea:04d}",
        "entity_b": f"e{eb:04d}",
        "start": date.fromordinal(start_ord),
        "end": date.fromordinal(start_ord + n_days - 1),
        "cells": n_cells,
    }
    return index, meta
