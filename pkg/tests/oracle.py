"""Brute-force reference evaluator, computed straight from document text.

Reimplements extraction, aggregation, and scoring with plain dictionaries
and double loops, sharing no code with the package beyond the document
dataclass. Tests compare store and engine output against this evaluator.

Node keys here are plain ``(kind, id)`` tuples; ``"entity" < "term"``
sorts entities first, which matches the canonical pair order.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field
from datetime import date

from porter_reference import stem as ref_stem

ENTITY = "entity"
TERM = "term"

NodeKey = tuple[str, str]
PairKey = tuple[NodeKey, NodeKey]


def make_pair(a: NodeKey, b: NodeKey) -> PairKey:
    return (a, b) if a <= b else (b, a)


@dataclass(slots=True)
class OracleDoc:
    doc_id: str
    outlet: str
    day: date
    pair_deltas: dict[PairKey, int] = field(default_factory=dict)
    node_occurrences: dict[NodeKey, int] = field(default_factory=dict)


def _excluded_positions(sentence: list[str], labels: list[str]) -> set[int]:
    lowered = [t.lower() for t in sentence]
    excluded: set[int] = set()
    for label in labels:
        tokens = [t.lower() for t in label.split()]
        if not tokens:
            continue
        for start in range(len(lowered) - len(tokens) + 1):
            if lowered[start : start + len(tokens)] == tokens:
                excluded.update(range(start, start + len(tokens)))
    return excluded


def _sentence_terms(sentence: list[str], excluded: set[int]) -> list[str]:
    terms = []
    for pos, token in enumerate(sentence):
        if pos in excluded:
            continue
        low = token.lower()
        if len(low) < 4 or not any(c.isalnum() for c in low):
            continue
        terms.append(ref_stem(low))
    return terms


def analyze(doc, window: int = 5) -> OracleDoc:
    """Recompute one document's cooccurrences and node counts from scratch."""
    out = OracleDoc(doc_id=doc.doc_id, outlet=doc.outlet, day=doc.date)

    mention_sentences: dict[str, list[int]] = defaultdict(list)
    labels_by_sentence: dict[int, list[str]] = defaultdict(list)
    for m in doc.mentions:
        mention_sentences[m.entity_id].append(m.sentence_index)
        labels_by_sentence[m.sentence_index].append(m.label)
        key = (ENTITY, m.entity_id)
        out.node_occurrences[key] = out.node_occurrences.get(key, 0) + 1

    terms_per_sentence: list[list[str]] = []
    for idx, sentence in enumerate(doc.sentences):
        excluded = _excluded_positions(sentence, labels_by_sentence.get(idx, []))
        terms = _sentence_terms(sentence, excluded)
        terms_per_sentence.append(terms)
        for t in terms:
            key = (TERM, t)
            out.node_occurrences[key] = out.node_occurrences.get(key, 0) + 1

    ids = sorted(mention_sentences)
    for i, ea in enumerate(ids):
        for eb in ids[i + 1 :]:
            best = min(
                abs(sa - sb) for sa in mention_sentences[ea] for sb in mention_sentences[eb]
            )
            if best <= window:
                out.pair_deltas[make_pair((ENTITY, ea), (ENTITY, eb))] = best

    for idx, terms in enumerate(terms_per_sentence):
        present = [eid for eid, sents in mention_sentences.items() if idx in sents]
        for eid in present:
            for t in set(terms):
                out.pair_deltas.setdefault(make_pair((ENTITY, eid), (TERM, t)), 0)
    return out


class Oracle:
    """Query evaluator over a list of annotated documents."""

    def __init__(self, docs, window: int = 5):
        self.docs = [analyze(d, window) for d in docs]

    def _selected(self, drange, outlets) -> list[OracleDoc]:
        return [
            d
            for d in self.docs
            if drange.start <= d.day <= drange.end
            and (outlets is None or d.outlet in outlets)
        ]

    # -- aggregates -------------------------------------------------------

    def context_stats(self, drange, outlets):
        """One pass over the selected docs: per-pair stats, node doc counts, d_max.

        Returns (pair_stats, node_docs, node_occs, d_max) where pair_stats
        maps pair -> {doc_count, days_active, proximity_sum, doc_ids},
        node_docs maps node -> document count, node_occs maps node -> total
        occurrences. d_max is None when no pair is present.
        """
        acc: dict[PairKey, list] = {}
        node_docs: dict[NodeKey, int] = {}
        node_occs: dict[NodeKey, int] = {}
        for d in self._selected(drange, outlets):
            for node, occ in d.node_occurrences.items():
                node_docs[node] = node_docs.get(node, 0) + 1
                node_occs[node] = node_occs.get(node, 0) + occ
            for pair, delta in d.pair_deltas.items():
                entry = acc.setdefault(pair, [0, set(), [], []])
                entry[0] += 1
                entry[1].add(d.day)
                entry[2].append(math.exp(-delta))
                entry[3].append(d.doc_id)
        pair_stats = {
            pair: {
                "doc_count": entry[0],
                "days_active": len(entry[1]),
                "proximity_sum": math.fsum(entry[2]),
                "doc_ids": tuple(sorted(entry[3])),
            }
            for pair, entry in acc.items()
        }
        d_max = max((s["doc_count"] for s in pair_stats.values()), default=None)
        return pair_stats, node_docs, node_occs, d_max

    def omega_from(self, stats: dict, node_docs: dict, d_max: int, pair: PairKey, length_days: int) -> float:
        dv = node_docs[pair[0]]
        dw = node_docs[pair[1]]
        c_doc = (dv + dw - stats["doc_count"]) / stats["doc_count"]
        c_time = length_days / stats["days_active"]
        c_dist = d_max / stats["proximity_sum"]
        return 3.0 / (c_doc + c_time + c_dist)

    def edge_entries(self, pair: PairKey, drange, outlets) -> list[tuple[str, int]]:
        entries = [
            (d.doc_id, d.pair_deltas[pair])
            for d in self._selected(drange, outlets)
            if pair in d.pair_deltas
        ]
        entries.sort()
        return entries

    def edge_stats(self, pair: PairKey, drange, outlets) -> dict | None:
        docs = [d for d in self._selected(drange, outlets) if pair in d.pair_deltas]
        if not docs:
            return None
        return {
            "doc_count": len(docs),
            "days_active": len({d.day for d in docs}),
            "proximity_sum": math.fsum(math.exp(-d.pair_deltas[pair]) for d in docs),
            "doc_ids": tuple(sorted(d.doc_id for d in docs)),
        }

    def node_doc_count(self, node: NodeKey, drange, outlets) -> int:
        return sum(1 for d in self._selected(drange, outlets) if node in d.node_occurrences)

    def node_occ_count(self, node: NodeKey, drange, outlets) -> int:
        return sum(d.node_occurrences.get(node, 0) for d in self._selected(drange, outlets))

    def pairs_present(self, drange, outlets, kind: str = "all") -> set[PairKey]:
        pairs: set[PairKey] = set()
        for d in self._selected(drange, outlets):
            pairs.update(d.pair_deltas)
        if kind == "entity-entity":
            pairs = {p for p in pairs if p[0][0] == ENTITY and p[1][0] == ENTITY}
        elif kind == "entity-term":
            pairs = {p for p in pairs if p[1][0] == TERM}
        return pairs

    def dmax(self, drange, outlets) -> int:
        pairs = self.pairs_present(drange, outlets)
        if not pairs:
            raise ValueError("no edges in context")
        return max(self.edge_stats(p, drange, outlets)["doc_count"] for p in pairs)

    # -- scoring ----------------------------------------------------------

    def omega(self, pair: PairKey, drange, outlets, d_max: int | None = None) -> float | None:
        stats = self.edge_stats(pair, drange, outlets)
        if stats is None:
            return None
        if d_max is None:
            d_max = self.dmax(drange, outlets)
        dv = self.node_doc_count(pair[0], drange, outlets)
        dw = self.node_doc_count(pair[1], drange, outlets)
        length = (drange.end - drange.start).days + 1
        c_doc = (dv + dw - stats["doc_count"]) / stats["doc_count"]
        c_time = length / stats["days_active"]
        c_dist = d_max / stats["proximity_sum"]
        return 3.0 / (c_doc + c_time + c_dist)

    def global_ranking(self, drange, outlets, k: int) -> list[tuple[PairKey, float, int]]:
        d_max = self.dmax(drange, outlets)
        rows = []
        for pair in self.pairs_present(drange, outlets, "entity-entity"):
            stats = self.edge_stats(pair, drange, outlets)
            w = self.omega(pair, drange, outlets, d_max)
            rows.append((pair, w, stats["doc_count"]))
        rows.sort(key=lambda r: (-r[1], -r[2], r[0]))
        return rows[:k]

    def expand_terms(self, pair: PairKey, drange, outlets) -> list[tuple[str, float]]:
        d_max = self.dmax(drange, outlets)
        a, b = pair
        terms_a = {
            p[1][1]
            for p in self.pairs_present(drange, outlets, "entity-term")
            if p[0] == a
        }
        terms_b = {
            p[1][1]
            for p in self.pairs_present(drange, outlets, "entity-term")
            if p[0] == b
        }
        rows = []
        for t in terms_a & terms_b:
            w1 = self.omega(make_pair(a, (TERM, t)), drange, outlets, d_max)
            w2 = self.omega(make_pair(b, (TERM, t)), drange, outlets, d_max)
            rows.append((t, 2.0 * w1 * w2 / (w1 + w2)))
        rows.sort(key=lambda r: (-r[1], r[0]))
        return rows

    def adjacent(self, entity: NodeKey, drange, outlets) -> list[tuple[NodeKey, float, int]]:
        d_max = self.dmax(drange, outlets)
        rows = []
        for pair in self.pairs_present(drange, outlets, "entity-entity"):
            if entity not in pair:
                continue
            other = pair[1] if pair[0] == entity else pair[0]
            stats = self.edge_stats(pair, drange, outlets)
            rows.append((other, self.omega(pair, drange, outlets, d_max), stats["doc_count"]))
        rows.sort(key=lambda r: (-r[1], -r[2], r[0]))
        return rows

    def recommend(self, nodes: list[NodeKey], drange, outlets) -> list[tuple[str, int, float]]:
        distinct = []
        for n in nodes:
            if n not in distinct:
                distinct.append(n)
        rows = []
        for d in self._selected(drange, outlets):
            coverage = sum(1 for n in distinct if n in d.node_occurrences)
            if coverage < 2:
                continue
            proximity = math.fsum(
                math.exp(-d.pair_deltas[make_pair(distinct[i], distinct[j])])
                for i in range(len(distinct))
                for j in range(i + 1, len(distinct))
                if make_pair(distinct[i], distinct[j]) in d.pair_deltas
            )
            rows.append((d.doc_id, coverage, proximity))
        rows.sort(key=lambda r: (-r[1], -r[2], r[0]))
        return rows


def tie_groups(keys: list[tuple], tol: float = 1e-9) -> list[tuple[int, int]]:
    """Maximal runs of adjacent rows whose ranking keys agree within tol.

    Keys are tuples of numbers, already in ranking orientation. Returns
    (start, end) slices.
    """

    def close(a: tuple, b: tuple) -> bool:
        if len(a) != len(b):
            return False
        for x, y in zip(a, b):
            if abs(x - y) > tol * max(1.0, abs(x), abs(y)):
                return False
        return True

    groups = []
    start = 0
    for i in range(1, len(keys)):
        if not close(keys[i - 1], keys[i]):
            groups.append((start, i))
            start = i
    if keys:
        groups.append((start, len(keys)))
    return groups


def assert_ranking_matches(got: list, want: list, *, key_of, ident_of, tol: float = 1e-9, top: int | None = None):
    """Ranked-output comparison: order where keys differ, sets at ties.

    ``want`` is the full oracle ranking; ``got`` is the product's top-k
    slice. Within a tie group that straddles the k cutoff, the product's
    members must be a subset of the group; fully included groups must
    match as sets.
    """
    if top is not None:
        assert len(got) == min(top, len(want)), (len(got), top, len(want))
    want_keys = [key_of(w) for w in want]
    got_idx = 0
    for start, end in tie_groups(want_keys, tol):
        if got_idx >= len(got):
            break
        take = min(end, len(got))
        got_slice = {ident_of(g) for g in got[start:take]}
        want_group = {ident_of(w) for w in want[start:end]}
        if end <= len(got):
            assert got_slice == want_group, (got_slice, want_group)
        else:
            assert got_slice <= want_group, (got_slice, want_group)
        for g in got[start:take]:
            gk = key_of(g)
            wk = want_keys[start]
            for x, y in zip(gk, wk):
                assert abs(x - y) <= tol * max(1.0, abs(x), abs(y)), (gk, wk)
        got_idx = take
