"""Corpus parsing, document admission, and cooccurrence extraction.

The corpus is newline-delimited JSON, one document per line. Every
function here is a pure function of its inputs, so documents can be
processed in parallel without shared state.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from datetime import date
from typing import Iterable, Iterator

from .model import (
    ENTITY_TYPES,
    AnnotatedDocument,
    CorpusFormatError,
    EdgeOccurrence,
    EntityMention,
    EntityTypeError,
    FilterLimits,
    NodeRef,
    REJECT_TOO_LONG,
    REJECT_TOO_MANY_ENTITIES,
    REJECT_TOO_SHORT,
    canonical_pair,
    entity_node,
    term_node,
)
from .stemming import stem

DEFAULT_ENTITY_WINDOW = 5
MIN_TERM_LENGTH = 4

_REQUIRED_FIELDS = ("id", "outlet", "date", "char_count", "sentences", "entities")
_OPTIONAL_FIELDS = ("url", "title")
_MENTION_REQUIRED = ("sentence", "entity_id", "type", "label")
_MENTION_OPTIONAL = ("description",)


def _require_str(record: dict, field: str, allow_empty: bool = False) -> str:
    value = record.get(field)
    if not isinstance(value, str) or (not allow_empty and not value):
        raise CorpusFormatError(field, "expected a non-empty string")
    return value


def parse_document(line: str) -> AnnotatedDocument:
    """Parse one corpus record into an :class:`AnnotatedDocument`.

    Raises :class:`CorpusFormatError` naming the offending field for any
    malformed record, and :class:`EntityTypeError` for a mention whose type
    is not one of the three entity classes.
    """
    try:
        record = json.loads(line)
    except json.JSONDecodeError as exc:
        raise CorpusFormatError("record", f"invalid JSON: {exc}") from exc
    if not isinstance(record, dict):
        raise CorpusFormatError("record", "expected a JSON object")

    for field in _REQUIRED_FIELDS:
        if field not in record:
            raise CorpusFormatError(field, "missing required field")
    for field in record:
        if field not in _REQUIRED_FIELDS and field not in _OPTIONAL_FIELDS:
            raise CorpusFormatError(field, "unknown field")

    doc_id = _require_str(record, "id")
    outlet = _require_str(record, "outlet")

    try:
        day = date.fromisoformat(record["date"]) if isinstance(record["date"], str) else None
    except ValueError:
        day = None
    if day is None:
        raise CorpusFormatError("date", "expected an ISO-8601 day, e.g. 2016-11-08")

    char_count = record["char_count"]
    if not isinstance(char_count, int) or isinstance(char_count, bool) or char_count < 0:
        raise CorpusFormatError("char_count", "expected an integer >= 0")

    sentences_raw = record["sentences"]
    if not isinstance(sentences_raw, list):
        raise CorpusFormatError("sentences", "expected an array of token arrays")
    sentences: list[list[str]] = []
    for i, sent in enumerate(sentences_raw):
        if not isinstance(sent, list) or any(not isinstance(t, str) for t in sent):
            raise CorpusFormatError("sentences", f"sentence {i} is not an array of strings")
        sentences.append(list(sent))

    entities_raw = record["entities"]
    if not isinstance(entities_raw, list):
        raise CorpusFormatError("entities", "expected an array of mentions")
    mentions: list[EntityMention] = []
    for i, raw in enumerate(entities_raw):
        if not isinstance(raw, dict):
            raise CorpusFormatError("entities", f"mention {i} is not an object")
        for field in _MENTION_REQUIRED:
            if field not in raw:
                raise CorpusFormatError(field, f"missing in mention {i}")
        for field in raw:
            if field not in _MENTION_REQUIRED and field not in _MENTION_OPTIONAL:
                raise CorpusFormatError(field, f"unknown field in mention {i}")
        sentence_index = raw["sentence"]
        if not isinstance(sentence_index, int) or isinstance(sentence_index, bool):
            raise CorpusFormatError("sentence", f"mention {i}: expected an integer")
        if not 0 <= sentence_index < len(sentences):
            raise CorpusFormatError(
                "sentence",
                f"mention {i}: index {sentence_index} out of range for {len(sentences)} sentences",
            )
        etype = _require_str(raw, "type")
        if etype not in ENTITY_TYPES:
            raise EntityTypeError(etype)
        description = raw.get("description")
        if description is not None and not isinstance(description, str):
            raise CorpusFormatError("description", f"mention {i}: expected a string")
        mentions.append(
            EntityMention(
                entity_id=_require_str(raw, "entity_id"),
                label=_require_str(raw, "label"),
                etype=etype,
                sentence_index=sentence_index,
                description=description,
            )
        )

    url = record.get("url")
    if url is not None and not isinstance(url, str):
        raise CorpusFormatError("url", "expected a string")
    title = record.get("title")
    if title is not None and not isinstance(title, str):
        raise CorpusFormatError("title", "expected a string")

    return AnnotatedDocument(
        doc_id=doc_id,
        outlet=outlet,
        date=day,
        sentences=sentences,
        mentions=mentions,
        char_count=char_count,
        url=url,
        title=title,
    )


def admit_document(doc: AnnotatedDocument, limits: FilterLimits = FilterLimits()) -> str | None:
    """Return None when the document passes the corpus filters, else the rejection reason.

    Documents are rejected when shorter than ``min_chars``, longer than
    ``max_chars``, or mentioning more than ``max_entities`` distinct
    entities; all three boundaries are inclusive on the accepting side.
    """
    if doc.char_count < limits.min_chars:
        return REJECT_TOO_SHORT
    if doc.char_count > limits.max_chars:
        return REJECT_TOO_LONG
    if len(doc.distinct_entity_ids()) > limits.max_entities:
        return REJECT_TOO_MANY_ENTITIES
    return None


def _mention_token_positions(sentence: list[str], label: str) -> set[int]:
    """Positions covered by contiguous case-insensitive matches of the label tokens."""
    label_tokens = [t.lower() for t in label.split()]
    if not label_tokens:
        return set()
    lowered = [t.lower() for t in sentence]
    width = len(label_tokens)
    covered: set[int] = set()
    for start in range(len(lowered) - width + 1):
        if lowered[start : start + width] == label_tokens:
            covered.update(range(start, start + width))
    return covered


def extract_terms(doc: AnnotatedDocument) -> list[list[NodeRef]]:
    """Extract stemmed term nodes per sentence, with instance multiplicity.

    Tokens covered by an entity mention's label are excluded from the
    sentence the mention is annotated in. Remaining tokens are lowercased,
    dropped when shorter than four characters before stemming or when they
    consist only of punctuation, and stemmed otherwise.
    """
    occupied: dict[int, set[int]] = {}
    for mention in doc.mentions:
        positions = _mention_token_positions(doc.sentences[mention.sentence_index], mention.label)
        if positions:
            occupied.setdefault(mention.sentence_index, set()).update(positions)

    per_sentence: list[list[NodeRef]] = []
    for idx, sentence in enumerate(doc.sentences):
        taken = occupied.get(idx, ())
        terms: list[NodeRef] = []
        for pos, token in enumerate(sentence):
            if pos in taken:
                continue
            lowered = token.lower()
            if len(lowered) < MIN_TERM_LENGTH:
                continue
            if not any(c.isalnum() for c in lowered):
                continue
            terms.append(term_node(stem(lowered)))
        per_sentence.append(terms)
    return per_sentence


def extract_cooccurrences(
    doc: AnnotatedDocument, entity_window: int = DEFAULT_ENTITY_WINDOW
) -> list[EdgeOccurrence]:
    """Emit one occurrence per cooccurring node pair of the document.

    Entity pairs cooccur when their minimum sentence distance is at most
    ``entity_window``; entity-term pairs cooccur within a single sentence
    and carry distance 0. Each pair appears once per document, with the
    minimum distance over all mention combinations.
    """
    if entity_window < 1:
        raise ValueError("entity_window must be >= 1")

    entity_sentences: dict[str, list[int]] = {}
    for mention in doc.mentions:
        entity_sentences.setdefault(mention.entity_id, []).append(mention.sentence_index)
    for positions in entity_sentences.values():
        positions.sort()

    occurrences: dict[tuple[NodeRef, NodeRef], int] = {}

    entity_ids = sorted(entity_sentences)
    for i, eid_a in enumerate(entity_ids):
        pos_a = entity_sentences[eid_a]
        for eid_b in entity_ids[i + 1 :]:
            delta = _min_distance(pos_a, entity_sentences[eid_b])
            if delta <= entity_window:
                pair = canonical_pair(entity_node(eid_a), entity_node(eid_b))
                occurrences[pair] = delta

    terms = extract_terms(doc)
    for sentence_index, sentence_terms in enumerate(terms):
        if not sentence_terms:
            continue
        present = {
            eid for eid, positions in entity_sentences.items() if sentence_index in set(positions)
        }
        for eid in present:
            for term in set(sentence_terms):
                pair = canonical_pair(entity_node(eid), term)
                occurrences.setdefault(pair, 0)

    return [
        EdgeOccurrence(v=v, w=w, day=doc.date, outlet=doc.outlet, doc_id=doc.doc_id, delta=delta)
        for (v, w), delta in sorted(occurrences.items(), key=lambda item: (item[0][0].sort_key(), item[0][1].sort_key()))
    ]


def _min_distance(a: list[int], b: list[int]) -> int:
    """Minimum absolute difference between two sorted position lists."""
    best = abs(a[0] - b[0])
    i = j = 0
    while i < len(a) and j < len(b):
        diff = a[i] - b[j]
        if abs(diff) < best:
            best = abs(diff)
        if best == 0:
            return 0
        if diff < 0:
            i += 1
        else:
            j += 1
    return best


def node_occurrences(doc: AnnotatedDocument) -> dict[NodeRef, int]:
    """Count node occurrences in a document: mentions for entities, token instances for terms."""
    counts: dict[NodeRef, int] = {}
    for mention in doc.mentions:
        node = entity_node(mention.entity_id)
        counts[node] = counts.get(node, 0) + 1
    for sentence_terms in extract_terms(doc):
        for term in sentence_terms:
            counts[term] = counts.get(term, 0) + 1
    return counts


@dataclass(slots=True)
class ParsedLine:
    """Outcome of parsing one corpus line: a document or a parse error."""

    line_no: int
    doc: AnnotatedDocument | None = None
    error: CorpusFormatError | None = None


def read_corpus(lines: Iterable[str]) -> Iterator[ParsedLine]:
    """Parse a corpus stream line by line, yielding documents and errors."""
    for line_no, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            yield ParsedLine(line_no=line_no, doc=parse_document(line))
        except CorpusFormatError as exc:
            yield ParsedLine(line_no=line_no, error=exc)
