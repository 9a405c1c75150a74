"""Core domain types shared across ingestion, storage, and querying."""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import date

KIND_ENTITY = "entity"
KIND_TERM = "term"

ENTITY_TYPES = frozenset({"actor", "location", "organization"})

#: Sort rank per node kind; entities order before terms in canonical pairs.
_KIND_RANK = {KIND_ENTITY: 0, KIND_TERM: 1}


class NewsgraphError(Exception):
    """Base class for all errors raised by this package."""


class CorpusFormatError(NewsgraphError):
    """A corpus record is malformed; ``field`` names the offending field."""

    def __init__(self, field_name: str, message: str):
        super().__init__(f"{field_name}: {message}")
        self.field = field_name


class EntityTypeError(CorpusFormatError):
    """An entity mention carries a type outside the three known classes."""

    def __init__(self, etype: str):
        super().__init__("type", f"unknown entity type {etype!r}")
        self.etype = etype


class DuplicateDocumentError(NewsgraphError):
    """A document id was inserted into a store twice."""


class MergeConflictError(NewsgraphError):
    """Two stores being merged share at least one document id."""


class SnapshotFormatError(NewsgraphError):
    """A snapshot file is unreadable, truncated, or of the wrong version."""


class EmptyContextError(NewsgraphError):
    """A query context matches no network data."""


class InvalidPairError(NewsgraphError):
    """A targeted query named an invalid node pair (e.g. v == w)."""


class InvalidSelectionError(NewsgraphError):
    """An article recommendation requires at least two selected nodes."""


@dataclass(frozen=True, slots=True)
class NodeRef:
    """Reference to a network node: a linked entity or a stemmed term."""

    kind: str
    id: str

    def sort_key(self) -> tuple[int, str]:
        return (_KIND_RANK[self.kind], self.id)


def entity_node(entity_id: str) -> NodeRef:
    return NodeRef(KIND_ENTITY, entity_id)


def term_node(stem: str) -> NodeRef:
    return NodeRef(KIND_TERM, stem)


def canonical_pair(a: NodeRef, b: NodeRef) -> tuple[NodeRef, NodeRef]:
    """Order an unordered node pair deterministically (entities first, then by id)."""
    if b.sort_key() < a.sort_key():
        return (b, a)
    return (a, b)


@dataclass(frozen=True, slots=True)
class EntityMention:
    """One linked entity mention, located at sentence granularity."""

    entity_id: str
    label: str
    etype: str
    sentence_index: int
    description: str | None = None


@dataclass(slots=True)
class AnnotatedDocument:
    """One news article with tokenized sentences and linked entity mentions.

    ``sentences`` is ordered; list position is the sentence index, so indices
    are contiguous from 0 by construction. Every mention's ``sentence_index``
    must be a valid position in ``sentences``.
    """

    doc_id: str
    outlet: str
    date: date
    sentences: list[list[str]]
    mentions: list[EntityMention]
    char_count: int
    url: str | None = None
    title: str | None = None

    @property
    def n_sentences(self) -> int:
        return len(self.sentences)

    def distinct_entity_ids(self) -> set[str]:
        return {m.entity_id for m in self.mentions}


@dataclass(frozen=True, slots=True)
class EdgeOccurrence:
    """One document-level cooccurrence of a canonical node pair.

    ``delta`` is the minimum sentence distance between the two nodes within
    the document; entity-term cooccurrences are intra-sentence and carry 0.
    """

    v: NodeRef
    w: NodeRef
    day: date
    outlet: str
    doc_id: str
    delta: int


@dataclass(frozen=True, slots=True)
class FilterLimits:
    """Document admission thresholds for corpus ingestion."""

    min_chars: int = 200
    max_chars: int = 20000
    max_entities: int = 100


REJECT_TOO_SHORT = "too_short"
REJECT_TOO_LONG = "too_long"
REJECT_TOO_MANY_ENTITIES = "too_many_entities"


@dataclass(frozen=True, slots=True)
class DateRange:
    """Inclusive day range ``start..end``."""

    start: date
    end: date

    def __post_init__(self):
        if self.start > self.end:
            raise ValueError(f"invalid date range: {self.start} > {self.end}")

    @property
    def length_days(self) -> int:
        return (self.end - self.start).days + 1

    def __contains__(self, day: date) -> bool:
        return self.start <= day <= self.end


@dataclass(frozen=True, slots=True)
class EdgeView:
    """Aggregate of one node pair over a date range and outlet selection.

    ``doc_count`` sums matching cell document counts, ``days_active`` counts
    distinct days with a matching cell, and ``proximity_sum`` sums the
    exp(-delta) contributions of every matching document.
    """

    pair: tuple[NodeRef, NodeRef]
    range: DateRange
    outlets: frozenset[str]
    doc_count: int
    days_active: int
    proximity_sum: float
    doc_ids: tuple[str, ...]


@dataclass(frozen=True, slots=True)
class NodeView:
    """Aggregate occurrence statistics of one node over a query context."""

    node: NodeRef
    doc_count: int
    occurrence_count: int


@dataclass(frozen=True, slots=True)
class ScoredEdge:
    """An edge view together with its ranking weight in (0, 1]."""

    view: EdgeView
    weight: float


@dataclass(slots=True)
class TopicGraph:
    """Connected topic subgraph: merged seed edges plus descriptive terms.

    ``terms`` maps a seed's canonical pair to its ranked term list; each
    entry is ``(term_node, weight)``.
    """

    entities: set[NodeRef] = field(default_factory=set)
    seed_edges: list[ScoredEdge] = field(default_factory=list)
    terms: dict[tuple[NodeRef, NodeRef], list[tuple[NodeRef, float]]] = field(default_factory=dict)
