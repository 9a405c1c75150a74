"""Entity-centric topic exploration over partially aggregated news networks."""

from .engine import ArticleRec, QueryContext, TopicEngine
from .ingest import (
    DEFAULT_ENTITY_WINDOW,
    admit_document,
    extract_cooccurrences,
    extract_terms,
    node_occurrences,
    parse_document,
    read_corpus,
)
from .model import (
    AnnotatedDocument,
    CorpusFormatError,
    DateRange,
    DuplicateDocumentError,
    EdgeOccurrence,
    EdgeView,
    EmptyContextError,
    EntityMention,
    FilterLimits,
    InvalidPairError,
    InvalidSelectionError,
    MergeConflictError,
    NewsgraphError,
    NodeRef,
    NodeView,
    ScoredEdge,
    SnapshotFormatError,
    TopicGraph,
    canonical_pair,
    entity_node,
    term_node,
)
from .service import ClientBudgetRegistry, EntitySuggestion, create_app, suggest_entities
from .stemming import stem
from .store import FrozenIndex, NetworkStore, merge_stores

__version__ = "0.1.0"

__all__ = [
    "AnnotatedDocument",
    "ArticleRec",
    "ClientBudgetRegistry",
    "CorpusFormatError",
    "DEFAULT_ENTITY_WINDOW",
    "DateRange",
    "DuplicateDocumentError",
    "EdgeOccurrence",
    "EdgeView",
    "EmptyContextError",
    "EntityMention",
    "EntitySuggestion",
    "FilterLimits",
    "FrozenIndex",
    "InvalidPairError",
    "InvalidSelectionError",
    "MergeConflictError",
    "NetworkStore",
    "NewsgraphError",
    "NodeRef",
    "NodeView",
    "QueryContext",
    "ScoredEdge",
    "SnapshotFormatError",
    "TopicEngine",
    "TopicGraph",
    "admit_document",
    "canonical_pair",
    "create_app",
    "entity_node",
    "extract_cooccurrences",
    "extract_terms",
    "merge_stores",
    "node_occurrences",
    "parse_document",
    "read_corpus",
    "stem",
    "suggest_entities",
    "term_node",
    "__version__",
]
