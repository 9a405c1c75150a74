"""Edge scoring and topic exploration over a frozen network index.

All query modes share one weight function over date-range/outlet contexts:
three penalty components (document support, temporal concentration,
sentence proximity), each at least 1, harmonically combined so the weight
lands in (0, 1]. Ties break deterministically by document count, then
canonical node or pair order.
"""

from __future__ import annotations

import threading
from collections import OrderedDict
from dataclasses import dataclass
from datetime import date
from typing import Iterable, Sequence

import numpy as np

from .model import (
    KIND_ENTITY,
    KIND_TERM,
    DateRange,
    EmptyContextError,
    InvalidPairError,
    InvalidSelectionError,
    NodeRef,
    ScoredEdge,
    TopicGraph,
    canonical_pair,
)
from .store import FrozenIndex

_CTX_MEMO_LIMIT = 128


@dataclass(frozen=True, slots=True)
class QueryContext:
    """One query's scope: date range, outlet filter, and result sizes.

    ``outlets=None`` means no outlet restriction. ``d_max`` pins the
    context's maximum edge document count instead of computing it, which
    keeps weights comparable across follow-up queries on a subgraph.
    """

    range: DateRange
    outlets: frozenset[str] | None = None
    num_edges: int = 10
    num_terms: int = 10
    d_max: int | None = None

    def key(self) -> tuple:
        outlets = None if self.outlets is None else tuple(sorted(self.outlets))
        return (self.range.start.toordinal(), self.range.end.toordinal(), outlets, self.d_max)


@dataclass(slots=True)
class _CtxStats:
    d_max: int
    node_docs: np.ndarray


@dataclass(frozen=True, slots=True)
class ArticleRec:
    """One recommended article with its selection-coverage evidence."""

    doc_id: str
    date: date
    outlet: str
    coverage: int
    proximity: float
    url: str | None = None
    title: str | None = None


@dataclass(slots=True)
class CacheStats:
    hits: int = 0
    misses: int = 0

    def as_dict(self) -> dict[str, int | float]:
        total = self.hits + self.misses
        return {
            "hits": self.hits,
            "misses": self.misses,
            "hit_rate": (self.hits / total) if total else 0.0,
        }


class TopicEngine:
    """Query-side scoring engine bound to one immutable index snapshot.

    The engine memoizes per-context statistics (maximum edge document
    count and per-node document counts) and, when enabled, caches full
    term-expansion rankings keyed by pair and context. Rebuild the engine
    after the underlying store changes.
    """

    def __init__(self, index: FrozenIndex, *, cache_enabled: bool = True):
        self.index = index
        self.cache_enabled = cache_enabled
        self._ctx_memo: OrderedDict[tuple, _CtxStats] = OrderedDict()
        self._ctx_lock = threading.Lock()
        self._term_cache: dict[tuple, tuple[tuple[int, float], ...]] = {}
        self._term_lock = threading.Lock()
        self._term_stats = CacheStats()

    # -- context statistics ------------------------------------------------

    def _ctx_stats(self, ctx: QueryContext) -> _CtxStats:
        key = ctx.key()
        with self._ctx_lock:
            stats = self._ctx_memo.get(key)
            if stats is not None:
                self._ctx_memo.move_to_end(key)
                return stats
        index = self.index
        rows = index.edge_rows_in(ctx.range, ctx.outlets)
        if not len(rows):
            raise EmptyContextError(
                f"no edges between {ctx.range.start.isoformat()} and {ctx.range.end.isoformat()}"
            )
        if ctx.d_max is not None:
            d_max = ctx.d_max
        else:
            _, d_e, _, _ = index.group_edge_stats(rows)
            d_max = int(d_e.max())
        node_docs = index.node_doc_counts(index.node_rows_in(ctx.range, ctx.outlets))
        stats = _CtxStats(d_max=d_max, node_docs=node_docs)
        with self._ctx_lock:
            self._ctx_memo[key] = stats
            if len(self._ctx_memo) > _CTX_MEMO_LIMIT:
                self._ctx_memo.popitem(last=False)
        return stats

    def compute_dmax(self, ctx: QueryContext) -> int:
        """Maximum edge document count over all edges in the context."""
        return self._ctx_stats(ctx).d_max

    # -- weights -------------------------------------------------------------

    @staticmethod
    def _omega(d_e, t_e, delta_e, dv, dw, length_days: int, d_max: int):
        c_doc = (dv + dw - d_e) / d_e
        c_time = length_days / t_e
        c_dist = d_max / delta_e
        return 3.0 / (c_doc + c_time + c_dist)

    def edge_weight(self, view, ctx: QueryContext) -> float:
        """Weight of one aggregated edge view within the context."""
        stats = self._ctx_stats(ctx)
        index = self.index
        dv = int(stats.node_docs[index.node_index[view.pair[0]]])
        dw = int(stats.node_docs[index.node_index[view.pair[1]]])
        return float(
            self._omega(
                view.doc_count,
                view.days_active,
                view.proximity_sum,
                dv,
                dw,
                ctx.range.length_days,
                stats.d_max,
            )
        )

    # -- exploration modes -----------------------------------------------------

    def global_edge_ranking(self, ctx: QueryContext) -> list[ScoredEdge]:
        """Top entity-entity edges over the whole context, strongest first."""
        index = self.index
        stats = self._ctx_stats(ctx)
        rows = index.edge_rows_in(ctx.range, ctx.outlets)
        if len(rows):
            rows = rows[index.pair_is_ee[index.e_pair[rows]]]
        upairs, d_e, delta_e, t_e = index.group_edge_stats(rows)
        if not len(upairs):
            return []
        dv = stats.node_docs[index.pair_a[upairs]]
        dw = stats.node_docs[index.pair_b[upairs]]
        weights = self._omega(d_e, t_e, delta_e, dv, dw, ctx.range.length_days, stats.d_max)
        order = np.lexsort((index.pair_rank[upairs], -d_e, -weights))[: ctx.num_edges]
        return self._scored_edges(upairs[order], weights[order], ctx)

    def targeted_edge(self, a: NodeRef, b: NodeRef, ctx: QueryContext) -> ScoredEdge | None:
        """The single edge between two chosen entities, or None if absent."""
        if a.kind != KIND_ENTITY or b.kind != KIND_ENTITY:
            raise InvalidPairError("targeted edges connect two entities")
        if a == b:
            raise InvalidPairError(f"entity pair must be distinct, got {a.id!r} twice")
        pair_id = self.index.resolve_pair((a, b))
        if pair_id is None:
            return None
        view = self.index.edge_view_by_id(pair_id, ctx.range, ctx.outlets)
        if view is None:
            return None
        return ScoredEdge(view=view, weight=self.edge_weight(view, ctx))

    def expand_terms(self, a: NodeRef, b: NodeRef, ctx: QueryContext) -> list[tuple[NodeRef, float]]:
        """Terms cooccurring with both entities, scored by the harmonic mean
        of the two entity-term edge weights, strongest first.

        The full ranking is cached per (pair, context) when caching is
        enabled; ``num_terms`` only slices the cached list.
        """
        if a.kind != KIND_ENTITY or b.kind != KIND_ENTITY:
            raise InvalidPairError("term expansion needs an entity pair")
        if a == b:
            raise InvalidPairError(f"entity pair must be distinct, got {a.id!r} twice")
        v, w = canonical_pair(a, b)
        index = self.index
        va = index.node_index.get(v)
        wb = index.node_index.get(w)
        if va is None or wb is None:
            return []

        cache_key = (va, wb, ctx.key())
        if self.cache_enabled:
            with self._term_lock:
                cached = self._term_cache.get(cache_key)
                if cached is not None:
                    self._term_stats.hits += 1
                else:
                    self._term_stats.misses += 1
            if cached is not None:
                return self._materialize_terms(cached, ctx.num_terms)

        ranking = self._compute_term_ranking(va, wb, ctx)
        if self.cache_enabled:
            with self._term_lock:
                self._term_cache[cache_key] = ranking
        return self._materialize_terms(ranking, ctx.num_terms)

    def _materialize_terms(self, ranking: tuple[tuple[int, float], ...], limit: int) -> list[tuple[NodeRef, float]]:
        nodes = self.index.nodes
        return [(nodes[nid], score) for nid, score in ranking[: max(limit, 0)]]

    def _term_edge_stats(self, node_id: int, ctx: QueryContext):
        """Per-term edge statistics for one entity's term neighborhood."""
        index = self.index
        s, e = index.adj_node_off[node_id], index.adj_node_off[node_id + 1]
        others = index.adj_other[s:e]
        pairs = index.adj_pair[s:e]
        mask = index.node_kind[others] == 1
        rows = index.pairs_rows(pairs[mask], ctx.range, ctx.outlets)
        upairs, d_e, delta_e, t_e = index.group_edge_stats(rows)
        terms = np.where(index.pair_a[upairs] == node_id, index.pair_b[upairs], index.pair_a[upairs])
        order = np.argsort(terms)
        return terms[order], d_e[order], delta_e[order], t_e[order]

    def _compute_term_ranking(self, va: int, wb: int, ctx: QueryContext) -> tuple[tuple[int, float], ...]:
        index = self.index
        stats = self._ctx_stats(ctx)
        terms_v, d_v, delta_v, t_v = self._term_edge_stats(va, ctx)
        terms_w, d_w, delta_w, t_w = self._term_edge_stats(wb, ctx)
        common = np.intersect1d(terms_v, terms_w)
        if not len(common):
            return ()
        iv = np.searchsorted(terms_v, common)
        iw = np.searchsorted(terms_w, common)
        length = ctx.range.length_days
        dv = int(stats.node_docs[va])
        dw = int(stats.node_docs[wb])
        dt = stats.node_docs[common]
        w1 = self._omega(d_v[iv], t_v[iv], delta_v[iv], dv, dt, length, stats.d_max)
        w2 = self._omega(d_w[iw], t_w[iw], delta_w[iw], dw, dt, length, stats.d_max)
        score = 2.0 * w1 * w2 / (w1 + w2)
        order = np.lexsort((index.node_rank[common], -score))
        return tuple((int(common[i]), float(score[i])) for i in order)

    def adjacent_entities(self, entity: NodeRef, ctx: QueryContext) -> list[ScoredEdge]:
        """Entities cooccurring with the given one, ranked by the weight of
        the connecting edge; ties by document count, then entity id."""
        if entity.kind != KIND_ENTITY:
            raise InvalidPairError("adjacency expansion starts from an entity")
        index = self.index
        nid = index.node_index.get(entity)
        if nid is None:
            return []
        stats = self._ctx_stats(ctx)
        s, e = index.adj_node_off[nid], index.adj_node_off[nid + 1]
        others = index.adj_other[s:e]
        pairs = index.adj_pair[s:e]
        mask = index.node_kind[others] == 0
        rows = index.pairs_rows(pairs[mask], ctx.range, ctx.outlets)
        upairs, d_e, delta_e, t_e = index.group_edge_stats(rows)
        if not len(upairs):
            return []
        other = np.where(index.pair_a[upairs] == nid, index.pair_b[upairs], index.pair_a[upairs])
        dv = int(stats.node_docs[nid])
        dw = stats.node_docs[other]
        weights = self._omega(d_e, t_e, delta_e, dv, dw, ctx.range.length_days, stats.d_max)
        order = np.lexsort((index.node_rank[other], -d_e, -weights))[: ctx.num_edges]
        return self._scored_edges(upairs[order], weights[order], ctx)

    def recommend_articles(
        self, nodes: Sequence[NodeRef], ctx: QueryContext, limit: int = 10
    ) -> list[ArticleRec]:
        """Articles covering at least two selected nodes, ranked by how many
        they cover, then by summed pairwise proximity, then by article id."""
        unique: list[NodeRef] = []
        seen: set[NodeRef] = set()
        for node in nodes:
            if node not in seen:
                seen.add(node)
                unique.append(node)
        if len(unique) < 2:
            raise InvalidSelectionError("article recommendation needs at least two distinct nodes")
        index = self.index
        ids = [index.node_index.get(node) for node in unique]
        n_docs = len(index.doc_ids)
        coverage = np.zeros(n_docs, dtype=np.int64)
        for nid in ids:
            if nid is None:
                continue
            doc_idx = index.node_docs_in(nid, ctx.range, ctx.outlets)
            np.add.at(coverage, doc_idx, 1)
        proximity = np.zeros(n_docs, dtype=np.float64)
        known = sorted(nid for nid in ids if nid is not None)
        for i, na in enumerate(known):
            for nb in known[i + 1 :]:
                pair_id = index.pair_lookup.get((na, nb))
                if pair_id is None:
                    pair_id = index.pair_lookup.get((nb, na))
                if pair_id is None:
                    continue
                doc_idx, prox = index.edge_doc_proximity(pair_id, ctx.range, ctx.outlets)
                np.add.at(proximity, doc_idx, prox)
        cands = np.nonzero(coverage >= 2)[0]
        if not len(cands):
            return []
        order = np.lexsort((cands, -proximity[cands], -coverage[cands]))[: max(limit, 0)]
        picked = cands[order]
        recs = []
        for di in picked:
            di = int(di)
            url, title = index.doc_extra.get(di, (None, None))
            recs.append(
                ArticleRec(
                    doc_id=index.doc_ids[di],
                    date=date.fromordinal(int(index.doc_day[di])),
                    outlet=index.outlets[int(index.doc_out[di])],
                    coverage=int(coverage[di]),
                    proximity=float(proximity[di]),
                    url=url,
                    title=title,
                )
            )
        return recs

    # -- topic assembly ----------------------------------------------------

    def merge_topics(
        self,
        seeds: Sequence[ScoredEdge],
        terms: dict[tuple[NodeRef, NodeRef], list[tuple[NodeRef, float]]],
    ) -> list[TopicGraph]:
        """Group seed edges into connected components over shared entities.

        Components come back in order of their first (highest-ranked) seed;
        each keeps its seeds in rank order.
        """
        parent: dict[NodeRef, NodeRef] = {}

        def find(x: NodeRef) -> NodeRef:
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for edge in seeds:
            v, w = edge.view.pair
            parent.setdefault(v, v)
            parent.setdefault(w, w)
            rv, rw = find(v), find(w)
            if rv != rw:
                parent[rw] = rv

        groups: OrderedDict[NodeRef, list[ScoredEdge]] = OrderedDict()
        for edge in seeds:
            root = find(edge.view.pair[0])
            groups.setdefault(root, []).append(edge)

        topics = []
        for group in groups.values():
            entities = set()
            topic_terms = {}
            for edge in group:
                pair = edge.view.pair
                entities.update(pair)
                if pair in terms:
                    topic_terms[pair] = terms[pair]
            topics.append(TopicGraph(entities=entities, seed_edges=list(group), terms=topic_terms))
        return topics

    def build_topics(self, seeds: Sequence[ScoredEdge], ctx: QueryContext) -> list[TopicGraph]:
        """Expand every seed edge with terms, then merge into topic graphs."""
        terms = {}
        for edge in seeds:
            v, w = edge.view.pair
            expansion = self.expand_terms(v, w, ctx)
            if expansion:
                terms[(v, w)] = expansion
        return self.merge_topics(seeds, terms)

    # -- helpers ---------------------------------------------------------------

    def _scored_edges(self, pair_ids: Iterable[int], weights: Iterable[float], ctx: QueryContext) -> list[ScoredEdge]:
        out = []
        for pid, weight in zip(pair_ids, weights):
            view = self.index.edge_view_by_id(int(pid), ctx.range, ctx.outlets)
            if view is not None:
                out.append(ScoredEdge(view=view, weight=float(weight)))
        return out

    # -- cache control -------------------------------------------------------

    def cache_stats(self) -> dict[str, int | float]:
        with self._term_lock:
            stats = self._term_stats.as_dict()
            stats["entries"] = len(self._term_cache)
        return stats

    def invalidate_cache(self) -> None:
        """Drop cached term rankings and reset hit/miss counters."""
        with self._term_lock:
            self._term_cache.clear()
            self._term_stats = CacheStats()

    def metrics(self) -> dict:
        return {"cells_read": self.index.cells_read, "term_cache": self.cache_stats()}
