"""Partially aggregated cooccurrence network storage.

The network keeps at most one edge cell per (node pair, day, outlet) and
one node cell per (node, day, outlet). Each cell carries the contributing
documents, so any date-range/outlet aggregate can be recomputed exactly
and cheaply at query time.

Writes go through :class:`NetworkStore` (single writer); reads go through
an immutable :class:`FrozenIndex` snapshot rebuilt on demand after
mutations, so concurrent readers always see consistent cells.
"""

from __future__ import annotations

import json
import math
import threading
from bisect import insort
from dataclasses import dataclass
from datetime import date
from pathlib import Path
from typing import Iterable, Iterator

import numpy as np

from .ingest import node_occurrences
from .model import (
    KIND_ENTITY,
    KIND_TERM,
    AnnotatedDocument,
    DateRange,
    DuplicateDocumentError,
    EdgeOccurrence,
    EdgeView,
    MergeConflictError,
    NodeRef,
    NodeView,
    SnapshotFormatError,
    canonical_pair,
)

SNAPSHOT_FORMAT = "newsgraph-store"
SNAPSHOT_VERSION = 1

KIND_CODES = {KIND_ENTITY: 0, KIND_TERM: 1}
KIND_NAMES = (KIND_ENTITY, KIND_TERM)

EDGE_KIND_EE = "entity-entity"
EDGE_KIND_ET = "entity-term"
EDGE_KIND_ALL = "all"


@dataclass(slots=True)
class EntityInfo:
    """Display metadata for an entity node, captured at first sight."""

    label: str
    etype: str
    description: str | None = None


@dataclass(frozen=True, slots=True)
class DocInfo:
    """Registry entry for one ingested document."""

    day: int
    outlet_id: int
    url: str | None = None
    title: str | None = None


def _dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


class NetworkStore:
    """Mutable ingest-side store of partially aggregated cells.

    Cells map (pair, day, outlet) to the sorted list of contributing
    (doc_id, min_distance) entries; the exp(-distance) sum is derived from
    that list, never accumulated, so merge order and snapshot round-trips
    cannot drift.
    """

    def __init__(self):
        self._lock = threading.RLock()
        self._nodes: dict[NodeRef, int] = {}
        self._node_list: list[NodeRef] = []
        self._entity_info: dict[int, EntityInfo] = {}
        self._outlets: dict[str, int] = {}
        self._outlet_list: list[str] = []
        self._pairs: dict[tuple[int, int], int] = {}
        self._pair_list: list[tuple[int, int]] = []
        # (pair_id, day_ordinal, outlet_id) -> sorted [(doc_id, delta)]
        self._edge_cells: dict[tuple[int, int, int], list[tuple[str, int]]] = {}
        # (node_id, day_ordinal, outlet_id) -> sorted [(doc_id, occurrences)]
        self._node_cells: dict[tuple[int, int, int], list[tuple[str, int]]] = {}
        self._docs: dict[str, DocInfo] = {}
        self._index: FrozenIndex | None = None

    # -- interning -------------------------------------------------------

    def _node_id(self, node: NodeRef) -> int:
        nid = self._nodes.get(node)
        if nid is None:
            nid = len(self._node_list)
            self._nodes[node] = nid
            self._node_list.append(node)
        return nid

    def _outlet_id(self, outlet: str) -> int:
        oid = self._outlets.get(outlet)
        if oid is None:
            oid = len(self._outlet_list)
            self._outlets[outlet] = oid
            self._outlet_list.append(outlet)
        return oid

    def _pair_id(self, a: int, b: int) -> int:
        pid = self._pairs.get((a, b))
        if pid is None:
            pid = len(self._pair_list)
            self._pairs[(a, b)] = pid
            self._pair_list.append((a, b))
        return pid

    # -- ingestion -------------------------------------------------------

    def insert_document(self, occurrences: list[EdgeOccurrence], doc: AnnotatedDocument) -> None:
        """Fold one document's cooccurrences and node statistics into the store.

        Re-inserting a document id raises :class:`DuplicateDocumentError`
        and leaves the store unchanged.
        """
        for occ in occurrences:
            if occ.doc_id != doc.doc_id:
                raise ValueError(f"occurrence doc_id {occ.doc_id!r} does not match {doc.doc_id!r}")
        with self._lock:
            if doc.doc_id in self._docs:
                raise DuplicateDocumentError(doc.doc_id)
            day = doc.date.toordinal()
            outlet_id = self._outlet_id(doc.outlet)
            self._docs[doc.doc_id] = DocInfo(day=day, outlet_id=outlet_id, url=doc.url, title=doc.title)

            for occ in occurrences:
                v, w = canonical_pair(occ.v, occ.w)
                pid = self._pair_id(self._node_id(v), self._node_id(w))
                cell = self._edge_cells.setdefault((pid, day, outlet_id), [])
                insort(cell, (occ.doc_id, occ.delta))

            for node, count in node_occurrences(doc).items():
                nid = self._node_id(node)
                cell = self._node_cells.setdefault((nid, day, outlet_id), [])
                insort(cell, (doc.doc_id, count))

            for mention in doc.mentions:
                nid = self._node_id(NodeRef(KIND_ENTITY, mention.entity_id))
                if nid not in self._entity_info:
                    self._entity_info[nid] = EntityInfo(
                        label=mention.label, etype=mention.etype, description=mention.description
                    )
            self._index = None

    def merge_from(self, other: NetworkStore) -> None:
        """Fold another store built from a disjoint document set into this one."""
        with self._lock, other._lock:
            overlap = self._docs.keys() & other._docs.keys()
            if overlap:
                sample = ", ".join(sorted(overlap)[:5])
                raise MergeConflictError(f"{len(overlap)} shared document id(s): {sample}")

            outlet_map = {oid: self._outlet_id(out) for out, oid in other._outlets.items()}
            node_map = {nid: self._node_id(node) for node, nid in other._nodes.items()}

            for doc_id, info in other._docs.items():
                self._docs[doc_id] = DocInfo(
                    day=info.day, outlet_id=outlet_map[info.outlet_id], url=info.url, title=info.title
                )
            for nid, info in other._entity_info.items():
                self._entity_info.setdefault(node_map[nid], info)
            for (pid, day, oid), entries in other._edge_cells.items():
                a, b = other._pair_list[pid]
                key = (self._pair_id(node_map[a], node_map[b]), day, outlet_map[oid])
                merged = self._edge_cells.setdefault(key, [])
                merged.extend(entries)
                merged.sort()
            for (nid, day, oid), entries in other._node_cells.items():
                key = (node_map[nid], day, outlet_map[oid])
                merged = self._node_cells.setdefault(key, [])
                merged.extend(entries)
                merged.sort()
            self._index = None

    # -- query surface (delegates to the frozen snapshot) -----------------

    def index(self) -> FrozenIndex:
        """Current immutable snapshot, rebuilt if the store changed."""
        with self._lock:
            if self._index is None:
                self._index = FrozenIndex.build(self)
            return self._index

    def edge_view(self, pair, drange: DateRange, outlets: Iterable[str]) -> EdgeView | None:
        return self.index().edge_view(pair, drange, outlets)

    def edges_in(self, drange: DateRange, outlets: Iterable[str], kind: str = EDGE_KIND_ALL):
        return self.index().edges_in(drange, outlets, kind)

    def node_view(self, node: NodeRef, drange: DateRange, outlets: Iterable[str]) -> NodeView:
        return self.index().node_view(node, drange, outlets)

    @property
    def document_count(self) -> int:
        return len(self._docs)

    @property
    def edge_cell_count(self) -> int:
        return len(self._edge_cells)

    # -- snapshots ---------------------------------------------------------

    def save(self, path: str | Path) -> None:
        """Write a deterministic line-delimited snapshot (see docs/snapshot-format.md)."""
        with self._lock:
            lines: list[str] = [_dumps({"format": SNAPSHOT_FORMAT, "version": SNAPSHOT_VERSION})]

            for nid in sorted(self._entity_info, key=lambda n: self._node_list[n].id):
                info = self._entity_info[nid]
                lines.append(
                    _dumps(
                        {
                            "t": "entity",
                            "id": self._node_list[nid].id,
                            "etype": info.etype,
                            "label": info.label,
                            "description": info.description,
                        }
                    )
                )

            for doc_id in sorted(self._docs):
                info = self._docs[doc_id]
                record = {
                    "t": "doc",
                    "id": doc_id,
                    "date": date.fromordinal(info.day).isoformat(),
                    "outlet": self._outlet_list[info.outlet_id],
                }
                if info.url is not None:
                    record["url"] = info.url
                if info.title is not None:
                    record["title"] = info.title
                lines.append(_dumps(record))

            def edge_sort_key(item):
                (pid, day, oid), _ = item
                a, b = self._pair_list[pid]
                return (
                    self._node_list[a].sort_key(),
                    self._node_list[b].sort_key(),
                    day,
                    self._outlet_list[oid],
                )

            for (pid, day, oid), entries in sorted(self._edge_cells.items(), key=edge_sort_key):
                a, b = self._pair_list[pid]
                na, nb = self._node_list[a], self._node_list[b]
                lines.append(
                    _dumps(
                        {
                            "t": "edge",
                            "ak": na.kind,
                            "a": na.id,
                            "bk": nb.kind,
                            "b": nb.id,
                            "day": date.fromordinal(day).isoformat(),
                            "out": self._outlet_list[oid],
                            "docs": [[doc_id, delta] for doc_id, delta in entries],
                        }
                    )
                )

            def node_sort_key(item):
                (nid, day, oid), _ = item
                return (self._node_list[nid].sort_key(), day, self._outlet_list[oid])

            for (nid, day, oid), entries in sorted(self._node_cells.items(), key=node_sort_key):
                node = self._node_list[nid]
                lines.append(
                    _dumps(
                        {
                            "t": "node",
                            "k": node.kind,
                            "id": node.id,
                            "day": date.fromordinal(day).isoformat(),
                            "out": self._outlet_list[oid],
                            "docs": [[doc_id, occ] for doc_id, occ in entries],
                        }
                    )
                )

            lines.append(
                _dumps(
                    {
                        "t": "end",
                        "docs": len(self._docs),
                        "edge_cells": len(self._edge_cells),
                        "node_cells": len(self._node_cells),
                    }
                )
            )
            Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> NetworkStore:
        """Load a snapshot, verifying version, record shape, and trailer counts."""
        text = Path(path).read_text(encoding="utf-8")
        lines = text.splitlines()
        if not lines:
            raise SnapshotFormatError("empty snapshot file")
        try:
            header = json.loads(lines[0])
        except json.JSONDecodeError as exc:
            raise SnapshotFormatError(f"unreadable header: {exc}") from exc
        if not isinstance(header, dict) or header.get("format") != SNAPSHOT_FORMAT:
            raise SnapshotFormatError("not a network snapshot")
        if header.get("version") != SNAPSHOT_VERSION:
            raise SnapshotFormatError(f"unsupported snapshot version {header.get('version')!r}")

        store = cls()
        end_seen = False
        counts = {"doc": 0, "edge": 0, "node": 0}
        try:
            for line_no, line in enumerate(lines[1:], start=2):
                if not line:
                    continue
                if end_seen:
                    raise SnapshotFormatError(f"line {line_no}: data after trailer")
                record = json.loads(line)
                rtype = record["t"]
                if rtype == "entity":
                    nid = store._node_id(NodeRef(KIND_ENTITY, record["id"]))
                    store._entity_info[nid] = EntityInfo(
                        label=record["label"], etype=record["etype"], description=record["description"]
                    )
                elif rtype == "doc":
                    day = date.fromisoformat(record["date"]).toordinal()
                    store._docs[record["id"]] = DocInfo(
                        day=day,
                        outlet_id=store._outlet_id(record["outlet"]),
                        url=record.get("url"),
                        title=record.get("title"),
                    )
                    counts["doc"] += 1
                elif rtype == "edge":
                    a = store._node_id(NodeRef(record["ak"], record["a"]))
                    b = store._node_id(NodeRef(record["bk"], record["b"]))
                    day = date.fromisoformat(record["day"]).toordinal()
                    key = (store._pair_id(a, b), day, store._outlet_id(record["out"]))
                    store._edge_cells[key] = [(doc_id, int(delta)) for doc_id, delta in record["docs"]]
                    counts["edge"] += 1
                elif rtype == "node":
                    nid = store._node_id(NodeRef(record["k"], record["id"]))
                    day = date.fromisoformat(record["day"]).toordinal()
                    key = (nid, day, store._outlet_id(record["out"]))
                    store._node_cells[key] = [(doc_id, int(occ)) for doc_id, occ in record["docs"]]
                    counts["node"] += 1
                elif rtype == "end":
                    if (
                        record["docs"] != counts["doc"]
                        or record["edge_cells"] != counts["edge"]
                        or record["node_cells"] != counts["node"]
                    ):
                        raise SnapshotFormatError("trailer counts do not match records")
                    end_seen = True
                else:
                    raise SnapshotFormatError(f"line {line_no}: unknown record type {rtype!r}")
        except SnapshotFormatError:
            raise
        except (KeyError, ValueError, TypeError, json.JSONDecodeError) as exc:
            raise SnapshotFormatError(f"corrupt snapshot record: {exc}") from exc
        if not end_seen:
            raise SnapshotFormatError("truncated snapshot: missing trailer")
        return store


def merge_stores(a: NetworkStore, b: NetworkStore) -> NetworkStore:
    """Combine two stores built from disjoint document streams into a new one."""
    merged = NetworkStore()
    merged.merge_from(a)
    merged.merge_from(b)
    return merged


class FrozenIndex:
    """Immutable columnar snapshot of a store, built for range queries.

    Edge cells are held in numpy columns sorted by (pair, day, outlet)
    with a CSR offset table per pair and a day-sorted permutation for
    range scans; node cells mirror that layout per node. Per-document
    contributions live in flat arrays addressed by per-cell offsets.

    ``cells_read`` counts cell rows touched by queries; the term-expansion
    cache transparency checks rely on it.
    """

    def __init__(
        self,
        *,
        nodes: list[NodeRef],
        entity_info: dict[int, EntityInfo],
        outlets: list[str],
        pair_a: np.ndarray,
        pair_b: np.ndarray,
        e_pair: np.ndarray,
        e_day: np.ndarray,
        e_out: np.ndarray,
        e_doc_off: np.ndarray,
        e_doc_idx: np.ndarray,
        e_doc_delta: np.ndarray,
        n_node: np.ndarray,
        n_day: np.ndarray,
        n_out: np.ndarray,
        n_doc_off: np.ndarray,
        n_doc_idx: np.ndarray,
        n_doc_occ: np.ndarray,
        doc_ids: list[str],
        doc_day: np.ndarray,
        doc_out: np.ndarray,
        doc_extra: dict[int, tuple[str | None, str | None]],
    ):
        self.nodes = nodes
        self.entity_info = entity_info
        self.outlets = outlets
        self.outlet_index = {out: i for i, out in enumerate(outlets)}
        self.pair_a = pair_a.astype(np.int64)
        self.pair_b = pair_b.astype(np.int64)
        self.e_pair = e_pair.astype(np.int64)
        self.e_day = e_day.astype(np.int64)
        self.e_out = e_out.astype(np.int64)
        self.e_doc_off = e_doc_off.astype(np.int64)
        self.e_doc_idx = e_doc_idx.astype(np.int64)
        self.e_doc_delta = e_doc_delta.astype(np.int64)
        self.n_node = n_node.astype(np.int64)
        self.n_day = n_day.astype(np.int64)
        self.n_out = n_out.astype(np.int64)
        self.n_doc_off = n_doc_off.astype(np.int64)
        self.n_doc_idx = n_doc_idx.astype(np.int64)
        self.n_doc_occ = n_doc_occ.astype(np.int64)
        self.doc_ids = doc_ids
        self.doc_day = doc_day.astype(np.int64)
        self.doc_out = doc_out.astype(np.int64)
        self.doc_extra = doc_extra

        self.cells_read = 0

        n_pairs = len(self.pair_a)
        n_nodes = len(nodes)
        n_cells = len(self.e_pair)
        n_ncells = len(self.n_node)

        # Per-cell derived columns: document count and sum of exp(-delta),
        # always reduced left-to-right over the doc-id-sorted entries.
        self.e_docn = np.diff(self.e_doc_off)
        decay = np.exp(-self.e_doc_delta.astype(np.float64))
        if n_cells:
            self.e_dsum = np.add.reduceat(decay, self.e_doc_off[:-1])
        else:
            self.e_dsum = np.zeros(0, dtype=np.float64)
        self.n_docn = np.diff(self.n_doc_off)
        if n_ncells:
            self.n_occ = np.add.reduceat(self.n_doc_occ.astype(np.float64), self.n_doc_off[:-1]).astype(np.int64)
        else:
            self.n_occ = np.zeros(0, dtype=np.int64)

        self.node_kind = np.array([KIND_CODES[n.kind] for n in nodes], dtype=np.int8)
        self.pair_is_ee = (
            (self.node_kind[self.pair_a] == 0) & (self.node_kind[self.pair_b] == 0)
            if n_pairs
            else np.zeros(0, dtype=bool)
        )

        # CSR offsets: cells are sorted by pair (resp. node) first.
        self.e_pair_off = _csr_offsets(self.e_pair, n_pairs)
        self.n_node_off = _csr_offsets(self.n_node, n_nodes)

        # Day-sorted permutations for date-range scans.
        self.e_day_order = np.argsort(self.e_day, kind="stable")
        self.e_day_sorted = self.e_day[self.e_day_order]
        self.n_day_order = np.argsort(self.n_day, kind="stable")
        self.n_day_sorted = self.n_day[self.n_day_order]

        # Deterministic node and pair ranks for tie-breaking.
        node_id_arr = np.array([n.id for n in nodes]) if n_nodes else np.zeros(0, dtype="U1")
        if n_nodes:
            order = np.lexsort((node_id_arr, self.node_kind))
            self.node_rank = np.empty(n_nodes, dtype=np.int64)
            self.node_rank[order] = np.arange(n_nodes)
        else:
            self.node_rank = np.zeros(0, dtype=np.int64)
        if n_pairs:
            order = np.lexsort((self.node_rank[self.pair_b], self.node_rank[self.pair_a]))
            self.pair_rank = np.empty(n_pairs, dtype=np.int64)
            self.pair_rank[order] = np.arange(n_pairs)
        else:
            self.pair_rank = np.zeros(0, dtype=np.int64)

        self.pair_lookup = {
            (int(a), int(b)): pid for pid, (a, b) in enumerate(zip(self.pair_a, self.pair_b))
        }
        self.node_index = {node: nid for nid, node in enumerate(nodes)}
        self.doc_index = {doc_id: i for i, doc_id in enumerate(doc_ids)}

        # Adjacency over pairs: for each node, incident pairs sorted by the
        # opposite endpoint's id.
        if n_pairs:
            adj_node = np.concatenate([self.pair_a, self.pair_b])
            adj_other = np.concatenate([self.pair_b, self.pair_a])
            adj_pair = np.concatenate([np.arange(n_pairs), np.arange(n_pairs)])
            order = np.lexsort((adj_other, adj_node))
            self.adj_node_off = _csr_offsets(adj_node[order], n_nodes)
            self.adj_other = adj_other[order]
            self.adj_pair = adj_pair[order]
        else:
            self.adj_node_off = np.zeros(n_nodes + 1, dtype=np.int64)
            self.adj_other = np.zeros(0, dtype=np.int64)
            self.adj_pair = np.zeros(0, dtype=np.int64)

        # Corpus-wide node totals for suggestions and metadata.
        if n_ncells:
            self.node_total_docs = np.bincount(
                self.n_node, weights=self.n_docn.astype(np.float64), minlength=n_nodes
            ).astype(np.int64)
            self.node_total_occ = np.bincount(
                self.n_node, weights=self.n_occ.astype(np.float64), minlength=n_nodes
            ).astype(np.int64)
        else:
            self.node_total_docs = np.zeros(n_nodes, dtype=np.int64)
            self.node_total_occ = np.zeros(n_nodes, dtype=np.int64)

        self.day_span = (
            (int(self.doc_day.min()), int(self.doc_day.max())) if len(doc_ids) else None
        )
        self._day_base = int(self.e_day.min()) if n_cells else 0
        self._day_extent = int(self.e_day.max()) - self._day_base + 1 if n_cells else 1

    # -- construction ----------------------------------------------------

    @classmethod
    def build(cls, store: NetworkStore) -> FrozenIndex:
        doc_ids = sorted(store._docs)
        doc_index = {doc_id: i for i, doc_id in enumerate(doc_ids)}
        doc_day = np.array([store._docs[d].day for d in doc_ids], dtype=np.int64)
        doc_out = np.array([store._docs[d].outlet_id for d in doc_ids], dtype=np.int64)
        doc_extra = {
            doc_index[d]: (info.url, info.title)
            for d, info in store._docs.items()
            if info.url is not None or info.title is not None
        }

        e_keys = sorted(store._edge_cells)
        e_pair = np.array([k[0] for k in e_keys], dtype=np.int64)
        e_day = np.array([k[1] for k in e_keys], dtype=np.int64)
        e_out = np.array([k[2] for k in e_keys], dtype=np.int64)
        e_doc_off = np.zeros(len(e_keys) + 1, dtype=np.int64)
        e_doc_idx: list[int] = []
        e_doc_delta: list[int] = []
        for i, key in enumerate(e_keys):
            for doc_id, delta in store._edge_cells[key]:
                e_doc_idx.append(doc_index[doc_id])
                e_doc_delta.append(delta)
            e_doc_off[i + 1] = len(e_doc_idx)

        n_keys = sorted(store._node_cells)
        n_node = np.array([k[0] for k in n_keys], dtype=np.int64)
        n_day = np.array([k[1] for k in n_keys], dtype=np.int64)
        n_out = np.array([k[2] for k in n_keys], dtype=np.int64)
        n_doc_off = np.zeros(len(n_keys) + 1, dtype=np.int64)
        n_doc_idx: list[int] = []
        n_doc_occ: list[int] = []
        for i, key in enumerate(n_keys):
            for doc_id, occ in store._node_cells[key]:
                n_doc_idx.append(doc_index[doc_id])
                n_doc_occ.append(occ)
            n_doc_off[i + 1] = len(n_doc_idx)

        pair_a = np.array([a for a, _ in store._pair_list], dtype=np.int64)
        pair_b = np.array([b for _, b in store._pair_list], dtype=np.int64)

        return cls(
            nodes=list(store._node_list),
            entity_info=dict(store._entity_info),
            outlets=list(store._outlet_list),
            pair_a=pair_a,
            pair_b=pair_b,
            e_pair=e_pair,
            e_day=e_day,
            e_out=e_out,
            e_doc_off=e_doc_off,
            e_doc_idx=np.array(e_doc_idx, dtype=np.int64),
            e_doc_delta=np.array(e_doc_delta, dtype=np.int64),
            n_node=n_node,
            n_day=n_day,
            n_out=n_out,
            n_doc_off=n_doc_off,
            n_doc_idx=np.array(n_doc_idx, dtype=np.int64),
            n_doc_occ=np.array(n_doc_occ, dtype=np.int64),
            doc_ids=doc_ids,
            doc_day=doc_day,
            doc_out=doc_out,
            doc_extra=doc_extra,
        )

    # -- row selection -----------------------------------------------------

    def _outlet_mask_table(self, outlets: Iterable[str] | None) -> np.ndarray | None:
        """Boolean lookup over outlet ids; None selects all outlets."""
        if outlets is None:
            return None
        table = np.zeros(max(len(self.outlets), 1), dtype=bool)
        matched_all = True
        for out in outlets:
            oid = self.outlet_index.get(out)
            if oid is None:
                matched_all = False
                continue
            table[oid] = True
        if matched_all and table.all():
            return None
        return table

    def edge_rows_in(self, drange: DateRange, outlets: Iterable[str] | None) -> np.ndarray:
        lo = np.searchsorted(self.e_day_sorted, drange.start.toordinal(), side="left")
        hi = np.searchsorted(self.e_day_sorted, drange.end.toordinal(), side="right")
        rows = self.e_day_order[lo:hi]
        table = self._outlet_mask_table(outlets)
        if table is not None and len(rows):
            rows = rows[table[self.e_out[rows]]]
        self.cells_read += len(rows)
        return rows

    def node_rows_in(self, drange: DateRange, outlets: Iterable[str] | None) -> np.ndarray:
        lo = np.searchsorted(self.n_day_sorted, drange.start.toordinal(), side="left")
        hi = np.searchsorted(self.n_day_sorted, drange.end.toordinal(), side="right")
        rows = self.n_day_order[lo:hi]
        table = self._outlet_mask_table(outlets)
        if table is not None and len(rows):
            rows = rows[table[self.n_out[rows]]]
        self.cells_read += len(rows)
        return rows

    def pair_rows(self, pair_id: int, drange: DateRange, outlets: Iterable[str] | None) -> np.ndarray:
        start, end = self.e_pair_off[pair_id], self.e_pair_off[pair_id + 1]
        days = self.e_day[start:end]
        lo = np.searchsorted(days, drange.start.toordinal(), side="left")
        hi = np.searchsorted(days, drange.end.toordinal(), side="right")
        rows = np.arange(start + lo, start + hi)
        table = self._outlet_mask_table(outlets)
        if table is not None and len(rows):
            rows = rows[table[self.e_out[rows]]]
        self.cells_read += len(rows)
        return rows

    def pairs_rows(self, pair_ids: np.ndarray, drange: DateRange, outlets: Iterable[str] | None) -> np.ndarray:
        """Rows of many pairs at once, filtered to the context."""
        if not len(pair_ids):
            return np.zeros(0, dtype=np.int64)
        starts = self.e_pair_off[pair_ids]
        ends = self.e_pair_off[pair_ids + 1]
        rows = _expand_ranges(starts, ends)
        day = self.e_day[rows]
        mask = (day >= drange.start.toordinal()) & (day <= drange.end.toordinal())
        table = self._outlet_mask_table(outlets)
        if table is not None:
            mask &= table[self.e_out[rows]]
        rows = rows[mask]
        self.cells_read += len(rows)
        return rows

    def node_rows_for(self, node_id: int, drange: DateRange, outlets: Iterable[str] | None) -> np.ndarray:
        start, end = self.n_node_off[node_id], self.n_node_off[node_id + 1]
        days = self.n_day[start:end]
        lo = np.searchsorted(days, drange.start.toordinal(), side="left")
        hi = np.searchsorted(days, drange.end.toordinal(), side="right")
        rows = np.arange(start + lo, start + hi)
        table = self._outlet_mask_table(outlets)
        if table is not None and len(rows):
            rows = rows[table[self.n_out[rows]]]
        self.cells_read += len(rows)
        return rows

    # -- aggregation -------------------------------------------------------

    def group_edge_stats(self, rows: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """Group edge cell rows by pair: (pair_ids, doc_count, proximity_sum, days_active)."""
        if not len(rows):
            empty = np.zeros(0, dtype=np.int64)
            return empty, empty, np.zeros(0, dtype=np.float64), empty
        pairs = self.e_pair[rows]
        upairs, inverse = np.unique(pairs, return_inverse=True)
        d_e = np.bincount(inverse, weights=self.e_docn[rows].astype(np.float64)).astype(np.int64)
        delta_e = np.bincount(inverse, weights=self.e_dsum[rows])
        day_key = pairs * self._day_extent + (self.e_day[rows] - self._day_base)
        unique_keys = np.unique(day_key)
        key_pairs = unique_keys // self._day_extent
        t_e = np.bincount(np.searchsorted(upairs, key_pairs), minlength=len(upairs))
        return upairs, d_e, delta_e, t_e

    def node_doc_counts(self, rows: np.ndarray) -> np.ndarray:
        """Documents per node over the given node cell rows (dense array)."""
        if not len(rows):
            return np.zeros(len(self.nodes), dtype=np.int64)
        return np.bincount(
            self.n_node[rows], weights=self.n_docn[rows].astype(np.float64), minlength=len(self.nodes)
        ).astype(np.int64)

    # -- views -------------------------------------------------------------

    def resolve_pair(self, pair: tuple[NodeRef, NodeRef]) -> int | None:
        v, w = canonical_pair(*pair)
        a = self.node_index.get(v)
        b = self.node_index.get(w)
        if a is None or b is None:
            return None
        return self.pair_lookup.get((a, b))

    def edge_view_by_id(
        self, pair_id: int, drange: DateRange, outlets: Iterable[str] | None
    ) -> EdgeView | None:
        rows = self.pair_rows(pair_id, drange, outlets)
        return self._edge_view_from_rows(pair_id, rows, drange, outlets)

    def _edge_view_from_rows(
        self, pair_id: int, rows: np.ndarray, drange: DateRange, outlets: Iterable[str] | None
    ) -> EdgeView | None:
        if not len(rows):
            return None
        a = self.nodes[int(self.pair_a[pair_id])]
        b = self.nodes[int(self.pair_b[pair_id])]
        doc_idx = _gather_segments(self.e_doc_off, self.e_doc_idx, rows)
        doc_ids = tuple(sorted(self.doc_ids[i] for i in doc_idx))
        return EdgeView(
            pair=(a, b),
            range=drange,
            outlets=self._resolved_outlets(outlets),
            doc_count=int(self.e_docn[rows].sum()),
            days_active=int(len(np.unique(self.e_day[rows]))),
            proximity_sum=float(self.e_dsum[rows].sum()),
            doc_ids=doc_ids,
        )

    def edge_view(
        self, pair: tuple[NodeRef, NodeRef], drange: DateRange, outlets: Iterable[str] | None
    ) -> EdgeView | None:
        pair_id = self.resolve_pair(pair)
        if pair_id is None:
            return None
        return self.edge_view_by_id(pair_id, drange, outlets)

    def edges_in(
        self, drange: DateRange, outlets: Iterable[str] | None, kind: str = EDGE_KIND_ALL
    ) -> Iterator[EdgeView]:
        """Every pair with at least one matching cell, in canonical pair order."""
        if kind not in (EDGE_KIND_ALL, EDGE_KIND_EE, EDGE_KIND_ET):
            raise ValueError(f"unknown edge kind filter {kind!r}")
        rows = self.edge_rows_in(drange, outlets)
        if not len(rows):
            return
        pairs = np.unique(self.e_pair[rows])
        if kind == EDGE_KIND_EE:
            pairs = pairs[self.pair_is_ee[pairs]]
        elif kind == EDGE_KIND_ET:
            pairs = pairs[~self.pair_is_ee[pairs]]
        pairs = pairs[np.argsort(self.pair_rank[pairs])]
        for pid in pairs:
            view = self.edge_view_by_id(int(pid), drange, outlets)
            if view is not None:
                yield view

    def node_view(self, node: NodeRef, drange: DateRange, outlets: Iterable[str] | None) -> NodeView:
        nid = self.node_index.get(node)
        if nid is None:
            return NodeView(node=node, doc_count=0, occurrence_count=0)
        rows = self.node_rows_for(nid, drange, outlets)
        if not len(rows):
            return NodeView(node=node, doc_count=0, occurrence_count=0)
        return NodeView(
            node=node,
            doc_count=int(self.n_docn[rows].sum()),
            occurrence_count=int(self.n_occ[rows].sum()),
        )

    def node_docs_in(self, node_id: int, drange: DateRange, outlets: Iterable[str] | None) -> np.ndarray:
        """Indices of documents containing the node within the context."""
        rows = self.node_rows_for(node_id, drange, outlets)
        return _gather_segments(self.n_doc_off, self.n_doc_idx, rows)

    def edge_doc_proximity(
        self, pair_id: int, drange: DateRange, outlets: Iterable[str] | None
    ) -> tuple[np.ndarray, np.ndarray]:
        """Per-document (doc_index, exp(-delta)) contributions of a pair in context."""
        rows = self.pair_rows(pair_id, drange, outlets)
        doc_idx = _gather_segments(self.e_doc_off, self.e_doc_idx, rows)
        deltas = _gather_segments(self.e_doc_off, self.e_doc_delta, rows)
        return doc_idx, np.exp(-deltas.astype(np.float64))

    def _resolved_outlets(self, outlets: Iterable[str] | None) -> frozenset[str]:
        if outlets is None:
            return frozenset(self.outlets)
        return frozenset(outlets)

    # -- metadata ----------------------------------------------------------

    def corpus_span(self) -> tuple[date, date] | None:
        if self.day_span is None:
            return None
        return (date.fromordinal(self.day_span[0]), date.fromordinal(self.day_span[1]))

    def node_counts_by_type(self) -> dict[str, int]:
        counts = {"actor": 0, "location": 0, "organization": 0, "term": 0}
        for nid, node in enumerate(self.nodes):
            if node.kind == KIND_TERM:
                counts["term"] += 1
            else:
                info = self.entity_info.get(nid)
                if info is not None:
                    counts[info.etype] += 1
        return counts

    @property
    def edge_cell_count(self) -> int:
        return len(self.e_pair)

    @property
    def pair_count(self) -> int:
        return len(self.pair_a)

    @property
    def document_count(self) -> int:
        return len(self.doc_ids)

    def entities(self) -> Iterator[tuple[int, NodeRef, EntityInfo]]:
        for nid, info in self.entity_info.items():
            yield nid, self.nodes[nid], info


def _csr_offsets(sorted_ids: np.ndarray, n_groups: int) -> np.ndarray:
    counts = np.bincount(sorted_ids, minlength=n_groups) if len(sorted_ids) else np.zeros(n_groups, dtype=np.int64)
    offsets = np.zeros(n_groups + 1, dtype=np.int64)
    np.cumsum(counts, out=offsets[1:])
    return offsets


def _expand_ranges(starts: np.ndarray, ends: np.ndarray) -> np.ndarray:
    """Concatenate arange(start, end) for each range, vectorized."""
    lengths = (ends - starts).astype(np.int64)
    total = int(lengths.sum())
    if total == 0:
        return np.zeros(0, dtype=np.int64)
    repeats = np.repeat(starts - np.concatenate(([0], np.cumsum(lengths)[:-1])), lengths)
    return repeats + np.arange(total, dtype=np.int64)


def _gather_segments(offsets: np.ndarray, values: np.ndarray, rows: np.ndarray) -> np.ndarray:
    """Concatenate the offset-delimited value segments of the given rows."""
    if not len(rows):
        return np.zeros(0, dtype=values.dtype)
    flat_rows = _expand_ranges(offsets[rows], offsets[rows + 1])
    return values[flat_rows]


def cell_proximity_sum(entries: list[tuple[str, int]]) -> float:
    """Reference exp(-delta) sum of one cell's (doc, delta) entries."""
    return math.fsum(math.exp(-delta) for _, delta in entries)
