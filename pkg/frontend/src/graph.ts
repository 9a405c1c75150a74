/** Client-side topic graph state.
 *
 * Nodes and edges come verbatim from API payloads; the model never
 * computes scores of its own. Node identity is "kind:id", edge identity
 * the sorted pair of node keys, so merging repeated responses is
 * idempotent.
 */

import type {
  AdjacentPayload,
  EdgeJson,
  EntityJson,
  NodeDescriptor,
  NodeKind,
  PairTerms,
  TermEntry,
  TopicsPayload,
  TermsPayload,
} from "./types";

export interface GraphNode {
  key: string;
  kind: NodeKind;
  id: string;
  label: string;
  /** actor/location/organization for entities, "term" for terms. */
  etype: string;
  description: string | null;
}

export interface GraphEdge {
  key: string;
  a: string;
  b: string;
  weight: number;
  docCount: number | null;
  daysActive: number | null;
}

export function nodeKey(kind: NodeKind, id: string): string {
  return `${kind}:${id}`;
}

export function edgeKey(a: string, b: string): string {
  return a < b ? `${a}|${b}` : `${b}|${a}`;
}

function descriptorKey(desc: NodeDescriptor): string {
  return nodeKey(desc.kind, desc.id);
}

export class GraphModel {
  readonly nodes = new Map<string, GraphNode>();
  readonly edges = new Map<string, GraphEdge>();
  readonly selection = new Set<string>();

  clear(): void {
    this.nodes.clear();
    this.edges.clear();
    this.selection.clear();
  }

  get nodeCount(): number {
    return this.nodes.size;
  }

  get edgeCount(): number {
    return this.edges.size;
  }

  node(key: string): GraphNode | undefined {
    return this.nodes.get(key);
  }

  edge(a: string, b: string): GraphEdge | undefined {
    return this.edges.get(edgeKey(a, b));
  }

  addEntity(entity: EntityJson): GraphNode {
    const key = nodeKey("entity", entity.id);
    const node: GraphNode = {
      key,
      kind: "entity",
      id: entity.id,
      label: entity.label,
      etype: entity.type ?? "entity",
      description: entity.description,
    };
    this.nodes.set(key, node);
    return node;
  }

  addTerm(term: TermEntry): GraphNode {
    const key = nodeKey("term", term.id);
    const existing = this.nodes.get(key);
    if (existing) {
      return existing;
    }
    const node: GraphNode = {
      key,
      kind: "term",
      id: term.id,
      label: term.id,
      etype: "term",
      description: null,
    };
    this.nodes.set(key, node);
    return node;
  }

  private putEdge(a: string, b: string, weight: number, docCount: number | null, daysActive: number | null): void {
    if (a === b || !this.nodes.has(a) || !this.nodes.has(b)) {
      return;
    }
    const key = edgeKey(a, b);
    const [lo, hi] = a < b ? [a, b] : [b, a];
    this.edges.set(key, { key, a: lo, b: hi, weight, docCount, daysActive });
  }

  addScoredEdge(edge: EdgeJson): void {
    this.putEdge(
      descriptorKey(edge.source),
      descriptorKey(edge.target),
      edge.weight,
      edge.doc_count,
      edge.days_active,
    );
  }

  /** Attach each returned term to both endpoints of the expanded pair. */
  private attachTerms(aId: string, bId: string, terms: TermEntry[]): void {
    const aKey = nodeKey("entity", aId);
    const bKey = nodeKey("entity", bId);
    for (const term of terms) {
      const node = this.addTerm(term);
      this.putEdge(node.key, aKey, term.weight, null, null);
      this.putEdge(node.key, bKey, term.weight, null, null);
    }
  }

  applyTopics(payload: TopicsPayload): void {
    for (const topic of payload.topics) {
      for (const entity of topic.entities) {
        this.addEntity(entity);
      }
      for (const edge of topic.edges) {
        this.addScoredEdge(edge);
      }
      for (const group of topic.terms) {
        this.applyPairTerms(group);
      }
    }
  }

  applyPairTerms(group: PairTerms): void {
    this.attachTerms(group.pair[0], group.pair[1], group.terms);
  }

  applyTerms(payload: TermsPayload): void {
    this.attachTerms(payload.pair[0], payload.pair[1], payload.terms);
  }

  applyAdjacent(payload: AdjacentPayload): void {
    this.addEntity(payload.entity);
    for (const neighbor of payload.neighbors) {
      this.addEntity(neighbor.entity);
      this.addScoredEdge(neighbor.edge);
    }
  }

  neighborKeys(key: string): string[] {
    const out: string[] = [];
    for (const edge of this.edges.values()) {
      if (edge.a === key) {
        out.push(edge.b);
      } else if (edge.b === key) {
        out.push(edge.a);
      }
    }
    return out;
  }

  /** Remove a node with its incident edges, then drop term nodes whose
   * triangles all collapsed: a term stays only while some pair of its
   * entity neighbors is still itself connected by an edge. */
  deleteNode(key: string): void {
    if (!this.nodes.has(key)) {
      return;
    }
    this.removeNodeAndEdges(key);
    for (const node of [...this.nodes.values()]) {
      if (node.kind === "term" && !this.termHasTriangle(node.key)) {
        this.removeNodeAndEdges(node.key);
      }
    }
  }

  private removeNodeAndEdges(key: string): void {
    this.nodes.delete(key);
    this.selection.delete(key);
    for (const edge of [...this.edges.values()]) {
      if (edge.a === key || edge.b === key) {
        this.edges.delete(edge.key);
      }
    }
  }

  private termHasTriangle(termKey: string): boolean {
    const anchors = this.neighborKeys(termKey).filter(
      (k) => this.nodes.get(k)?.kind === "entity",
    );
    for (let i = 0; i < anchors.length; i++) {
      for (let j = i + 1; j < anchors.length; j++) {
        if (this.edges.has(edgeKey(anchors[i], anchors[j]))) {
          return true;
        }
      }
    }
    return false;
  }

  toggleSelect(key: string): void {
    if (!this.nodes.has(key)) {
      return;
    }
    if (this.selection.has(key)) {
      this.selection.delete(key);
    } else {
      this.selection.add(key);
    }
  }

  selectedDescriptors(): NodeDescriptor[] {
    const descs: NodeDescriptor[] = [];
    for (const key of this.selection) {
      const node = this.nodes.get(key);
      if (node) {
        descs.push({ kind: node.kind, id: node.id });
      }
    }
    descs.sort((x, y) => (x.kind === y.kind ? (x.id < y.id ? -1 : 1) : x.kind < y.kind ? -1 : 1));
    return descs;
  }

  sortedNodeKeys(): string[] {
    return [...this.nodes.keys()].sort();
  }

  sortedEdges(): GraphEdge[] {
    return [...this.edges.values()].sort((x, y) => (x.key < y.key ? -1 : 1));
  }

  entityIds(): Set<string> {
    const ids = new Set<string>();
    for (const node of this.nodes.values()) {
      if (node.kind === "entity") {
        ids.add(node.id);
      }
    }
    return ids;
  }
}
