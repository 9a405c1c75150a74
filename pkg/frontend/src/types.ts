/** Wire types mirroring the server's JSON payloads, version 1. */

export type NodeKind = "entity" | "term";

export interface DateRangeBody {
  start: string;
  end: string;
}

/** Context block shared by every query body. */
export interface QueryBody {
  range: DateRangeBody;
  outlets: string[] | null;
  num_edges: number;
  num_terms: number;
}

export interface TargetedBody extends QueryBody {
  entity_a: string;
  entity_b: string;
}

export interface TermsBody extends QueryBody {
  entity_a: string;
  entity_b: string;
}

export interface AdjacentBody extends QueryBody {
  entity: string;
}

export interface NodeDescriptor {
  kind: NodeKind;
  id: string;
}

export interface RecommendBody {
  range: DateRangeBody;
  outlets: string[] | null;
  nodes: NodeDescriptor[];
  num_articles: number;
}

export interface ContextJson {
  range: DateRangeBody;
  outlets: string[] | null;
  num_edges: number;
  num_terms: number;
}

export interface EntityJson {
  id: string;
  kind: "entity";
  type: string | null;
  label: string;
  description: string | null;
}

export interface EdgeJson {
  source: NodeDescriptor;
  target: NodeDescriptor;
  weight: number;
  doc_count: number;
  days_active: number;
  proximity_sum: number;
}

export interface TermEntry {
  id: string;
  weight: number;
}

export interface PairTerms {
  pair: [string, string];
  terms: TermEntry[];
}

export interface TopicJson {
  entities: EntityJson[];
  edges: EdgeJson[];
  terms: PairTerms[];
}

export interface TopicsPayload {
  version: number;
  mode: string;
  context: ContextJson;
  topics: TopicJson[];
}

export interface TermsPayload {
  version: number;
  context: ContextJson;
  pair: [string, string];
  terms: TermEntry[];
}

export interface NeighborJson {
  entity: EntityJson;
  edge: EdgeJson;
}

export interface AdjacentPayload {
  version: number;
  context: ContextJson;
  entity: EntityJson;
  neighbors: NeighborJson[];
}

export interface ArticleJson {
  id: string;
  date: string;
  outlet: string;
  coverage: number;
  proximity: number;
  url: string | null;
  title: string | null;
}

export interface RecommendPayload {
  version: number;
  context: ContextJson;
  nodes: NodeDescriptor[];
  articles: ArticleJson[];
}

export interface Suggestion {
  entity_id: string;
  label: string;
  etype: string;
  description: string | null;
  match_score: number;
  occurrence_count: number;
}

export interface SuggestPayload {
  version: number;
  query: string;
  suggestions: Suggestion[];
}

export interface MetaPayload {
  version: number;
  corpus: { start: string | null; end: string | null; documents: number };
  outlets: string[];
  nodes: Record<string, number>;
  pairs: number;
  edge_cells: number;
}

export interface ErrorPayload {
  error: { message: string; field?: string };
}
