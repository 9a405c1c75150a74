/** Typed client for the exploration API.
 *
 * Request bodies are serialized canonically (sorted keys, no whitespace),
 * matching the server's own output convention, so contract tests can
 * compare the exact wire bytes against recorded fixtures.
 */

import type {
  AdjacentBody,
  AdjacentPayload,
  ErrorPayload,
  MetaPayload,
  QueryBody,
  RecommendBody,
  RecommendPayload,
  SuggestPayload,
  TargetedBody,
  TermsBody,
  TermsPayload,
  TopicsPayload,
} from "./types";

/** JSON.stringify with object keys sorted at every level. */
export function canonicalJson(value: unknown): string {
  if (value === null || typeof value !== "object") {
    return JSON.stringify(value);
  }
  if (Array.isArray(value)) {
    return "[" + value.map(canonicalJson).join(",") + "]";
  }
  const record = value as Record<string, unknown>;
  const parts = Object.keys(record)
    .sort()
    .filter((key) => record[key] !== undefined)
    .map((key) => JSON.stringify(key) + ":" + canonicalJson(record[key]));
  return "{" + parts.join(",") + "}";
}

export class ApiRequestError extends Error {
  status: number;
  field: string | null;

  constructor(status: number, message: string, field: string | null = null) {
    super(message);
    this.status = status;
    this.field = field;
  }
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

function newFingerprint(): string {
  return (
    Date.now().toString(36) + Math.random().toString(36).slice(2, 10)
  );
}

export class ApiClient {
  private base: string;
  private fetchFn: FetchLike;
  readonly fingerprint: string;

  constructor(base = "", fetchFn?: FetchLike, fingerprint?: string) {
    this.base = base.replace(/\/$/, "");
    this.fetchFn = fetchFn ?? ((input, init) => fetch(input, init));
    this.fingerprint = fingerprint ?? newFingerprint();
  }

  private async parse<T>(resp: Response): Promise<T> {
    if (resp.ok) {
      return (await resp.json()) as T;
    }
    let message = `request failed with status ${resp.status}`;
    let field: string | null = null;
    try {
      const payload = (await resp.json()) as ErrorPayload;
      if (payload.error?.message) {
        message = payload.error.message;
        field = payload.error.field ?? null;
      }
    } catch {
      // non-JSON error body, keep the generic message
    }
    throw new ApiRequestError(resp.status, message, field);
  }

  private async get<T>(path: string, params?: Record<string, string>, signal?: AbortSignal): Promise<T> {
    let url = this.base + path;
    if (params) {
      url += "?" + new URLSearchParams(params).toString();
    }
    return this.parse<T>(await this.fetchFn(url, { signal }));
  }

  private async post<T>(path: string, body: unknown, signal?: AbortSignal): Promise<T> {
    const resp = await this.fetchFn(this.base + path, {
      method: "POST",
      headers: {
        "Content-Type": "application/json",
        "X-Client-Fp": this.fingerprint,
      },
      body: canonicalJson(body),
      signal,
    });
    return this.parse<T>(resp);
  }

  meta(): Promise<MetaPayload> {
    return this.get("/api/meta");
  }

  suggest(q: string, limit: number, signal?: AbortSignal): Promise<SuggestPayload> {
    return this.get("/api/suggest", { q, limit: String(limit) }, signal);
  }

  topicsGlobal(body: QueryBody, signal?: AbortSignal): Promise<TopicsPayload> {
    return this.post("/api/topics/global", body, signal);
  }

  topicsTargeted(body: TargetedBody, signal?: AbortSignal): Promise<TopicsPayload> {
    return this.post("/api/topics/targeted", body, signal);
  }

  expandTerms(body: TermsBody, signal?: AbortSignal): Promise<TermsPayload> {
    return this.post("/api/expand/terms", body, signal);
  }

  expandAdjacent(body: AdjacentBody, signal?: AbortSignal): Promise<AdjacentPayload> {
    return this.post("/api/expand/adjacent", body, signal);
  }

  recommend(body: RecommendBody, signal?: AbortSignal): Promise<RecommendPayload> {
    return this.post("/api/recommend", body, signal);
  }
}
