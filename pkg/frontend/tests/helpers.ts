/** Shared test plumbing: recorded fixtures and a scripted fetch stub. */

import { readFileSync } from "node:fs";
import { fileURLToPath } from "node:url";
import { dirname, join } from "node:path";

import { ApiClient, type FetchLike } from "../src/api";
import { Panel, type PanelOptions } from "../src/panel";
import type { MetaPayload } from "../src/types";

const FIXTURE_DIR = join(dirname(fileURLToPath(import.meta.url)), "..", "..", "tests", "fixtures", "api");

export interface Exchange {
  request: { method: string; path: string; body?: unknown; params?: Record<string, unknown> };
  response: { status: number; body: unknown };
}

const cache = new Map<string, Exchange>();

export function loadFixture(name: string): Exchange {
  let exchange = cache.get(name);
  if (!exchange) {
    exchange = JSON.parse(readFileSync(join(FIXTURE_DIR, `${name}.json`), "utf8")) as Exchange;
    cache.set(name, exchange);
  }
  return exchange;
}

export function metaPayload(): MetaPayload {
  return loadFixture("meta").response.body as MetaPayload;
}

export interface RecordedCall {
  url: string;
  init: RequestInit | undefined;
  signal: AbortSignal | undefined;
}

export interface RouteResult {
  status: number;
  body: unknown;
}

export type Route = (url: string, init?: RequestInit) => RouteResult | Promise<RouteResult> | undefined;

function asResponse(status: number, body: unknown): Response {
  return {
    ok: status >= 200 && status < 300,
    status,
    json: async () => body,
  } as unknown as Response;
}

/** Fetch stub that records calls and answers from fixtures or custom routes. */
export function stubFetch(routes: Route[] = []): { fetchFn: FetchLike; calls: RecordedCall[] } {
  const calls: RecordedCall[] = [];
  const fetchFn: FetchLike = async (url, init) => {
    calls.push({ url, init, signal: init?.signal ?? undefined });
    for (const route of routes) {
      const hit = route(url, init);
      if (hit) {
        const result = await hit;
        return asResponse(result.status, result.body);
      }
    }
    const hit = fixtureRoute(url, init);
    if (hit) {
      return asResponse(hit.status, hit.body);
    }
    return asResponse(404, { error: { message: `no stub for ${url}` } });
  };
  return { fetchFn, calls };
}

const FIXTURES_BY_PATH: Record<string, string> = {
  "/api/meta": "meta",
  "/api/suggest": "suggest",
  "/api/topics/global": "global",
  "/api/topics/targeted": "targeted",
  "/api/expand/terms": "terms",
  "/api/expand/adjacent": "adjacent",
  "/api/recommend": "recommend",
};

function fixtureRoute(url: string, _init?: RequestInit): { status: number; body: unknown } | undefined {
  const path = url.split("?")[0];
  const name = FIXTURES_BY_PATH[path];
  if (!name) {
    return undefined;
  }
  const exchange = loadFixture(name);
  return { status: exchange.response.status, body: exchange.response.body };
}

/** Drain pending microtasks plus one macrotask tick. */
export function flush(): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, 0));
}

export interface Harness {
  panel: Panel;
  calls: RecordedCall[];
  client: ApiClient;
}

export function newPanel(routes: Route[] = [], opts: PanelOptions = {}): Harness {
  const { fetchFn, calls } = stubFetch(routes);
  const client = new ApiClient("", fetchFn, "test-fp");
  const panel = new Panel(client, metaPayload(), opts);
  document.body.appendChild(panel.root);
  return { panel, calls, client };
}

/** Manually resolvable responses for out-of-order delivery tests. The
 * stub ignores abort signals on purpose: staleness handling must not
 * depend on the transport honouring cancellation. */
export function deferredRoute(path: string): {
  route: Route;
  resolveAt: (index: number, body: unknown, status?: number) => void;
  pending: () => number;
} {
  const waiting: Array<((r: RouteResult) => void) | null> = [];
  const route: Route = (url) => {
    if (url.split("?")[0] !== path) {
      return undefined;
    }
    return new Promise<RouteResult>((res) => {
      waiting.push(res);
    });
  };
  return {
    route,
    resolveAt: (index, body, status = 200) => {
      const next = waiting[index];
      if (!next) {
        throw new Error(`no pending request #${index}`);
      }
      waiting[index] = null;
      next({ status, body });
    },
    pending: () => waiting.filter(Boolean).length,
  };
}
