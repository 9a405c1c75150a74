/** One exploration panel: query form, canvas, menus, request log.
 *
 * Panels are fully independent so several can run side by side for
 * contrastive views. Every query and every local graph edit lands in an
 * append-only log; the graph is reproducible by replaying it. At most
 * one graph request is in flight per panel, and a response is applied
 * only when it belongs to the newest submission.
 */

import { ApiClient, ApiRequestError, canonicalJson } from "./api";
import { GraphModel, type GraphEdge, type GraphNode } from "./graph";
import { GraphView } from "./graphview";
import { Typeahead } from "./typeahead";
import type { MetaPayload, QueryBody, RecommendPayload, Suggestion } from "./types";

export interface LogEntry {
  kind: string;
  body: unknown;
  status: "pending" | "ok" | "error" | "stale" | "local";
}

export interface PanelOptions {
  title?: string;
  onGraphChange?: () => void;
  onClose?: (panel: Panel) => void;
}

interface ChipEntity {
  id: string;
  label: string;
}

/** Knowledge-base page for an entity: id page when the id looks like a
 * KB identifier, label search otherwise. */
export function kbUrl(node: GraphNode): string {
  if (/^Q\d+$/.test(node.id)) {
    return `https://www.wikidata.org/wiki/${node.id}`;
  }
  return "https://www.wikidata.org/w/index.php?search=" + encodeURIComponent(node.label);
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className = "",
  text = "",
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) {
    node.className = className;
  }
  if (text) {
    node.textContent = text;
  }
  return node;
}

export class Panel {
  readonly root: HTMLElement;
  readonly model = new GraphModel();
  readonly log: LogEntry[] = [];

  private reqSeq = 0;
  private controller: AbortController | null = null;
  private shared = new Set<string>();
  private chips: ChipEntity[] = [];

  private readonly view: GraphView;
  private readonly startInput = el("input", "start-date");
  private readonly endInput = el("input", "end-date");
  private readonly edgesInput = el("input", "num-edges");
  private readonly termsInput = el("input", "num-terms");
  private readonly articlesInput = el("input", "num-articles");
  private readonly outletBoxes: HTMLInputElement[] = [];
  private readonly submitBtn = el("button", "submit-query", "Search");
  private readonly hint = el("span", "form-hint");
  private readonly formError = el("div", "form-error");
  private readonly chipBox = el("div", "entity-chips");
  private readonly menu = el("div", "panel-menu");
  private readonly articlesBox = el("section", "articles-menu");
  private readonly logList = el("ol", "log-entries");
  private readonly toasts = el("div", "toasts");

  constructor(
    private readonly client: ApiClient,
    private readonly meta: MetaPayload,
    private readonly opts: PanelOptions = {},
  ) {
    this.root = el("section", "panel");
    this.root.appendChild(this.buildHeader());
    this.root.appendChild(this.buildForm());
    this.root.appendChild(this.formError);

    const wrap = el("div", "canvas-wrap");
    const svg = document.createElementNS("http://www.w3.org/2000/svg", "svg");
    svg.setAttribute("class", "graph-canvas");
    wrap.appendChild(svg);
    wrap.appendChild(this.menu);
    this.menu.hidden = true;
    this.root.appendChild(wrap);
    this.view = new GraphView(svg, {
      onNodeClick: (key) => this.toggleSelect(key),
      onNodeMenu: (key, ev) => this.openNodeMenu(key, ev),
      onEdgeClick: (edge) => this.expandEdgeTerms(edge),
      onCanvasMenu: (ev) => this.openCanvasMenu(ev),
    });

    this.articlesInput.type = "number";
    this.articlesInput.min = "1";
    this.articlesInput.value = "6";
    this.articlesBox.hidden = true;
    this.root.appendChild(this.articlesBox);

    const logBox = el("details", "request-log");
    logBox.appendChild(el("summary", "", "Request log"));
    logBox.appendChild(this.logList);
    this.root.appendChild(logBox);
    this.root.appendChild(this.toasts);

    document.addEventListener("click", (ev) => {
      if (!this.menu.hidden && !this.menu.contains(ev.target as Node)) {
        this.closeMenu();
      }
    });
    this.syncSubmitState();
  }

  private buildHeader(): HTMLElement {
    const header = el("header", "panel-header");
    header.appendChild(el("h2", "panel-title", this.opts.title ?? "Panel"));
    const close = el("button", "close-panel", "×");
    close.type = "button";
    close.title = "Close panel";
    close.addEventListener("click", () => {
      this.controller?.abort();
      this.root.remove();
      this.opts.onClose?.(this);
    });
    header.appendChild(close);
    return header;
  }

  private buildForm(): HTMLElement {
    const form = el("form", "query-form");
    form.addEventListener("submit", (ev) => {
      ev.preventDefault();
      this.submitSearch();
    });

    const entityRow = el("div", "form-row entities-row");
    entityRow.appendChild(el("label", "", "Entities"));
    entityRow.appendChild(this.chipBox);
    const entityInput = el("input", "entity-input");
    entityInput.placeholder = "type to search entities";
    entityInput.autocomplete = "off";
    entityRow.appendChild(entityInput);
    new Typeahead(entityInput, this.client, (s) => this.addChip(s));
    form.appendChild(entityRow);

    const span = this.meta.corpus;
    const rangeRow = el("div", "form-row");
    rangeRow.appendChild(el("label", "", "Range"));
    for (const input of [this.startInput, this.endInput]) {
      input.type = "date";
      if (span.start) {
        input.min = span.start;
      }
      if (span.end) {
        input.max = span.end;
      }
    }
    this.startInput.value = span.start ?? "";
    this.endInput.value = span.end ?? "";
    rangeRow.appendChild(this.startInput);
    rangeRow.appendChild(this.endInput);
    form.appendChild(rangeRow);

    const outletRow = el("fieldset", "outlets");
    outletRow.appendChild(el("legend", "", "Outlets"));
    for (const outlet of this.meta.outlets) {
      const label = el("label", "outlet-choice");
      const box = el("input");
      box.type = "checkbox";
      box.value = outlet;
      box.checked = true;
      label.appendChild(box);
      label.appendChild(document.createTextNode(outlet));
      outletRow.appendChild(label);
      this.outletBoxes.push(box);
    }
    form.appendChild(outletRow);

    const numRow = el("div", "form-row");
    numRow.appendChild(el("label", "", "Edges"));
    this.edgesInput.type = "number";
    this.edgesInput.min = "1";
    this.edgesInput.value = "10";
    numRow.appendChild(this.edgesInput);
    numRow.appendChild(el("label", "", "Terms"));
    this.termsInput.type = "number";
    this.termsInput.min = "0";
    this.termsInput.value = "10";
    numRow.appendChild(this.termsInput);
    form.appendChild(numRow);

    this.submitBtn.type = "submit";
    form.appendChild(this.submitBtn);
    form.appendChild(this.hint);
    return form;
  }

  // -- entity chips --------------------------------------------------

  addChip(s: Suggestion): void {
    if (this.chips.length >= 2 || this.chips.some((c) => c.id === s.entity_id)) {
      return;
    }
    this.chips.push({ id: s.entity_id, label: s.label });
    this.renderChips();
  }

  /** Test hook: seed a chip without a live typeahead round trip. */
  addEntity(id: string, label: string): void {
    this.addChip({ entity_id: id, label, etype: "", description: null, match_score: 0, occurrence_count: 0 });
  }

  removeChip(id: string): void {
    this.chips = this.chips.filter((c) => c.id !== id);
    this.renderChips();
  }

  private renderChips(): void {
    this.chipBox.textContent = "";
    for (const chip of this.chips) {
      const span = el("span", "chip", chip.label);
      span.dataset.id = chip.id;
      const remove = el("button", "chip-remove", "×");
      remove.type = "button";
      remove.addEventListener("click", () => this.removeChip(chip.id));
      span.appendChild(remove);
      this.chipBox.appendChild(span);
    }
    this.syncSubmitState();
  }

  private syncSubmitState(): void {
    const one = this.chips.length === 1;
    this.submitBtn.disabled = one;
    this.hint.textContent = one
      ? "pick a second entity for a targeted view, or none for a global one"
      : "";
  }

  // -- form -> request body -------------------------------------------

  selectedOutlets(): string[] | null {
    const picked = this.outletBoxes.filter((b) => b.checked).map((b) => b.value);
    if (picked.length === this.outletBoxes.length) {
      return null;
    }
    return picked.sort();
  }

  setOutlets(outlets: string[] | null): void {
    for (const box of this.outletBoxes) {
      box.checked = outlets === null || outlets.includes(box.value);
    }
  }

  setRange(start: string, end: string): void {
    this.startInput.value = start;
    this.endInput.value = end;
  }

  setCounts(numEdges: number, numTerms: number): void {
    this.edgesInput.value = String(numEdges);
    this.termsInput.value = String(numTerms);
  }

  contextBody(): QueryBody | null {
    this.formError.textContent = "";
    const start = this.startInput.value;
    const end = this.endInput.value;
    if (!start || !end) {
      this.formError.textContent = "both range dates are required";
      return null;
    }
    // mirror the server's 400 messages so inline and remote errors read alike
    if (start > end) {
      this.formError.textContent = `invalid date range: ${start} > ${end}`;
      return null;
    }
    const span = this.meta.corpus;
    if (span.start && span.end && (end < span.start || start > span.end)) {
      this.formError.textContent = `range does not overlap corpus span ${span.start}..${span.end}`;
      return null;
    }
    const outlets = this.selectedOutlets();
    if (outlets !== null && outlets.length === 0) {
      this.formError.textContent = "outlets must be omitted or non-empty";
      return null;
    }
    return {
      range: { start, end },
      outlets,
      num_edges: Number(this.edgesInput.value),
      num_terms: Number(this.termsInput.value),
    };
  }

  // -- dispatch -------------------------------------------------------

  private async dispatch<T>(
    kind: string,
    body: unknown,
    call: (signal: AbortSignal) => Promise<T>,
    apply: (payload: T) => void,
  ): Promise<void> {
    const id = ++this.reqSeq;
    this.controller?.abort();
    const controller = new AbortController();
    this.controller = controller;
    const entry: LogEntry = { kind, body, status: "pending" };
    this.log.push(entry);
    this.renderLog();

    let payload: T;
    try {
      payload = await call(controller.signal);
    } catch (err) {
      if (id !== this.reqSeq) {
        entry.status = "stale";
      } else if (err instanceof ApiRequestError) {
        entry.status = "error";
        this.toast(err.field ? `${err.field}: ${err.message}` : err.message);
      } else if ((err as Error)?.name === "AbortError") {
        entry.status = "stale";
      } else {
        entry.status = "error";
        this.toast("request failed: " + String((err as Error)?.message ?? err));
      }
      this.renderLog();
      return;
    }
    if (id !== this.reqSeq) {
      // a newer submission superseded this one while it was in flight
      entry.status = "stale";
      this.renderLog();
      return;
    }
    entry.status = "ok";
    apply(payload);
    this.refresh();
  }

  submitSearch(): Promise<void> {
    if (this.chips.length === 1) {
      return Promise.resolve();
    }
    const ctx = this.contextBody();
    if (ctx === null) {
      return Promise.resolve();
    }
    if (this.chips.length === 0) {
      return this.dispatch(
        "global",
        ctx,
        (signal) => this.client.topicsGlobal(ctx, signal),
        (payload) => {
          this.model.clear();
          this.model.applyTopics(payload);
        },
      );
    }
    const body = { ...ctx, entity_a: this.chips[0].id, entity_b: this.chips[1].id };
    return this.dispatch(
      "targeted",
      body,
      (signal) => this.client.topicsTargeted(body, signal),
      (payload) => {
        this.model.clear();
        this.model.applyTopics(payload);
      },
    );
  }

  expandAdjacent(entityId: string): Promise<void> {
    const ctx = this.contextBody();
    if (ctx === null) {
      return Promise.resolve();
    }
    const body = { ...ctx, entity: entityId };
    return this.dispatch(
      "adjacent",
      body,
      (signal) => this.client.expandAdjacent(body, signal),
      (payload) => this.model.applyAdjacent(payload),
    );
  }

  expandEdgeTerms(edge: GraphEdge): Promise<void> {
    const a = this.model.node(edge.a);
    const b = this.model.node(edge.b);
    if (!a || !b || a.kind !== "entity" || b.kind !== "entity") {
      return Promise.resolve();
    }
    const ctx = this.contextBody();
    if (ctx === null) {
      return Promise.resolve();
    }
    const body = { ...ctx, entity_a: a.id, entity_b: b.id };
    return this.dispatch(
      "terms",
      body,
      (signal) => this.client.expandTerms(body, signal),
      (payload) => this.model.applyTerms(payload),
    );
  }

  recommendSelected(): Promise<void> {
    const nodes = this.model.selectedDescriptors();
    if (nodes.length < 2) {
      return Promise.resolve();
    }
    const ctx = this.contextBody();
    if (ctx === null) {
      return Promise.resolve();
    }
    const body = {
      range: ctx.range,
      outlets: ctx.outlets,
      nodes,
      num_articles: Number(this.articlesInput.value || "6"),
    };
    return this.dispatch(
      "recommend",
      body,
      (signal) => this.client.recommend(body, signal),
      (payload) => this.renderArticles(payload),
    );
  }

  // -- local graph edits ----------------------------------------------

  deleteNode(key: string): void {
    if (!this.model.nodes.has(key)) {
      return;
    }
    this.model.deleteNode(key);
    this.log.push({ kind: "delete", body: { node: key }, status: "local" });
    this.refresh();
  }

  toggleSelect(key: string): void {
    this.model.toggleSelect(key);
    this.refresh();
  }

  // -- menus ----------------------------------------------------------

  private menuItem(label: string, enabled: boolean, action: () => void): HTMLButtonElement {
    const btn = el("button", "menu-item", label);
    btn.type = "button";
    btn.disabled = !enabled;
    btn.addEventListener("click", () => {
      this.closeMenu();
      action();
    });
    return btn;
  }

  private openMenuAt(ev: MouseEvent): void {
    this.menu.textContent = "";
    this.menu.hidden = false;
    this.menu.style.left = `${ev.offsetX}px`;
    this.menu.style.top = `${ev.offsetY}px`;
  }

  private appendRecommendItem(): void {
    const count = this.model.selection.size;
    this.menu.appendChild(
      this.menuItem(`Recommend articles (${count} selected)`, count >= 2, () => {
        void this.recommendSelected();
      }),
    );
  }

  openNodeMenu(key: string, ev: MouseEvent): void {
    const node = this.model.node(key);
    if (!node) {
      return;
    }
    this.openMenuAt(ev);
    if (node.kind === "entity") {
      this.menu.appendChild(
        this.menuItem("Expand neighbors", true, () => {
          void this.expandAdjacent(node.id);
        }),
      );
      this.menu.appendChild(
        this.menuItem("Knowledge base page", true, () => {
          window.open(kbUrl(node), "_blank", "noopener");
        }),
      );
    }
    this.menu.appendChild(this.menuItem("Delete node", true, () => this.deleteNode(key)));
    this.appendRecommendItem();
  }

  openCanvasMenu(ev: MouseEvent): void {
    this.openMenuAt(ev);
    this.appendRecommendItem();
  }

  closeMenu(): void {
    this.menu.hidden = true;
    this.menu.textContent = "";
  }

  // -- rendering ------------------------------------------------------

  private renderArticles(payload: RecommendPayload): void {
    this.articlesBox.textContent = "";
    this.articlesBox.hidden = false;
    this.articlesBox.appendChild(el("h3", "", "Recommended articles"));
    const row = el("div", "articles-count-row");
    row.appendChild(el("label", "", "Articles"));
    row.appendChild(this.articlesInput);
    this.articlesBox.appendChild(row);
    if (payload.articles.length === 0) {
      this.articlesBox.appendChild(el("p", "empty-state", "no articles"));
      return;
    }
    const list = el("ol", "article-list");
    for (const article of payload.articles) {
      const item = el("li", "article");
      const title = article.title ?? article.id;
      if (article.url) {
        const link = el("a", "", title);
        link.href = article.url;
        link.target = "_blank";
        link.rel = "noopener";
        item.appendChild(link);
      } else {
        item.appendChild(el("span", "", title));
      }
      item.appendChild(el("span", "article-meta", ` ${article.outlet} ${article.date}`));
      list.appendChild(item);
    }
    this.articlesBox.appendChild(list);
  }

  private renderLog(): void {
    this.logList.textContent = "";
    this.log.forEach((entry, i) => {
      const item = el("li", `log-entry log-${entry.status}`);
      item.dataset.kind = entry.kind;
      item.textContent = `#${i + 1} ${entry.kind} ${canonicalJson(entry.body)} [${entry.status}]`;
      this.logList.appendChild(item);
    });
  }

  toast(message: string): void {
    const note = el("div", "toast", message);
    this.toasts.appendChild(note);
    setTimeout(() => note.remove(), 4000);
  }

  setShared(shared: Set<string>): void {
    this.shared = shared;
    this.view.render(this.model, this.shared);
  }

  renderGraph(): void {
    this.view.render(this.model, this.shared);
  }

  private refresh(): void {
    this.renderLog();
    if (this.opts.onGraphChange) {
      this.opts.onGraphChange();
    } else {
      this.renderGraph();
    }
  }
}
