/** Entity typeahead against /api/suggest.
 *
 * Suggestions render exactly in server order. Each keystroke supersedes
 * the previous lookup; late responses are dropped by sequence number.
 */

import type { ApiClient } from "./api";
import type { Suggestion } from "./types";

export class Typeahead {
  readonly list: HTMLUListElement;
  private seq = 0;
  private controller: AbortController | null = null;

  constructor(
    readonly input: HTMLInputElement,
    private readonly client: ApiClient,
    private readonly onPick: (s: Suggestion) => void,
    private readonly limit = 8,
  ) {
    this.list = document.createElement("ul");
    this.list.className = "typeahead-list";
    this.list.hidden = true;
    input.insertAdjacentElement("afterend", this.list);
    input.addEventListener("input", () => {
      void this.lookup(input.value.trim());
    });
  }

  async lookup(query: string): Promise<void> {
    const id = ++this.seq;
    this.controller?.abort();
    this.controller = null;
    if (!query) {
      this.show([]);
      return;
    }
    const controller = new AbortController();
    this.controller = controller;
    let suggestions: Suggestion[];
    try {
      const payload = await this.client.suggest(query, this.limit, controller.signal);
      suggestions = payload.suggestions;
    } catch {
      return;
    }
    if (id !== this.seq) {
      // superseded by a newer keystroke
      return;
    }
    this.show(suggestions);
  }

  private show(suggestions: Suggestion[]): void {
    this.list.textContent = "";
    this.list.hidden = suggestions.length === 0;
    for (const s of suggestions) {
      const item = document.createElement("li");
      item.dataset.entityId = s.entity_id;
      item.textContent = `${s.label} (${s.etype})`;
      item.addEventListener("mousedown", (ev) => {
        ev.preventDefault();
        this.onPick(s);
        this.input.value = "";
        this.show([]);
      });
      this.list.appendChild(item);
    }
  }
}
