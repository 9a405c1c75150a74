/** Application shell: corpus meta, panel management, shared-entity
 * highlighting across parallel panels. */

import { ApiClient } from "./api";
import { Panel } from "./panel";
import type { MetaPayload } from "./types";

export class App {
  readonly panels: Panel[] = [];
  private readonly panelHost: HTMLElement;
  private panelCounter = 0;

  constructor(
    private readonly root: HTMLElement,
    private readonly client: ApiClient,
    private readonly meta: MetaPayload,
  ) {
    root.textContent = "";
    const bar = document.createElement("header");
    bar.className = "app-bar";
    const title = document.createElement("h1");
    title.textContent = "Newsgraph explorer";
    bar.appendChild(title);
    const stats = document.createElement("span");
    stats.className = "corpus-stats";
    const span = meta.corpus;
    stats.textContent = `${span.documents} articles, ${span.start ?? "?"} to ${span.end ?? "?"}, ${meta.outlets.length} outlets`;
    bar.appendChild(stats);
    const add = document.createElement("button");
    add.className = "add-panel";
    add.type = "button";
    add.textContent = "+ Compare panel";
    add.addEventListener("click", () => this.addPanel());
    bar.appendChild(add);
    root.appendChild(bar);

    this.panelHost = document.createElement("main");
    this.panelHost.className = "panels";
    root.appendChild(this.panelHost);
    this.addPanel();
  }

  addPanel(): Panel {
    this.panelCounter += 1;
    const panel = new Panel(this.client, this.meta, {
      title: `Panel ${this.panelCounter}`,
      onGraphChange: () => this.updateShared(),
      onClose: (p) => {
        const at = this.panels.indexOf(p);
        if (at >= 0) {
          this.panels.splice(at, 1);
        }
        this.updateShared();
      },
    });
    this.panels.push(panel);
    this.panelHost.appendChild(panel.root);
    return panel;
  }

  /** Entities shown in two or more panels get a highlight ring. */
  updateShared(): void {
    const seenIn = new Map<string, number>();
    for (const panel of this.panels) {
      for (const id of panel.model.entityIds()) {
        seenIn.set(id, (seenIn.get(id) ?? 0) + 1);
      }
    }
    const shared = new Set<string>();
    for (const [id, count] of seenIn) {
      if (count >= 2) {
        shared.add(id);
      }
    }
    for (const panel of this.panels) {
      panel.setShared(shared);
    }
  }
}

export async function initApp(root: HTMLElement, client: ApiClient): Promise<App> {
  const meta = await client.meta();
  return new App(root, client, meta);
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  void initApp(document.getElementById("app") as HTMLElement, new ApiClient());
}
