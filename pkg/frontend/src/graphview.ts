/** SVG renderer for the topic graph.
 *
 * Re-renders the whole scene from the model on every change; positions
 * come from the deterministic layout, so identical graph state yields
 * byte-identical markup.
 */

import type { GraphEdge, GraphModel } from "./graph";
import { runLayout } from "./layout";

export const LAYOUT_SEED = 1337;
export const VIEW_WIDTH = 800;
export const VIEW_HEIGHT = 520;

const ETYPE_COLORS: Record<string, string> = {
  actor: "#e8590c",
  location: "#2f9e44",
  organization: "#3b5bdb",
  term: "#868e96",
};
const FALLBACK_COLOR = "#9c36b5";

export interface ViewHandlers {
  onNodeClick?: (key: string, ev: MouseEvent) => void;
  onNodeMenu?: (key: string, ev: MouseEvent) => void;
  onEdgeClick?: (edge: GraphEdge, ev: MouseEvent) => void;
  onCanvasMenu?: (ev: MouseEvent) => void;
}

const SVG_NS = "http://www.w3.org/2000/svg";

function svgEl<K extends keyof SVGElementTagNameMap>(tag: K, attrs: Record<string, string>): SVGElementTagNameMap[K] {
  const el = document.createElementNS(SVG_NS, tag);
  for (const [name, value] of Object.entries(attrs)) {
    el.setAttribute(name, value);
  }
  return el;
}

export class GraphView {
  constructor(
    readonly svg: SVGSVGElement,
    private readonly handlers: ViewHandlers = {},
  ) {
    svg.setAttribute("viewBox", `0 0 ${VIEW_WIDTH} ${VIEW_HEIGHT}`);
    svg.addEventListener("contextmenu", (ev) => {
      ev.preventDefault();
      this.handlers.onCanvasMenu?.(ev as MouseEvent);
    });
  }

  render(model: GraphModel, shared: Set<string> = new Set()): void {
    const positions = runLayout(
      model.sortedNodeKeys(),
      model.sortedEdges().map((e) => [e.a, e.b] as [string, string]),
      { width: VIEW_WIDTH, height: VIEW_HEIGHT, seed: LAYOUT_SEED },
    );
    this.svg.textContent = "";

    const edgeGroup = svgEl("g", { class: "edges" });
    for (const edge of model.sortedEdges()) {
      const pa = positions.get(edge.a);
      const pb = positions.get(edge.b);
      if (!pa || !pb) {
        continue;
      }
      const line = svgEl("line", {
        class: "edge",
        "data-edge": edge.key,
        x1: String(pa.x),
        y1: String(pa.y),
        x2: String(pb.x),
        y2: String(pb.y),
        stroke: "#adb5bd",
        "stroke-width": (1 + 3 * Math.min(1, edge.weight)).toFixed(2),
      });
      const title = svgEl("title", {});
      title.textContent =
        edge.docCount === null
          ? `score ${edge.weight}`
          : `weight ${edge.weight} docs ${edge.docCount} days ${edge.daysActive}`;
      line.appendChild(title);
      line.addEventListener("click", (ev) => this.handlers.onEdgeClick?.(edge, ev as MouseEvent));
      edgeGroup.appendChild(line);
    }
    this.svg.appendChild(edgeGroup);

    const nodeGroup = svgEl("g", { class: "nodes" });
    for (const key of model.sortedNodeKeys()) {
      const node = model.node(key);
      const pos = positions.get(key);
      if (!node || !pos) {
        continue;
      }
      const classes = ["node", `etype-${node.etype}`];
      if (model.selection.has(key)) {
        classes.push("selected");
      }
      if (node.kind === "entity" && shared.has(node.id)) {
        classes.push("shared");
      }
      const g = svgEl("g", {
        class: classes.join(" "),
        "data-key": key,
        transform: `translate(${pos.x},${pos.y})`,
      });
      if (classes.includes("shared")) {
        g.appendChild(svgEl("circle", { class: "halo", r: "14", fill: "none", stroke: "#fab005", "stroke-width": "3" }));
      }
      const radius = node.kind === "entity" ? 10 : 6;
      const dot = svgEl("circle", {
        r: String(radius),
        fill: ETYPE_COLORS[node.etype] ?? FALLBACK_COLOR,
        stroke: model.selection.has(key) ? "#1971c2" : "#343a40",
        "stroke-width": model.selection.has(key) ? "3" : "1",
      });
      const label = svgEl("text", { y: String(radius + 12), "text-anchor": "middle", class: "label" });
      label.textContent = node.label;
      g.appendChild(dot);
      g.appendChild(label);
      g.addEventListener("click", (ev) => this.handlers.onNodeClick?.(key, ev as MouseEvent));
      g.addEventListener("contextmenu", (ev) => {
        ev.preventDefault();
        ev.stopPropagation();
        this.handlers.onNodeMenu?.(key, ev as MouseEvent);
      });
      nodeGroup.appendChild(g);
    }
    this.svg.appendChild(nodeGroup);
  }
}
