/* Browser shell: binds the controller to the page. Everything drawn
 * here comes straight out of a render model; this file only makes SVG. */

import { ApiClient } from "./api.js";
import { ExplorerController, RenderModel } from "./controller.js";

const SVG_NS = "http://www.w3.org/2000/svg";
const WIDTH = 960;
const HEIGHT = 640;

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  text = "",
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [k, v] of Object.entries(attrs)) node.setAttribute(k, v);
  if (text) node.textContent = text;
  return node;
}

function svgEl(tag: string, attrs: Record<string, string> = {}): SVGElement {
  const node = document.createElementNS(SVG_NS, tag);
  for (const [k, v] of Object.entries(attrs)) node.setAttribute(k, v);
  return node;
}

const LEVEL_FILL = ["#dbe7f5", "#c5d9ee", "#afccc8", "#f2e3c5"];

export function mount(root: HTMLElement, serviceBase = ""): ExplorerController {
  const api = new ApiClient(serviceBase);
  const toolbar = el("div", { class: "toolbar" });
  const crumbs = el("span", { class: "crumbs" });
  const modeSelect = el("select", { title: "abstraction" });
  for (const mode of ["supernodes", "leaf-subgraphs", "graph-nodes"]) {
    modeSelect.appendChild(el("option", { value: mode }, mode));
  }
  const levelSelect = el("select", { title: "level" });
  const searchBox = el("input", { placeholder: "label search", type: "search" });
  const budget = el("input", { type: "range", min: "2", max: "120", step: "1" });
  const budgetLabel = el("span", { class: "budget" });
  const runButton = el("button", {}, "summarize selection");
  const clearButton = el("button", {}, "back to leaf");
  const status = el("div", { class: "status" });
  const svg = svgEl("svg", {
    viewBox: `0 0 ${WIDTH} ${HEIGHT}`,
    width: String(WIDTH),
    height: String(HEIGHT),
  }) as SVGSVGElement;

  toolbar.append(crumbs, modeSelect, levelSelect, searchBox, budget, budgetLabel,
                 runButton, clearButton);
  root.append(toolbar, svg, status);

  const controller = new ExplorerController(api, {
    width: WIDTH,
    height: HEIGHT,
    onRender: (model) => {
      draw(model);
      history.replaceState(null, "", "?" + controller.url());
    },
  });

  modeSelect.addEventListener("change", () =>
    controller.setMode(modeSelect.value as never));
  levelSelect.addEventListener("change", () =>
    controller.setLevel(Number(levelSelect.value)));
  searchBox.addEventListener("change", () => {
    if (searchBox.value) {
      controller.searchLabel(searchBox.value).catch((err) => {
        status.textContent = String(err);
      });
    }
  });
  budget.addEventListener("input", () => controller.setBudget(Number(budget.value)));
  runButton.addEventListener("click", () => void controller.runSummary());
  clearButton.addEventListener("click", () => controller.clearSummary());

  function draw(model: RenderModel): void {
    svg.replaceChildren();
    crumbs.replaceChildren();
    model.breadcrumbs.forEach((id, i) => {
      if (i) crumbs.append(" / ");
      const link = el("a", { href: "#" }, id);
      link.addEventListener("click", (ev) => {
        ev.preventDefault();
        controller.focusRecord(id);
      });
      crumbs.append(link);
    });
    if (controller.skeleton) {
      const levels = new Set(controller.skeleton.records.map((r) => r.level));
      levelSelect.replaceChildren();
      for (const lvl of [...levels].sort((a, b) => a - b)) {
        levelSelect.appendChild(el("option", { value: String(lvl) }, `level ${lvl}`));
      }
      levelSelect.value = String(
        controller.skeleton.records.find((r) => r.id === controller.state.focus)?.level ?? 1);
    }
    modeSelect.value = model.mode;
    budget.value = String(model.budget);
    budgetLabel.textContent = ` budget ${model.budget}`;
    status.textContent = model.notice;

    if (model.summary) {
      drawGraph(model.summary.points,
                model.summary.payload.edges,
                new Set(model.summary.payload.queries),
                model.summary.payload.nodes
                  .filter((n) => n.label)
                  .map((n): [number, string] => [n.id, n.label!]));
      status.textContent =
        `${model.summary.displayedNodeCount} nodes, captured share ` +
        `${model.summary.iratio.toFixed(4)}` +
        (model.notice ? ` | ${model.notice}` : "");
      return;
    }
    if (model.leaf && model.mode === "graph-nodes") {
      drawLeaf(model);
      return;
    }
    if (model.hierarchy) drawHierarchy(model);
  }

  function drawGraph(
    points: { id: number; x: number; y: number }[],
    edges: [number, number, number][],
    queries: Set<number>,
    labels: [number, string][],
  ): void {
    const pos = new Map(points.map((p) => [p.id, p]));
    const labelOf = new Map(labels);
    for (const [u, v] of edges) {
      const a = pos.get(u);
      const b = pos.get(v);
      if (!a || !b) continue;
      svg.appendChild(svgEl("line", {
        x1: a.x.toFixed(1), y1: a.y.toFixed(1),
        x2: b.x.toFixed(1), y2: b.y.toFixed(1),
        stroke: "#8d9aa8", "stroke-width": "0.9",
      }));
    }
    for (const point of points) {
      const isQuery = queries.has(point.id);
      const circle = svgEl("circle", {
        cx: point.x.toFixed(1),
        cy: point.y.toFixed(1),
        r: isQuery ? "8" : "5",
        fill: isQuery ? "#d4712b" : "#3f6fa5",
        stroke: "#fff",
        "stroke-width": "1",
      });
      const title = svgEl("title");
      const label = labelOf.get(point.id);
      title.textContent = label ? `${point.id}: ${label}` : String(point.id);
      circle.appendChild(title);
      svg.appendChild(circle);
      if (isQuery || label) {
        const text = svgEl("text", {
          x: (point.x + 9).toFixed(1),
          y: (point.y + 4).toFixed(1),
          "font-size": "11",
          fill: "#333",
          "pointer-events": "none",
        });
        text.textContent = label ?? String(point.id);
        svg.appendChild(text);
      }
    }
  }

  function drawHierarchy(model: RenderModel): void {
    const layout = model.hierarchy!;
    for (const box of layout.containers) {
      const rect = svgEl("rect", {
        x: box.x.toFixed(1),
        y: box.y.toFixed(1),
        width: Math.max(box.w - 2, 1).toFixed(1),
        height: Math.max(box.h - 2, 1).toFixed(1),
        rx: "6",
        fill: LEVEL_FILL[box.depth % LEVEL_FILL.length],
        stroke: "#51708f",
        "stroke-width": box.depth === 0 ? "1.5" : "0.7",
        cursor: "pointer",
      });
      rect.addEventListener("click", () => {
        if (box.kind === "leaf") void controller.expandLeaf(box.id);
        else controller.focusRecord(box.id);
      });
      const title = svgEl("title");
      title.textContent = `${box.id} (${box.coverage} nodes)`;
      rect.appendChild(title);
      svg.appendChild(rect);
      if (box.depth === 0) {
        const label = svgEl("text", {
          x: (box.x + 8).toFixed(1),
          y: (box.y + 18).toFixed(1),
          "font-size": "13",
          fill: "#233",
          "pointer-events": "none",
        });
        label.textContent = `${box.id} · ${box.coverage}`;
        svg.appendChild(label);
      }
    }
    if (model.mode !== "graph-nodes") {
      for (const band of layout.edges) {
        const line = svgEl("line", {
          x1: band.x1.toFixed(1),
          y1: band.y1.toFixed(1),
          x2: band.x2.toFixed(1),
          y2: band.y2.toFixed(1),
          stroke: "#d4712b",
          "stroke-opacity": "0.55",
          "stroke-width": band.thickness.toFixed(2),
        });
        const title = svgEl("title");
        title.textContent =
          `${band.a} - ${band.b}: ${band.size} edges, weight ${band.weight}`;
        line.appendChild(title);
        svg.appendChild(line);
      }
    }
  }

  function drawLeaf(model: RenderModel): void {
    const view = model.leaf!;
    const pos = new Map(view.points.map((p) => [p.id, p]));
    for (const [u, v] of view.payload.edges) {
      const a = pos.get(u)!;
      const b = pos.get(v)!;
      svg.appendChild(svgEl("line", {
        x1: a.x.toFixed(1), y1: a.y.toFixed(1),
        x2: b.x.toFixed(1), y2: b.y.toFixed(1),
        stroke: "#9aa7b5", "stroke-width": "0.6",
      }));
    }
    const external = new Set<number>();
    if (view.overlay) {
      for (const [u, v] of view.overlay.edges) {
        external.add(u);
        external.add(v);
      }
    }
    const selected = new Set(view.selection);
    for (const point of view.points) {
      const circle = svgEl("circle", {
        cx: point.x.toFixed(1),
        cy: point.y.toFixed(1),
        r: selected.has(point.id) ? "7" : "4",
        fill: selected.has(point.id) ? "#d4712b"
          : point.id === view.highlighted ? "#7a3fb8" : "#3f6fa5",
        stroke: external.has(point.id) ? "#c22" : "#fff",
        "stroke-width": external.has(point.id) ? "2" : "0.8",
        cursor: "pointer",
      });
      circle.addEventListener("click", () => controller.toggleSelect(point.id));
      circle.addEventListener("dblclick", () => void controller.highlightGnc(point.id));
      const node = view.payload.nodes.find((n) => n.id === point.id);
      const title = svgEl("title");
      title.textContent = node?.label ? `${point.id}: ${node.label}` : String(point.id);
      circle.appendChild(title);
      svg.appendChild(circle);
    }
    status.textContent =
      `${view.payload.member_count} members, ${view.payload.edges.length} internal edges` +
      (view.overlay ? ` | node ${view.overlay.node}: ${view.overlay.count} external edges` : "") +
      (model.notice ? ` | ${model.notice}` : "");
  }

  void controller.init(location.search.replace(/^\?/, ""));
  return controller;
}
