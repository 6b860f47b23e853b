/* DOM-free explorer logic: holds the view state, talks to the service
 * and produces render models. The browser shell (app.ts) only turns
 * models into SVG and routes events back here, so everything that can
 * go wrong is testable without a DOM.
 *
 * Every number a model exposes (weights, counts, scores, captured
 * share) is copied from a service payload, never recomputed. */

import { ApiClient } from "./api.js";
import { forceLayout, Point } from "./force.js";
import {
  AbstractionMode,
  RequestSequencer,
  ViewState,
  decodeViewState,
  defaultViewState,
  encodeViewState,
} from "./state.js";
import { HierarchyLayout, layoutHierarchy } from "./treemap.js";
import type {
  CepsPayload,
  GncPayload,
  LeafPayload,
  SearchPayload,
  TreeSkeleton,
} from "./types.js";

export interface LeafView {
  payload: LeafPayload;
  points: Point[];
  selection: number[];
  highlighted?: number;
  overlay?: GncPayload;        // external edges of one node, server-provided
}

export interface SummaryView {
  payload: CepsPayload;
  points: Point[];
  displayedNodeCount: number;  // always payload.nodes.length
  iratio: number;              // always payload.iratio
}

export interface RenderModel {
  mode: AbstractionMode;
  breadcrumbs: string[];       // root .. focus
  hierarchy: HierarchyLayout | null;
  leaf: LeafView | null;
  summary: SummaryView | null;
  budget: number;
  notice: string;
}

export type Scheduler = (fn: () => void, ms: number) => () => void;

const defaultScheduler: Scheduler = (fn, ms) => {
  const t = setTimeout(fn, ms);
  return () => clearTimeout(t);
};

export interface ControllerOptions {
  width?: number;
  height?: number;
  debounceMs?: number;
  schedule?: Scheduler;
  onRender?: (model: RenderModel) => void;
}

export class ExplorerController {
  state: ViewState = defaultViewState();
  skeleton: TreeSkeleton | null = null;
  leafPayload: LeafPayload | null = null;
  summary: CepsPayload | null = null;
  overlay: GncPayload | null = null;
  highlighted: number | null = null;
  notice = "";

  private readonly width: number;
  private readonly height: number;
  private readonly debounceMs: number;
  private readonly schedule: Scheduler;
  private readonly onRender: (model: RenderModel) => void;
  private readonly sequencer = new RequestSequencer();
  private cancelPending: (() => void) | null = null;

  constructor(private readonly api: ApiClient, opts: ControllerOptions = {}) {
    this.width = opts.width ?? 960;
    this.height = opts.height ?? 640;
    this.debounceMs = opts.debounceMs ?? 300;
    this.schedule = opts.schedule ?? defaultScheduler;
    this.onRender = opts.onRender ?? (() => undefined);
  }

  async init(query = ""): Promise<void> {
    this.state = decodeViewState(query);
    this.skeleton = await this.api.tree();
    if (!this.state.focus) this.state.focus = this.skeleton.root;
    const openLeaf = this.state.loadedLeaves.at(-1);
    if (openLeaf) {
      await this.expandLeaf(openLeaf);
      if (this.state.selection.length) await this.runSummary();
    }
    this.render();
  }

  url(): string {
    return encodeViewState(this.state);
  }

  // ---- hierarchy navigation -------------------------------------------

  focusRecord(id: string): void {
    if (!this.recordById(id)) {
      this.notice = `unknown record ${id}`;
      this.render();
      return;
    }
    this.state.focus = id;
    this.state.level = this.recordById(id)!.level;
    this.leafPayload = null;
    this.summary = null;
    this.overlay = null;
    this.state.selection = [];
    this.render();
  }

  setMode(mode: AbstractionMode): void {
    this.state.mode = mode;
    this.render();
  }

  setLevel(level: number): void {
    // climb the focus to the requested shallower level
    this.state.level = level;
    let cur = this.recordById(this.state.focus);
    while (cur && cur.level > level && cur.parent) {
      cur = this.recordById(cur.parent);
    }
    if (cur) this.state.focus = cur.id;
    this.render();
  }

  // ---- leaf subgraphs ---------------------------------------------------

  async expandLeaf(id: string): Promise<void> {
    this.leafPayload = await this.api.leaf(id);
    if (!this.state.loadedLeaves.includes(id)) this.state.loadedLeaves.push(id);
    this.summary = null;
    this.overlay = null;
    this.state.selection = this.state.selection.filter((n) =>
      this.leafPayload!.nodes.some((m) => m.id === n),
    );
    this.state.mode = "graph-nodes";
    this.render();
  }

  toggleSelect(node: number): void {
    if (!this.leafPayload) return;
    if (!this.leafPayload.nodes.some((m) => m.id === node)) return;
    const at = this.state.selection.indexOf(node);
    if (at >= 0) this.state.selection.splice(at, 1);
    else this.state.selection.push(node);
    this.render();
  }

  // ---- summarization ------------------------------------------------------

  async runSummary(): Promise<void> {
    if (!this.leafPayload || !this.state.selection.length) {
      this.notice = "select query nodes inside an open leaf first";
      this.render();
      return;
    }
    const ticket = this.sequencer.next();
    try {
      const payload = await this.api.ceps({
        leaf: this.leafPayload.id,
        query_nodes: [...this.state.selection],
        budget: this.state.budget,
      });
      if (!this.sequencer.accept(ticket)) return;  // superseded by a newer run
      this.summary = payload;
      this.notice = payload.warnings.length ? payload.warnings.join("; ") : "";
    } catch (err) {
      if (!this.sequencer.accept(ticket)) return;
      this.summary = null;
      this.notice = String(err);
    }
    this.render();
  }

  setBudget(budget: number): void {
    this.state.budget = budget;
    this.render();
    if (this.cancelPending) this.cancelPending();
    this.cancelPending = this.schedule(() => {
      this.cancelPending = null;
      void this.runSummary();
    }, this.debounceMs);
  }

  clearSummary(): void {
    this.summary = null;
    this.render();
  }

  // ---- single-node connectivity and search -------------------------------

  async highlightGnc(node: number): Promise<void> {
    const payload = await this.api.gnc(node);
    this.overlay = payload;
    this.highlighted = node;
    this.notice = payload.count === 0 ? `node ${node} has no external connections` : "";
    this.render();
  }

  async searchLabel(label: string): Promise<SearchPayload> {
    const hit = await this.api.search(label);
    this.state.focus = hit.ancestor_path[0] ?? hit.leaf;
    await this.expandLeaf(hit.leaf);
    this.highlighted = hit.node;
    this.render();
    return hit;
  }

  // ---- render models --------------------------------------------------------

  breadcrumbs(): string[] {
    const chain: string[] = [];
    let cur = this.recordById(this.state.focus);
    while (cur) {
      chain.unshift(cur.id);
      cur = cur.parent ? this.recordById(cur.parent) : undefined;
    }
    return chain;
  }

  currentModel(): RenderModel {
    const hierarchy = this.skeleton
      ? layoutHierarchy(this.skeleton, this.state.focus, this.width, this.height)
      : null;
    let leaf: LeafView | null = null;
    let summary: SummaryView | null = null;
    if (this.summary) {
      const points = forceLayout(
        this.summary.nodes.map((n) => n.id),
        this.summary.edges,
        this.width,
        this.height,
      );
      summary = {
        payload: this.summary,
        points,
        displayedNodeCount: this.summary.nodes.length,
        iratio: this.summary.iratio,
      };
    } else if (this.leafPayload) {
      const points = forceLayout(
        this.leafPayload.nodes.map((n) => n.id),
        this.leafPayload.edges,
        this.width,
        this.height,
      );
      leaf = {
        payload: this.leafPayload,
        points,
        selection: [...this.state.selection],
        highlighted: this.highlighted ?? undefined,
        overlay: this.overlay ?? undefined,
      };
    }
    return {
      mode: this.state.mode,
      breadcrumbs: this.breadcrumbs(),
      hierarchy,
      leaf,
      summary,
      budget: this.state.budget,
      notice: this.notice,
    };
  }

  private recordById(id: string) {
    return this.skeleton?.records.find((r) => r.id === id);
  }

  private render(): void {
    this.onRender(this.currentModel());
  }
}
