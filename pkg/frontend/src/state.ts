/* View state and its URL round-trip, so any focus + selection is a
 * shareable link. The state holds only user intent; server payloads
 * (skeleton, leaf, summary) are cached next to it by the controller. */

export type AbstractionMode = "graph-nodes" | "leaf-subgraphs" | "supernodes";

export interface ViewState {
  focus: string;                 // focused record id ("" until the skeleton loads)
  mode: AbstractionMode;
  level: number;                 // selected hierarchy level, root = 1
  loadedLeaves: string[];        // leaves expanded in this session
  selection: number[];           // query-node selection inside the open leaf
  budget: number;                // summary budget slider
}

export const DEFAULT_BUDGET = 40;

export function defaultViewState(): ViewState {
  return {
    focus: "",
    mode: "supernodes",
    level: 1,
    loadedLeaves: [],
    selection: [],
    budget: DEFAULT_BUDGET,
  };
}

const MODES: AbstractionMode[] = ["graph-nodes", "leaf-subgraphs", "supernodes"];

export function encodeViewState(state: ViewState): string {
  const params = new URLSearchParams();
  if (state.focus) params.set("focus", state.focus);
  if (state.mode !== "supernodes") params.set("mode", state.mode);
  if (state.level !== 1) params.set("level", String(state.level));
  if (state.loadedLeaves.length) params.set("leaves", state.loadedLeaves.join(","));
  if (state.selection.length) params.set("sel", state.selection.join(","));
  if (state.budget !== DEFAULT_BUDGET) params.set("budget", String(state.budget));
  return params.toString();
}

export function decodeViewState(query: string): ViewState {
  const params = new URLSearchParams(query);
  const state = defaultViewState();
  state.focus = params.get("focus") ?? "";
  const mode = params.get("mode");
  if (mode && (MODES as string[]).includes(mode)) state.mode = mode as AbstractionMode;
  const level = Number(params.get("level"));
  if (Number.isInteger(level) && level >= 1) state.level = level;
  const leaves = params.get("leaves");
  if (leaves) state.loadedLeaves = leaves.split(",").filter(Boolean);
  const sel = params.get("sel");
  if (sel) {
    state.selection = sel
      .split(",")
      .map((s) => Number(s))
      .filter((n) => Number.isInteger(n) && n >= 0);
  }
  const budget = Number(params.get("budget"));
  if (Number.isInteger(budget) && budget >= 1) state.budget = budget;
  return state;
}

/* Monotone ticket counter: responses carrying a stale ticket are
 * discarded, so a slider dragged through several values only ever
 * applies the newest summary. */
export class RequestSequencer {
  private issued = 0;
  private applied = 0;

  next(): number {
    return ++this.issued;
  }

  accept(ticket: number): boolean {
    if (ticket <= this.applied) return false;
    this.applied = ticket;
    return true;
  }
}
