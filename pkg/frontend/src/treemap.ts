/* Nested-container layout for the hierarchy view.
 *
 * The focused record's children become rectangles sized by coverage,
 * recursing into grandchildren so the structure below stays visible;
 * super-edges between siblings are drawn center-to-center with stroke
 * width proportional to their weight. Slice-and-dice orientation
 * alternates per level, which keeps the layout deterministic.
 */

import type { RecordSummary, TreeSkeleton } from "./types.js";

export interface Container {
  id: string;
  kind: "leaf" | "super";
  level: number;
  depth: number;              // 0 = child of focus
  x: number;
  y: number;
  w: number;
  h: number;
  coverage: number;
}

export interface EdgeBand {
  a: string;
  b: string;
  weight: number;
  size: number;
  x1: number;
  y1: number;
  x2: number;
  y2: number;
  thickness: number;
}

export interface HierarchyLayout {
  focus: string;
  containers: Container[];
  edges: EdgeBand[];
}

const PAD = 6;
const MIN_THICKNESS = 1;
const MAX_THICKNESS = 14;
const MAX_DEPTH = 2;

export function recordIndex(skeleton: TreeSkeleton): Map<string, RecordSummary> {
  return new Map(skeleton.records.map((r) => [r.id, r]));
}

function sliceDice(
  items: { id: string; value: number }[],
  x: number,
  y: number,
  w: number,
  h: number,
  horizontal: boolean,
): Map<string, { x: number; y: number; w: number; h: number }> {
  const out = new Map<string, { x: number; y: number; w: number; h: number }>();
  const total = items.reduce((s, i) => s + Math.max(i.value, 1), 0);
  let pos = 0;
  for (const item of items) {
    const frac = Math.max(item.value, 1) / total;
    if (horizontal) {
      out.set(item.id, { x: x + pos * w, y, w: frac * w, h });
    } else {
      out.set(item.id, { x, y: y + pos * h, w, h: frac * h });
    }
    pos += frac;
  }
  return out;
}

export function layoutHierarchy(
  skeleton: TreeSkeleton,
  focus: string,
  width: number,
  height: number,
): HierarchyLayout {
  const index = recordIndex(skeleton);
  const focusRec = index.get(focus) ?? index.get(skeleton.root)!;
  const containers: Container[] = [];
  const edges: EdgeBand[] = [];

  const place = (
    rec: RecordSummary,
    box: { x: number; y: number; w: number; h: number },
    depth: number,
  ) => {
    if (depth > 0) {
      containers.push({
        id: rec.id,
        kind: rec.kind,
        level: rec.level,
        depth: depth - 1,
        x: box.x,
        y: box.y,
        w: box.w,
        h: box.h,
        coverage: rec.coverage_size,
      });
    }
    if (depth >= MAX_DEPTH || rec.kind === "leaf" || !rec.children.length) return;
    const inner = {
      x: box.x + PAD,
      y: box.y + PAD,
      w: Math.max(box.w - 2 * PAD, 1),
      h: Math.max(box.h - 2 * PAD, 1),
    };
    const kids = rec.children
      .map((id) => index.get(id)!)
      .filter(Boolean)
      .map((r) => ({ id: r.id, value: r.coverage_size }));
    const boxes = sliceDice(kids, inner.x, inner.y, inner.w, inner.h, inner.w >= inner.h);
    const centers = new Map<string, { cx: number; cy: number }>();
    for (const child of rec.children) {
      const b = boxes.get(child)!;
      centers.set(child, { cx: b.x + b.w / 2, cy: b.y + b.h / 2 });
      place(index.get(child)!, b, depth + 1);
    }
    const weights = (rec.super_edges ?? []).map((se) => se.weight);
    const maxWeight = weights.length ? Math.max(...weights) : 1;
    for (const se of rec.super_edges ?? []) {
      const ca = centers.get(se.a);
      const cb = centers.get(se.b);
      if (!ca || !cb) continue;
      edges.push({
        a: se.a,
        b: se.b,
        weight: se.weight,
        size: se.size,
        x1: ca.cx,
        y1: ca.cy,
        x2: cb.cx,
        y2: cb.cy,
        thickness:
          MIN_THICKNESS + (MAX_THICKNESS - MIN_THICKNESS) * (se.weight / maxWeight),
      });
    }
  };

  place(focusRec, { x: 0, y: 0, w: width, h: height }, 0);
  return { focus: focusRec.id, containers, edges };
}
