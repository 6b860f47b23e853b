import { describe, expect, it } from "vitest";

import { forceLayout } from "../src/force.js";

describe("force layout", () => {
  const edges: [number, number, number][] = [[1, 2, 1], [2, 3, 1], [3, 4, 1]];

  it("is deterministic", () => {
    const a = forceLayout([1, 2, 3, 4, 9], edges, 400, 300);
    const b = forceLayout([1, 2, 3, 4, 9], edges, 400, 300);
    expect(a).toEqual(b);
  });

  it("keeps points inside the canvas and all nodes present", () => {
    const ids = Array.from({ length: 60 }, (_, i) => i * 3);
    const pts = forceLayout(ids, [], 500, 400);
    expect(pts.map((p) => p.id)).toEqual(ids);
    for (const p of pts) {
      expect(p.x).toBeGreaterThanOrEqual(0);
      expect(p.x).toBeLessThanOrEqual(500);
      expect(p.y).toBeGreaterThanOrEqual(0);
      expect(p.y).toBeLessThanOrEqual(400);
    }
  });

  it("keeps linked pairs closer on average than unlinked ones", () => {
    const pts = forceLayout([1, 2, 3, 4, 9], edges, 400, 300);
    const pos = new Map(pts.map((p) => [p.id, p]));
    const d = (a: number, b: number) =>
      Math.hypot(pos.get(a)!.x - pos.get(b)!.x, pos.get(a)!.y - pos.get(b)!.y);
    const linked = edges.map(([u, v]) => d(u, v));
    const unlinked: number[] = [];
    const ids = [1, 2, 3, 4, 9];
    for (let i = 0; i < ids.length; i++) {
      for (let j = i + 1; j < ids.length; j++) {
        if (!edges.some(([u, v]) => (u === ids[i] && v === ids[j])
                                 || (u === ids[j] && v === ids[i]))) {
          unlinked.push(d(ids[i], ids[j]));
        }
      }
    }
    const avg = (xs: number[]) => xs.reduce((s, x) => s + x, 0) / xs.length;
    expect(avg(linked)).toBeLessThan(avg(unlinked));
    expect(pts).toHaveLength(5);
  });

  it("handles the empty graph", () => {
    expect(forceLayout([], [], 100, 100)).toEqual([]);
  });
});
