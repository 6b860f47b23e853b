/* Small deterministic force layout for leaf subgraphs: seeded circular
 * start, spring attraction along edges, pairwise repulsion, centering.
 * Positions are a pure function of the inputs, which keeps snapshots
 * and tests stable (no Math.random). */

export interface Point {
  id: number;
  x: number;
  y: number;
}

export function forceLayout(
  nodeIds: number[],
  edges: [number, number, number][],
  width: number,
  height: number,
  iterations = 150,
): Point[] {
  const n = nodeIds.length;
  if (n === 0) return [];
  const index = new Map(nodeIds.map((id, i) => [id, i]));
  const cx = width / 2;
  const cy = height / 2;
  const radius = Math.min(width, height) * 0.38;
  const xs = new Float64Array(n);
  const ys = new Float64Array(n);
  for (let i = 0; i < n; i++) {
    // golden-angle spiral start: spreads nodes without randomness
    const angle = i * 2.399963229728653;
    const r = radius * Math.sqrt((i + 0.5) / n);
    xs[i] = cx + r * Math.cos(angle);
    ys[i] = cy + r * Math.sin(angle);
  }
  const springs: [number, number][] = [];
  for (const [u, v] of edges) {
    const a = index.get(u);
    const b = index.get(v);
    if (a !== undefined && b !== undefined) springs.push([a, b]);
  }
  const ideal = radius / Math.max(1, Math.sqrt(n / 4));
  for (let it = 0; it < iterations; it++) {
    const t = 1 - it / iterations;          // cooling
    const fx = new Float64Array(n);
    const fy = new Float64Array(n);
    for (let a = 0; a < n; a++) {
      for (let b = a + 1; b < n; b++) {
        let dx = xs[a] - xs[b];
        let dy = ys[a] - ys[b];
        let d2 = dx * dx + dy * dy;
        if (d2 < 1e-6) {
          dx = ((a * 31 + b * 17) % 13) - 6;  // deterministic tie-break nudge
          dy = ((a * 13 + b * 7) % 11) - 5;
          d2 = dx * dx + dy * dy + 1;
        }
        const rep = Math.min((ideal * ideal) / d2, 4);
        fx[a] += dx * rep;
        fy[a] += dy * rep;
        fx[b] -= dx * rep;
        fy[b] -= dy * rep;
      }
    }
    for (const [a, b] of springs) {
      const dx = xs[b] - xs[a];
      const dy = ys[b] - ys[a];
      const d = Math.sqrt(dx * dx + dy * dy) || 1;
      const pull = (d - ideal) / d * 0.25;
      fx[a] += dx * pull;
      fy[a] += dy * pull;
      fx[b] -= dx * pull;
      fy[b] -= dy * pull;
    }
    for (let i = 0; i < n; i++) {
      xs[i] += Math.max(-8, Math.min(8, fx[i])) * t;
      ys[i] += Math.max(-8, Math.min(8, fy[i])) * t;
      xs[i] += (cx - xs[i]) * 0.01;
      ys[i] += (cy - ys[i]) * 0.01;
      xs[i] = Math.max(8, Math.min(width - 8, xs[i]));
      ys[i] = Math.max(8, Math.min(height - 8, ys[i]));
    }
  }
  return nodeIds.map((id, i) => ({ id, x: xs[i], y: ys[i] }));
}
