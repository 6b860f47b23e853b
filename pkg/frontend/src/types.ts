/* Payload shapes of the graphtree service endpoints. Field names match
 * the documented JSON schemas one to one; the UI never derives graph
 * quantities itself, it only re-arranges these values. */

export interface SuperEdgeSummary {
  a: string;
  b: string;
  weight: number;
  size: number;
}

export interface RecordSummary {
  id: string;
  level: number;
  parent: string | null;
  kind: "leaf" | "super";
  coverage_size: number;
  open_node_count: number;
  children: string[];
  member_count?: number;
  internal_edge_count?: number;
  super_edges?: SuperEdgeSummary[];
}

export interface TreeSkeleton {
  format: string;
  root: string;
  k: number;
  levels: number;
  stats: Record<string, unknown>;
  records: RecordSummary[];
}

export interface LeafNode {
  id: number;
  label?: string;
}

export interface LeafPayload {
  id: string;
  level: number;
  parent: string | null;
  member_count: number;
  nodes: LeafNode[];
  edges: [number, number, number][];
  open_nodes: number[];
}

export interface EdgeListPayload {
  count: number;
  edges: [number, number, number][];
}

export interface GncPayload extends EdgeListPayload {
  node: number;
  leaf: string;
  labels: Record<string, string>;
}

export interface CepsNode {
  id: number;
  score: number;
  label?: string;
}

export interface CepsPayload {
  format: string;
  leaf: string;
  queries: number[];
  params: {
    budget: number;
    c: number;
    tol: number;
    max_iter: number;
    max_path_len: number;
  };
  iratio: number;
  total_score: number;
  converged: boolean;
  warnings: string[];
  nodes: CepsNode[];
  edges: [number, number, number][];
  key_paths: { source: number; destination: number; nodes: number[] }[];
}

export interface SearchPayload {
  label: string;
  node: number;
  leaf: string;
  ancestor_path: string[];
}
