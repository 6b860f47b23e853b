/* Thin typed client over fetch for the graphtree service. */

import type {
  CepsPayload,
  GncPayload,
  LeafPayload,
  SearchPayload,
  TreeSkeleton,
} from "./types.js";

export class ApiError extends Error {
  constructor(readonly status: number, readonly detail: unknown) {
    super(`service responded ${status}: ${JSON.stringify(detail)}`);
  }
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export interface CepsRequest {
  leaf: string;
  query_nodes: number[];
  budget: number;
  len?: number;
  c?: number;
}

export class ApiClient {
  constructor(
    private readonly base: string = "",
    private readonly fetchFn: FetchLike = (u, i) => fetch(u, i),
  ) {}

  private async get<T>(path: string): Promise<T> {
    const resp = await this.fetchFn(this.base + path);
    return this.unwrap<T>(resp);
  }

  private async post<T>(path: string, body: unknown): Promise<T> {
    const resp = await this.fetchFn(this.base + path, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
    return this.unwrap<T>(resp);
  }

  private async unwrap<T>(resp: Response): Promise<T> {
    if (!resp.ok) {
      let detail: unknown = resp.statusText;
      try {
        detail = (await resp.json()).detail;
      } catch {
        /* non-JSON error body */
      }
      throw new ApiError(resp.status, detail);
    }
    return (await resp.json()) as T;
  }

  tree(): Promise<TreeSkeleton> {
    return this.get("/tree");
  }

  leaf(id: string): Promise<LeafPayload> {
    return this.get(`/leaf/${encodeURIComponent(id)}`);
  }

  snc(a: string, b: string): Promise<{ edges: [number, number, number][]; count: number }> {
    return this.post("/snc", { a, b });
  }

  gnc(node: number): Promise<GncPayload> {
    return this.post("/gnc", { node });
  }

  ceps(req: CepsRequest): Promise<CepsPayload> {
    return this.post("/ceps", req);
  }

  search(label: string): Promise<SearchPayload> {
    return this.get(`/search?label=${encodeURIComponent(label)}`);
  }
}
