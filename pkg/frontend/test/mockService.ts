/* Replays captured service payloads (test/fixtures/*.json) behind a
 * fetch-compatible function, counting calls per endpoint. The fixtures
 * come from the real HTTP service (scripts/capture_fixtures.py), so the
 * client is tested against genuine wire shapes. */

import { readFileSync } from "node:fs";

import type { FetchLike } from "../src/api.js";

function fixture<T>(name: string): T {
  const url = new URL(`./fixtures/${name}`, import.meta.url);
  return JSON.parse(readFileSync(url, "utf-8")) as T;
}

export interface Meta {
  leaf: string;
  queries: number[];
  gnc_node: number;
  label: string;
}

export const meta = fixture<Meta>("meta.json");

export interface MockService {
  fetch: FetchLike;
  calls: Record<string, number>;
  totalCalls(): number;
  /** queue a deferred response for the next matching ceps budget */
  delayCeps(budget: number): () => void;
}

export function mockService(): MockService {
  const calls: Record<string, number> = {};
  const gates = new Map<number, Promise<void>>();

  const bump = (key: string) => {
    calls[key] = (calls[key] ?? 0) + 1;
  };

  const json = (payload: unknown, status = 200): Response =>
    new Response(JSON.stringify(payload), {
      status,
      headers: { "Content-Type": "application/json" },
    });

  const fetchFn: FetchLike = async (url, init) => {
    const method = init?.method ?? "GET";
    const path = url.replace(/^https?:\/\/[^/]+/, "");
    if (method === "GET" && path === "/tree") {
      bump("/tree");
      return json(fixture("tree.json"));
    }
    if (method === "GET" && path.startsWith("/leaf/")) {
      bump("/leaf");
      const id = decodeURIComponent(path.slice("/leaf/".length));
      if (id !== meta.leaf) return json({ detail: `unknown record id '${id}'` }, 404);
      return json(fixture("leaf.json"));
    }
    if (method === "POST" && path === "/ceps") {
      const body = JSON.parse(String(init?.body));
      bump(`/ceps b=${body.budget}`);
      const payload = fixture(`ceps_b${body.budget}.json`);
      const gate = gates.get(body.budget);
      if (gate) await gate;
      return json(payload);
    }
    if (method === "POST" && path === "/gnc") {
      bump("/gnc");
      const body = JSON.parse(String(init?.body));
      if (body.node === meta.gnc_node) return json(fixture("gnc.json"));
      return json({ node: body.node, leaf: meta.leaf, count: 0, edges: [], labels: {} });
    }
    if (method === "GET" && path.startsWith("/search")) {
      bump("/search");
      const label = new URLSearchParams(path.split("?")[1]).get("label");
      if (label !== meta.label) return json({ detail: "label not found" }, 404);
      return json(fixture("search.json"));
    }
    return json({ detail: `unmocked ${method} ${path}` }, 500);
  };

  return {
    fetch: fetchFn,
    calls,
    totalCalls: () => Object.values(calls).reduce((s, c) => s + c, 0),
    delayCeps(budget: number) {
      let release!: () => void;
      gates.set(budget, new Promise<void>((resolve) => (release = resolve)));
      return () => {
        gates.delete(budget);
        release();
      };
    },
  };
}
