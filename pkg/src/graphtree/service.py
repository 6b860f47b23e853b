"""HTTP/JSON facade over one built tree.

One tree per process; every endpoint is a read-only, deterministic
function of (tree, request). Endpoints:

    GET  /health               liveness, root id, request counters
    GET  /tree                 hierarchy skeleton with super-edge weights
    GET  /supernode/{id}       one record: children, open-node count,
                               super-edges among its children
    GET  /leaf/{id}            full leaf subgraph (original ids, labels);
                               X-Duration-Ms header exposes service time
    POST /snc  {a, b}          edges between two records
    POST /gnc  {node | label}  external edges of one graph node
    POST /ceps {leaf, query_nodes | query_labels, budget, len?, c?, ...}
                               center-piece summarization of a leaf
    GET  /search?label=...     exact label lookup with ancestor path

Unknown ids map to 404; nested-record connectivity, ambiguous labels and
invalid query sets map to 422 with an explanatory detail.
"""

from __future__ import annotations

import time
from pathlib import Path
from typing import Optional, Union

from fastapi import FastAPI, HTTPException, Response
from pydantic import BaseModel

from .ceps import CepsError, CepsParams, extract, goodness_scores
from .core import EdgeRef, GraphError
from .tree import (AmbiguousLabelError, GraphTree, NestedSuperNodesError,
                   UnknownRecordError)

DEFAULT_CEPS_TIME_BUDGET_S = 10.0


def edge_rows(edges: set[EdgeRef]) -> list[list]:
    """Canonical JSON form of an edge set: sorted [u, v, w] triples."""
    return [[e.u, e.v, e.w] for e in sorted(edges)]


class SncRequest(BaseModel):
    a: str
    b: str


class GncRequest(BaseModel):
    node: Optional[int] = None
    label: Optional[str] = None


class CepsRequest(BaseModel):
    leaf: str
    query_nodes: Optional[list[int]] = None
    query_labels: Optional[list[str]] = None
    budget: int
    len: Optional[int] = None
    c: Optional[float] = None
    tol: Optional[float] = None
    max_iter: Optional[int] = None


def _record_summary(tree: GraphTree, rec) -> dict:
    entry = {
        "id": rec.id,
        "level": rec.level,
        "parent": rec.parent,
        "kind": "leaf" if rec.is_leaf else "super",
        "coverage_size": rec.coverage_size,
        "open_node_count": len(rec.open_nodes),
    }
    if rec.is_leaf:
        entry["children"] = []
        entry["member_count"] = len(rec.member_nodes)
        entry["internal_edge_count"] = rec.internal_edge_count
    else:
        entry["children"] = list(rec.children)
        entry["super_edges"] = [
            {"a": se.a, "b": se.b, "weight": se.weight, "size": se.size}
            for _, se in sorted(rec.super_edges.items())
        ]
    return entry


def create_app(tree: Union[GraphTree, str, Path], *, cors: bool = False,
               ceps_defaults: Optional[dict] = None,
               ceps_time_budget_s: float = DEFAULT_CEPS_TIME_BUDGET_S) -> FastAPI:
    """Build the application around an open tree (or a tree directory)."""
    if not isinstance(tree, GraphTree):
        tree = GraphTree.open(tree)
    defaults = {"c": 0.85, "tol": 1e-9, "max_iter": 100, "len": 4}
    if ceps_defaults:
        defaults.update(ceps_defaults)
    counters: dict[str, int] = {}

    app = FastAPI(title="graphtree service", version="1")
    if cors:
        from fastapi.middleware.cors import CORSMiddleware
        app.add_middleware(CORSMiddleware, allow_origins=["*"],
                           allow_methods=["*"], allow_headers=["*"])

    def bump(op: str) -> None:
        counters[op] = counters.get(op, 0) + 1

    def find_record(record_id: str):
        try:
            return tree.record(record_id)
        except UnknownRecordError as exc:
            raise HTTPException(status_code=404, detail=str(exc)) from exc

    def resolve_label(label: str) -> int:
        try:
            hit = tree.label_search(label)
        except AmbiguousLabelError as exc:
            raise HTTPException(
                status_code=422,
                detail={"error": "ambiguous label", "label": label,
                        "candidates": exc.candidates}) from exc
        if hit is None:
            raise HTTPException(status_code=404, detail=f"label {label!r} not found")
        return hit[0]

    @app.get("/health")
    def health():
        bump("health")
        return {"status": "ok", "root": tree.root_id,
                "node_count": len(tree.node_index),
                "requests": dict(sorted(counters.items()))}

    @app.get("/tree")
    def tree_skeleton():
        bump("tree")
        return {
            "format": "tree-skeleton@1",
            "root": tree.root_id,
            "k": tree.k,
            "levels": tree.levels,
            "stats": tree.stats.to_dict(),
            "records": [_record_summary(tree, rec) for rec in tree.iter_records()],
        }

    @app.get("/supernode/{record_id:path}")
    def supernode(record_id: str):
        bump("supernode")
        return _record_summary(tree, find_record(record_id))

    @app.get("/leaf/{record_id:path}")
    def leaf(record_id: str, response: Response):
        bump("leaf")
        started = time.perf_counter()
        rec = find_record(record_id)
        if not rec.is_leaf:
            raise HTTPException(status_code=422,
                                detail=f"record {record_id!r} is not a leaf")
        subgraph = tree.load_leaf(record_id)
        members = rec.member_nodes
        payload = {
            "id": rec.id,
            "level": rec.level,
            "parent": rec.parent,
            "member_count": len(members),
            "nodes": [
                {"id": n, **({"label": tree.labels[n]} if n in tree.labels else {})}
                for n in members
            ],
            "edges": [[members[u], members[v], w] for u, v, w in subgraph.edges()],
            "open_nodes": sorted(rec.open_nodes),
        }
        response.headers["X-Duration-Ms"] = f"{(time.perf_counter() - started) * 1e3:.6f}"
        return payload

    @app.post("/snc")
    def snc(req: SncRequest):
        bump("snc")
        find_record(req.a)
        find_record(req.b)
        try:
            edges = tree.snc(req.a, req.b)
        except NestedSuperNodesError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        rows = edge_rows(edges)
        return {"a": req.a, "b": req.b, "count": len(rows),
                "total_weight": sum(r[2] for r in rows), "edges": rows}

    @app.post("/gnc")
    def gnc(req: GncRequest):
        bump("gnc")
        if (req.node is None) == (req.label is None):
            raise HTTPException(status_code=422,
                                detail="provide exactly one of 'node' or 'label'")
        node = req.node if req.node is not None else resolve_label(req.label)
        try:
            edges = tree.gnc(node)
        except GraphError as exc:
            raise HTTPException(status_code=404, detail=str(exc)) from exc
        rows = edge_rows(edges)
        touched = sorted({n for row in rows for n in (row[0], row[1])})
        return {
            "node": node,
            "leaf": tree.leaf_of(node),
            "count": len(rows),
            "edges": rows,
            "labels": {str(n): tree.labels[n] for n in touched if n in tree.labels},
        }

    @app.post("/ceps")
    def ceps(req: CepsRequest):
        bump("ceps")
        rec = find_record(req.leaf)
        if not rec.is_leaf:
            raise HTTPException(status_code=422, detail=f"record {req.leaf!r} is not a leaf")
        if (req.query_nodes is None) == (req.query_labels is None):
            raise HTTPException(status_code=422,
                                detail="provide exactly one of 'query_nodes' or 'query_labels'")
        queries = req.query_nodes if req.query_nodes is not None else \
            [resolve_label(lab) for lab in req.query_labels]
        if not queries:
            raise HTTPException(status_code=422, detail="query set is empty")
        members = rec.member_nodes
        local = {orig: i for i, orig in enumerate(members)}
        missing = [q for q in queries if q not in local]
        if missing:
            raise HTTPException(
                status_code=422,
                detail=f"query nodes {missing} are not members of leaf {req.leaf!r}")
        try:
            params = CepsParams(
                budget=req.budget,
                c=req.c if req.c is not None else defaults["c"],
                tol=req.tol if req.tol is not None else defaults["tol"],
                max_iter=req.max_iter if req.max_iter is not None else defaults["max_iter"],
                max_path_len=req.len if req.len is not None else defaults["len"],
            )
            subgraph = tree.load_leaf(req.leaf)
            local_queries = [local[q] for q in queries]
            scores = goodness_scores(subgraph, local_queries, params)
            piece = extract(subgraph, local_queries, scores, params,
                            time_budget_s=ceps_time_budget_s)
        except CepsError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        payload = piece.to_payload(
            scores,
            node_ids={i: members[i] for i in range(len(members))},
            labels=dict(subgraph.labels),
        )
        payload["leaf"] = req.leaf
        return payload

    @app.get("/search")
    def search(label: str):
        bump("search")
        node = resolve_label(label)
        leaf_id = tree.leaf_of(node)
        return {
            "label": label,
            "node": node,
            "leaf": leaf_id,
            "ancestor_path": tree.ancestors(leaf_id),
        }

    return app
