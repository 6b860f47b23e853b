"""Regenerate the test fixtures from a real service instance.

Builds a deterministic labeled tree, runs the HTTP app against it and
dumps selected endpoint payloads under test/fixtures/. Run from the
repository root:

    python3 frontend/scripts/capture_fixtures.py
"""

from __future__ import annotations

import json
import random
import sys
import tempfile
from pathlib import Path

from fastapi.testclient import TestClient

from graphtree.core import Graph, generate_synthetic
from graphtree.partition import HierarchySpec, partition_recursive
from graphtree.service import create_app
from graphtree.tree import build

FIXTURES = Path(__file__).resolve().parent.parent / "test" / "fixtures"


def make_graph() -> Graph:
    g = generate_synthetic(400, 5, seed=11)
    rng = random.Random(12)
    triples = [(u, v, round(rng.uniform(0.5, 4.0), 3)) for u, v, _ in g.edges()]
    labels = {i: f"node-{i:04d}" for i in range(0, 400, 3)}
    return Graph.from_edges(400, triples, labels)


def main() -> int:
    FIXTURES.mkdir(parents=True, exist_ok=True)
    g = make_graph()
    assignment = partition_recursive(g, HierarchySpec(3, 3), seed=5)
    with tempfile.TemporaryDirectory() as tmp:
        tree = build(g, assignment, tmp)
        tree.save(tmp)
        leaf_id = max((r for r in tree.iter_records() if r.is_leaf),
                      key=lambda r: len(r.member_nodes)).id
        members = tree.leaf_members(leaf_id)
        queries = members[:3]
        gnc_node = next(v for v in members if tree.gnc(v))
        # a label inside the same leaf, so search navigation lands there
        label = tree.labels[next(v for v in members if v in tree.labels)]

        with TestClient(create_app(tree)) as client:
            def dump(name: str, payload) -> None:
                (FIXTURES / name).write_text(json.dumps(payload, indent=1, sort_keys=True))
                print(f"wrote {name}")

            dump("tree.json", client.get("/tree").json())
            dump("leaf.json", client.get(f"/leaf/{leaf_id}").json())
            for budget in (40, 10):
                body = {"leaf": leaf_id, "query_nodes": queries, "budget": budget}
                dump(f"ceps_b{budget}.json", client.post("/ceps", json=body).json())
            dump("gnc.json", client.post("/gnc", json={"node": gnc_node}).json())
            dump("search.json", client.get("/search", params={"label": label}).json())
            meta = {"leaf": leaf_id, "queries": queries, "gnc_node": gnc_node,
                    "label": label}
            dump("meta.json", meta)
    return 0


if __name__ == "__main__":
    sys.exit(main())
