from __future__ import annotations

import random

import pytest

from graphtree.core import Graph, generate_synthetic
from graphtree.partition import HierarchySpec, PartitionAssignment
from graphtree.tree import build


def make_random_graph(n: int, avg_degree: float, seed: int, *,
                      weighted: bool = False, labeled: bool = False) -> Graph:
    g = generate_synthetic(n, avg_degree, seed)
    if not weighted and not labeled:
        return g
    rng = random.Random(seed + 1)
    triples = [(u, v, round(rng.uniform(0.5, 4.0), 3) if weighted else w)
               for u, v, w in g.edges()]
    labels = None
    if labeled:
        labels = {i: f"node-{i:04d}" for i in range(0, n, 3)}
    return Graph.from_edges(n, triples, labels)


def worked_example() -> tuple[Graph, PartitionAssignment]:
    """Three-level, two-way hierarchy with a hand-checkable layout.

    Leaves: s000={0,1,2}, s001={3,4}, s010={5,6}, s011={7,8}. Node 2's
    edges to 3 and 4 cross the two leaves under s00, one edge crosses
    under s01, and (0,5) only resolves at the root.
    """
    edges = [
        (0, 1, 1.0), (1, 2, 1.0),          # internal to s000
        (3, 4, 1.0),                        # internal to s001
        (2, 3, 1.0), (2, 4, 1.0),           # cross s000-s001
        (5, 6, 1.0),                        # internal to s010
        (7, 8, 1.0),                        # internal to s011
        (5, 7, 1.0),                        # cross s010-s011
        (0, 5, 1.0),                        # cross s00-s01 (root level)
    ]
    labels = {0: "alice", 2: "bram", 5: "carol", 7: "dora"}
    g = Graph.from_edges(9, edges, labels)
    paths = [(0, 0), (0, 0), (0, 0), (0, 1), (0, 1), (1, 0), (1, 0), (1, 1), (1, 1)]
    assignment = PartitionAssignment(paths, HierarchySpec(2, 3))
    return g, assignment


@pytest.fixture()
def example_tree(tmp_path):
    g, assignment = worked_example()
    return g, assignment, build(g, assignment, tmp_path / "tree")


@pytest.fixture(scope="session")
def labeled_tree_dir(tmp_path_factory):
    """A saved medium-sized labeled tree shared by service and CLI tests."""
    g = make_random_graph(400, 5, seed=11, weighted=True, labeled=True)
    from graphtree.partition import partition_recursive
    assignment = partition_recursive(g, HierarchySpec(3, 3), seed=5)
    out = tmp_path_factory.mktemp("shared-tree")
    tree = build(g, assignment, out)
    tree.save(out)
    return out, g, assignment
