"""Build a hierarchy over a synthetic graph and query it.

Walks the whole storage loop: generate a graph, partition it, fill the
tree (leaf subgraphs land on disk), then answer connectivity questions
from the in-memory part alone and reopen everything from the manifest.

Run:  python3 demos/01_build_and_query.py
"""

import tempfile
from pathlib import Path

import graphtree as gt

workdir = Path(tempfile.mkdtemp(prefix="graphtree-demo-"))
print(f"working in {workdir}\n")

# A 20K-node random graph with average degree 12.
g = gt.generate_synthetic(20_000, 12, seed=7)
print(f"graph: {g.node_count} nodes, {g.edge_count} edges")

# Recursive 4-way partitioning, 3 levels -> 16 leaves of ~1250 nodes.
spec = gt.HierarchySpec(k=4, levels=3)
assignment = gt.partition_recursive(g, spec, seed=0)
print(f"leaves: {len(assignment.leaf_paths())}")

tree = gt.build(g, assignment, workdir)
tree.save(workdir)
s = tree.stats
print(f"records: {s.total_records} (height {s.height}), "
      f"external edge share r = {s.external_ratio:.3f}")
print(f"in memory: {tree.resident_edge_count()} edges; "
      f"on disk: {g.edge_count - tree.resident_edge_count()} edges\n")

# Edges between two arbitrary records, from the common parent's super-edge.
for a, b in [("s00", "s01"), ("s000", "s012"), ("s013", "s031")]:
    edges = tree.snc(a, b)
    w = sum(e.w for e in edges)
    print(f"snc({a}, {b}): {len(edges)} edges, total weight {w:.0f}")

# All edges of one node leaving its leaf, found by climbing open records.
node = 4242
external = tree.gnc(node)
print(f"\ngnc({node}): {len(external)} external edges "
      f"(degree {g.degree(node)}, leaf {tree.leaf_of(node)})")

# Leaf subgraphs load on demand, nothing else is touched.
leaf_id = tree.leaf_of(node)
sub = tree.load_leaf(leaf_id)
print(f"leaf {leaf_id}: {sub.node_count} members, {sub.edge_count} internal edges")

# The saved manifest reopens to an identical tree.
again = gt.GraphTree.open(workdir)
assert again.snc("s00", "s01") == tree.snc("s00", "s01")
assert again.gnc(node) == external
print("\nreopened from manifest: answers identical")
