"""Recursive k-way hierarchy assignment.

Every graph node receives a *path*: the sequence of child indices that
walks from the hierarchy root down to the node's leaf. Paths may be
shorter than the declared depth when a part became too small to split
further, so the induced tree need not be complete. External assignments
(for example from a dedicated partitioning tool) are interchangeable
with the built-in heuristic through the same TSV format:

    <node-id><TAB><path>

with the path written as slash-separated child indices ("0/3/1/2");
a lone "." denotes the empty path of a single-leaf hierarchy.
"""

from __future__ import annotations

import hashlib
import math
import random
from collections import deque
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Optional, Union

from .core import Graph, GraphError, _open_text

Pathkey = tuple[int, ...]


class AssignmentError(GraphError):
    """Invalid partition assignment."""


@dataclass(frozen=True)
class HierarchySpec:
    """Shape of the hierarchy: k children per split, `levels` total levels
    counting the root as level 1."""

    k: int
    levels: int

    def __post_init__(self):
        if self.k < 2:
            raise AssignmentError("k must be at least 2")
        if self.levels < 2:
            raise AssignmentError("levels must be at least 2")

    @property
    def max_depth(self) -> int:
        return self.levels - 1


class PartitionAssignment:
    """Maps every node to the path of its leaf.

    Invariants enforced on construction: one path per node, child indices
    in [0, k), depth at most levels-1, and the set of distinct leaf paths
    is prefix-free (no leaf sits inside another leaf's subtree).
    """

    def __init__(self, paths: list[Pathkey], spec: HierarchySpec):
        self.spec = spec
        self.paths = [tuple(p) for p in paths]
        leaves: set[Pathkey] = set()
        for node, path in enumerate(self.paths):
            if len(path) > spec.max_depth:
                raise AssignmentError(f"node {node}: path {path} deeper than levels-1={spec.max_depth}")
            for idx in path:
                if not 0 <= idx < spec.k:
                    raise AssignmentError(f"node {node}: child index {idx} outside [0, {spec.k})")
            leaves.add(path)
        for path in leaves:
            for depth in range(len(path)):
                if path[:depth] in leaves:
                    raise AssignmentError(
                        f"inconsistent paths: leaf {path[:depth]} is a prefix of leaf {path}")
        self._leaves = sorted(leaves)

    @property
    def node_count(self) -> int:
        return len(self.paths)

    def leaf_paths(self) -> list[Pathkey]:
        return list(self._leaves)

    def nodes_by_leaf(self) -> dict[Pathkey, list[int]]:
        out: dict[Pathkey, list[int]] = {p: [] for p in self._leaves}
        for node, path in enumerate(self.paths):
            out[path].append(node)
        return out


def _derive_seed(seed: int, prefix: Pathkey) -> int:
    digest = hashlib.blake2b(f"{seed}:{prefix}".encode(), digest_size=8).digest()
    return int.from_bytes(digest, "big")


def _pick_seeds(nodes: list[int], adj: dict[int, list[int]], k: int, rng: random.Random) -> list[int]:
    """Greedy farthest-point seeds by BFS hop distance, first seed random."""
    INF = len(nodes) + 1
    dist = {v: INF for v in nodes}
    seeds = [nodes[rng.randrange(len(nodes))]]
    for _ in range(k - 1):
        q = deque([seeds[-1]])
        dist[seeds[-1]] = 0
        while q:
            v = q.popleft()
            for u in adj[v]:
                if dist[u] > dist[v] + 1:
                    dist[u] = dist[v] + 1
                    q.append(u)
        chosen = set(seeds)
        best, best_d = None, -1
        for v in nodes:  # nodes sorted, so ties resolve to the lowest id
            if v not in chosen and dist[v] > best_d:
                best, best_d = v, dist[v]
        seeds.append(best)
    return seeds


def _grow_regions(nodes: list[int], adj: dict[int, list[int]], seeds: list[int]) -> dict[int, int]:
    """Round-robin multi-source BFS: each region claims one node per turn.

    Nodes unreachable from every seed are spread over the smallest
    regions afterwards.
    """
    k = len(seeds)
    region = {v: -1 for v in nodes}
    queues = [deque() for _ in range(k)]
    sizes = [0] * k
    for i, s in enumerate(seeds):
        region[s] = i
        sizes[i] += 1
        queues[i].extend(adj[s])
    active = True
    while active:
        active = False
        for i in range(k):
            q = queues[i]
            while q:
                v = q.popleft()
                if region[v] == -1:
                    region[v] = i
                    sizes[i] += 1
                    q.extend(adj[v])
                    active = True
                    break
    for v in nodes:
        if region[v] == -1:
            tgt = min(range(k), key=lambda i: (sizes[i], i))
            region[v] = tgt
            sizes[tgt] += 1
    return region


def _rebalance(nodes: list[int], adj: dict[int, list[int]], region: dict[int, int], k: int) -> None:
    """Move nodes until region sizes hit floor/ceil of n/k exactly.

    Boundary passes steal nodes adjacent to an undersized region, which
    keeps regions contiguous; when an undersized region has no frontier
    at all (its seed landed in a tiny component) a single node is
    teleported into it so the next pass can grow it contiguously.
    """
    n = len(nodes)
    base, rem = divmod(n, k)
    targets = [base + (1 if i < rem else 0) for i in range(k)]
    sizes = [0] * k
    for v in nodes:
        sizes[region[v]] += 1
    guard = 3 * k + 50
    for _ in range(guard):
        if all(sizes[i] >= targets[i] for i in range(k)):
            return
        moved = False
        for v in nodes:
            src = region[v]
            if sizes[src] <= targets[src]:
                continue
            dsts = sorted({region[u] for u in adj[v] if sizes[region[u]] < targets[region[u]]})
            if dsts:
                dst = dsts[0]
                region[v] = dst
                sizes[src] -= 1
                sizes[dst] += 1
                moved = True
        if not moved:
            dst = min((i for i in range(k) if sizes[i] < targets[i]), key=lambda i: (sizes[i], i))
            v = next(v for v in nodes if sizes[region[v]] > targets[region[v]])
            src = region[v]
            region[v] = dst
            sizes[src] -= 1
            sizes[dst] += 1
    # Safety net: force exact targets with arbitrary (lowest-id) donors.
    under = [i for i in range(k) if sizes[i] < targets[i]]
    for v in nodes:
        if not under:
            break
        src = region[v]
        if sizes[src] > targets[src]:
            dst = under[0]
            region[v] = dst
            sizes[src] -= 1
            sizes[dst] += 1
            if sizes[dst] == targets[dst]:
                under.pop(0)


def _refine(nodes: list[int], adj: dict[int, list[int]], region: dict[int, int], k: int) -> None:
    """One boundary pass: move a node where most neighbors live if that
    reduces cut edges and keeps sizes inside the balance envelope
    (floor(n/k)*0.8 .. ceil(n/k)*1.2)."""
    n = len(nodes)
    low = max(1, math.ceil((n // k) * 0.8))
    high = max(low, math.floor(-(-n // k) * 1.2))
    sizes = [0] * k
    for v in nodes:
        sizes[region[v]] += 1
    for v in nodes:
        src = region[v]
        counts = [0] * k
        for u in adj[v]:
            counts[region[u]] += 1
        best = max(range(k), key=lambda i: (counts[i], -i))
        if best != src and counts[best] > counts[src]:
            if sizes[src] - 1 >= low and sizes[best] + 1 <= high:
                region[v] = best
                sizes[src] -= 1
                sizes[best] += 1


def _split(nodes: list[int], g: Graph, k: int, seed: int) -> list[list[int]]:
    nodes = sorted(nodes)
    member = set(nodes)
    adj = {v: [int(u) for u in g.neighbor_arrays(v)[0] if int(u) in member] for v in nodes}
    rng = random.Random(seed)
    seeds = _pick_seeds(nodes, adj, k, rng)
    region = _grow_regions(nodes, adj, seeds)
    _rebalance(nodes, adj, region, k)
    _refine(nodes, adj, region, k)
    parts: list[list[int]] = [[] for _ in range(k)]
    for v in nodes:
        parts[region[v]].append(v)
    return parts


def partition_recursive(g: Graph, spec: HierarchySpec, seed: int) -> PartitionAssignment:
    """Recursive k-way partitioning by BFS region growing.

    Each split seeds k regions at mutually far nodes, grows them breadth
    first in rotation, rebalances to near-equal sizes and runs one
    cut-reducing refinement pass. Parts smaller than k stop recursing and
    become leaves at their level. Deterministic for a fixed seed.
    """
    if g.node_count == 0:
        raise AssignmentError("cannot partition an empty graph")
    paths: list[Optional[Pathkey]] = [None] * g.node_count

    def recurse(nodes: list[int], prefix: Pathkey) -> None:
        if len(prefix) >= spec.max_depth or len(nodes) < spec.k:
            for v in nodes:
                paths[v] = prefix
            return
        parts = _split(nodes, g, spec.k, _derive_seed(seed, prefix))
        for idx, part in enumerate(parts):
            recurse(part, prefix + (idx,))

    recurse(list(range(g.node_count)), ())
    return PartitionAssignment(paths, spec)  # type: ignore[arg-type]


def _format_path(path: Pathkey) -> str:
    return "/".join(str(i) for i in path) if path else "."


def _parse_path(text: str) -> Pathkey:
    if text == ".":
        return ()
    return tuple(int(part) for part in text.split("/"))


def save_assignment(a: PartitionAssignment, dest: Union[str, Path, IO]) -> None:
    stream, owned = _open_text(dest, "w")
    try:
        for node, path in enumerate(a.paths):
            stream.write(f"{node}\t{_format_path(path)}\n")
    finally:
        if owned:
            stream.close()


def load_assignment(source: Union[str, Path, IO],
                    spec: Optional[HierarchySpec] = None,
                    node_count: Optional[int] = None) -> PartitionAssignment:
    """Read and validate an assignment file.

    When `spec` is omitted, k and levels are inferred from the data.
    Missing nodes, duplicate nodes, out-of-range child indices and
    prefix-inconsistent leaf paths are all rejected, naming the node.
    """
    stream, owned = _open_text(source, "r")
    entries: dict[int, Pathkey] = {}
    try:
        for line_no, raw in enumerate(stream, start=1):
            if isinstance(raw, bytes):
                raw = raw.decode("utf-8")
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            fields = line.split("\t")
            if len(fields) != 2:
                raise AssignmentError(f"line {line_no}: expected 'node<TAB>path', got {line!r}")
            try:
                node = int(fields[0])
                path = _parse_path(fields[1])
            except ValueError:
                raise AssignmentError(f"line {line_no}: cannot parse {line!r}") from None
            if node in entries:
                raise AssignmentError(f"line {line_no}: duplicate entry for node {node}")
            entries[node] = path
    finally:
        if owned:
            stream.close()
    if not entries and node_count in (None, 0):
        spec = spec or HierarchySpec(2, 2)
        return PartitionAssignment([], spec)
    n = node_count if node_count is not None else (max(entries) + 1 if entries else 0)
    for node in range(n):
        if node not in entries:
            raise AssignmentError(f"missing node {node}")
    for node in entries:
        if node >= n:
            raise AssignmentError(f"node {node} outside expected range 0..{n - 1}")
    if spec is None:
        max_idx = max((max(p) for p in entries.values() if p), default=0)
        max_len = max((len(p) for p in entries.values()), default=0)
        spec = HierarchySpec(max(2, max_idx + 1), max(2, max_len + 1))
    return PartitionAssignment([entries[v] for v in range(n)], spec)
