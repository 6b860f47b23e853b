"""Weighted undirected graphs with dense integer node ids.

Edges are simple (no self-loops, no parallel edges) and stored once in
canonical ``u < v`` order. The on-disk format is tab-separated text, one
edge per line (``u<TAB>v[<TAB>w]``), with two optional directive lines:

    #N<TAB><node_count>         declares the node count (covers isolated nodes)
    #L<TAB><id><TAB><label>     attaches a string label to a node

Any other line starting with ``#`` is a comment. Edge lines tolerate any
whitespace as separator; directive lines are strictly tab-separated
because labels may contain spaces. Weights default to 1.0 when absent,
and duplicate occurrences of an edge collapse by summing their weights.
"""

from __future__ import annotations

import hashlib
import random
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Iterable, Iterator, Optional, Union

import numpy as np


class GraphError(Exception):
    """Base class for all errors raised by this package."""


class EdgeListParseError(GraphError):
    """Malformed edge-list input; carries the 1-based line number."""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


@dataclass(frozen=True, slots=True, order=True)
class EdgeRef:
    """Canonical reference to one undirected edge, with u < v."""

    u: int
    v: int
    w: float

    def __post_init__(self):
        if not self.u < self.v:
            raise ValueError(f"EdgeRef requires u < v, got ({self.u}, {self.v})")


class Graph:
    """Immutable weighted undirected graph.

    Nodes are the dense range ``0..node_count-1``. Edge endpoints and
    weights live in parallel numpy arrays sorted by (u, v); adjacency is a
    compressed sparse row structure with neighbors sorted by id, so scans
    are deterministic. Instances never mutate after construction and are
    safe for concurrent readers.
    """

    __slots__ = ("node_count", "edge_u", "edge_v", "edge_w", "labels",
                 "_indptr", "_nbr", "_nbr_w")

    def __init__(self, node_count: int, edge_u: np.ndarray, edge_v: np.ndarray,
                 edge_w: np.ndarray, labels: Optional[dict[int, str]] = None):
        # Raw constructor: arrays must already be canonical, unique, sorted.
        self.node_count = int(node_count)
        self.edge_u = edge_u
        self.edge_v = edge_v
        self.edge_w = edge_w
        self.labels = dict(labels) if labels else {}
        deg = np.bincount(edge_u, minlength=node_count) + np.bincount(edge_v, minlength=node_count)
        indptr = np.zeros(node_count + 1, dtype=np.int64)
        np.cumsum(deg, out=indptr[1:])
        src = np.concatenate([edge_u, edge_v])
        nbr = np.concatenate([edge_v, edge_u])
        wgt = np.concatenate([edge_w, edge_w])
        order = np.lexsort((nbr, src))
        self._indptr = indptr
        self._nbr = nbr[order]
        self._nbr_w = wgt[order]

    @classmethod
    def from_edges(cls, node_count: int,
                   edges: Iterable[tuple[int, int, float]],
                   labels: Optional[dict[int, str]] = None) -> "Graph":
        """Build a graph from (u, v, w) triples.

        Self-loops are dropped (with a counted warning), duplicate edges
        collapse by summing weights, and endpoints are canonicalized to
        u < v. Raises GraphError on out-of-range ids or non-positive
        weights.
        """
        triples = list(edges)
        n = int(node_count)
        if n < 0:
            raise GraphError("node_count must be non-negative")
        if labels:
            for node_id in labels:
                if not 0 <= node_id < n:
                    raise GraphError(f"label attached to out-of-range node id {node_id}")
        if not triples:
            empty = np.empty(0, dtype=np.int64)
            return cls(n, empty, empty.copy(), np.empty(0, dtype=np.float64), labels)

        u = np.array([t[0] for t in triples], dtype=np.int64)
        v = np.array([t[1] for t in triples], dtype=np.int64)
        w = np.array([t[2] for t in triples], dtype=np.float64)
        if u.min(initial=0) < 0 or v.min(initial=0) < 0 or (len(u) and max(u.max(), v.max()) >= n):
            bad = int(max(u.max(initial=0), v.max(initial=0)))
            raise GraphError(f"edge endpoint {bad} out of range for node_count={n}")
        if np.any(w <= 0):
            bad_w = float(w[w <= 0][0])
            raise GraphError(f"edge weights must be positive, got {bad_w}")

        loops = u == v
        n_loops = int(loops.sum())
        if n_loops:
            warnings.warn(f"dropped {n_loops} self-loop(s)", stacklevel=2)
            u, v, w = u[~loops], v[~loops], w[~loops]
        cu = np.minimum(u, v)
        cv = np.maximum(u, v)
        keys = cu * n + cv
        uniq, inverse = np.unique(keys, return_inverse=True)
        merged_w = np.bincount(inverse, weights=w, minlength=len(uniq))
        mu = (uniq // n).astype(np.int64)
        mv = (uniq % n).astype(np.int64)
        return cls(n, mu, mv, merged_w, labels)

    @property
    def edge_count(self) -> int:
        return len(self.edge_u)

    @property
    def total_weight(self) -> float:
        return float(self.edge_w.sum())

    def degree(self, v: int) -> int:
        self._check_node(v)
        return int(self._indptr[v + 1] - self._indptr[v])

    def neighbors(self, v: int) -> list[tuple[int, float]]:
        """Neighbors of v as (node, weight) pairs, sorted by node id."""
        self._check_node(v)
        lo, hi = self._indptr[v], self._indptr[v + 1]
        return [(int(a), float(b)) for a, b in zip(self._nbr[lo:hi], self._nbr_w[lo:hi])]

    def neighbor_arrays(self, v: int) -> tuple[np.ndarray, np.ndarray]:
        """Zero-copy neighbor id and weight slices for hot loops."""
        self._check_node(v)
        lo, hi = self._indptr[v], self._indptr[v + 1]
        return self._nbr[lo:hi], self._nbr_w[lo:hi]

    def edges(self) -> Iterator[tuple[int, int, float]]:
        for u, v, w in zip(self.edge_u, self.edge_v, self.edge_w):
            yield int(u), int(v), float(w)

    def edge_refs(self) -> Iterator[EdgeRef]:
        for u, v, w in self.edges():
            yield EdgeRef(u, v, w)

    def induced_edge_refs(self, nodes: set[int]) -> list[EdgeRef]:
        """All edges with both endpoints in the given node set."""
        out = []
        for u in sorted(nodes):
            nbr, wgt = self.neighbor_arrays(u)
            for v, w in zip(nbr, wgt):
                if v > u and int(v) in nodes:
                    out.append(EdgeRef(u, int(v), float(w)))
        return out

    def checksum(self) -> str:
        """Structural sha256 over node count, endpoints and weights."""
        h = hashlib.sha256()
        h.update(f"n={self.node_count};m={self.edge_count};".encode())
        h.update(self.edge_u.tobytes())
        h.update(self.edge_v.tobytes())
        h.update(self.edge_w.tobytes())
        return h.hexdigest()

    def _check_node(self, v: int) -> None:
        if not 0 <= v < self.node_count:
            raise GraphError(f"node id {v} out of range 0..{self.node_count - 1}")


def _open_text(source: Union[str, Path, IO], mode: str):
    if isinstance(source, (str, Path)):
        return open(source, mode, encoding="utf-8"), True
    return source, False


def load_edge_list(source: Union[str, Path, IO]) -> Graph:
    """Parse the tab-separated edge-list format into a Graph.

    Accepts a path or an open text/binary stream. Node count is the
    maximum id seen plus one unless a ``#N`` directive raises it.
    """
    stream, owned = _open_text(source, "r")
    try:
        declared_n = -1
        labels: dict[int, str] = {}
        triples: list[tuple[int, int, float]] = []
        max_id = -1
        loop_count = 0
        for line_no, raw in enumerate(stream, start=1):
            if isinstance(raw, bytes):
                raw = raw.decode("utf-8")
            line = raw.rstrip("\n")
            if not line.strip():
                continue
            if line.startswith("#"):
                parts = line.split("\t")
                if parts[0] == "#N":
                    if len(parts) != 2:
                        raise EdgeListParseError(line_no, "#N directive needs one field")
                    try:
                        declared_n = int(parts[1])
                    except ValueError:
                        raise EdgeListParseError(line_no, f"bad node count {parts[1]!r}") from None
                elif parts[0] == "#L":
                    if len(parts) != 3:
                        raise EdgeListParseError(line_no, "#L directive needs id and label")
                    try:
                        node_id = int(parts[1])
                    except ValueError:
                        raise EdgeListParseError(line_no, f"bad node id {parts[1]!r}") from None
                    labels[node_id] = parts[2]
                    max_id = max(max_id, node_id)
                continue
            fields = line.split()
            if len(fields) not in (2, 3):
                raise EdgeListParseError(line_no, f"expected 2 or 3 fields, got {len(fields)}")
            try:
                u = int(fields[0])
                v = int(fields[1])
            except ValueError:
                raise EdgeListParseError(line_no, f"non-integer endpoint in {line!r}") from None
            if u < 0 or v < 0:
                raise EdgeListParseError(line_no, f"negative node id in {line!r}")
            w = 1.0
            if len(fields) == 3:
                try:
                    w = float(fields[2])
                except ValueError:
                    raise EdgeListParseError(line_no, f"bad weight {fields[2]!r}") from None
                if w <= 0:
                    raise EdgeListParseError(line_no, f"non-positive weight {w}")
            if u == v:
                loop_count += 1
                continue
            triples.append((u, v, w))
            max_id = max(max_id, u, v)
        n = max(declared_n, max_id + 1)
        if loop_count:
            warnings.warn(f"dropped {loop_count} self-loop(s)", stacklevel=2)
        return Graph.from_edges(n, triples, labels)
    finally:
        if owned:
            stream.close()


def save_edge_list(g: Graph, dest: Union[str, Path, IO]) -> None:
    """Write a graph in the edge-list format, deterministically sorted."""
    stream, owned = _open_text(dest, "w")
    try:
        stream.write(f"#N\t{g.node_count}\n")
        for u, v, w in g.edges():
            stream.write(f"{u}\t{v}\t{w!r}\n")
        for node_id in sorted(g.labels):
            label = g.labels[node_id]
            if "\t" in label or "\n" in label:
                raise GraphError(f"label for node {node_id} contains tab or newline")
            stream.write(f"#L\t{node_id}\t{label}\n")
    finally:
        if owned:
            stream.close()


def generate_synthetic(n: int, avg_degree: float, seed: int) -> Graph:
    """Uniform random simple graph with round(n * avg_degree / 2) edges.

    Deterministic for a fixed seed. Raises GraphError when the requested
    edge count exceeds the simple-graph maximum n*(n-1)/2.
    """
    if n < 2:
        raise GraphError("generator needs n >= 2")
    m = int(round(n * avg_degree / 2.0))
    max_m = n * (n - 1) // 2
    if m < 0 or m > max_m:
        raise GraphError(f"requested {m} edges but a simple graph on {n} nodes holds at most {max_m}")
    rng = random.Random(seed)
    if n <= 64 or m > 0.6 * max_m:
        # Dense request: sample directly from the enumerated pair space.
        all_pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
        chosen = rng.sample(all_pairs, m)
    else:
        seen: set[int] = set()
        chosen = []
        while len(chosen) < m:
            u = rng.randrange(n)
            v = rng.randrange(n)
            if u == v:
                continue
            if u > v:
                u, v = v, u
            key = u * n + v
            if key in seen:
                continue
            seen.add(key)
            chosen.append((u, v))
    return Graph.from_edges(n, [(u, v, 1.0) for u, v in chosen])
