"""Hierarchy of partitions over a graph, with leaf subgraphs on disk.

The structure mirrors the partition assignment: every distinct leaf path
becomes a leaf record owning the subgraph of edges internal to its member
set (stored in a ``leaves/<id>.edges`` file plus a ``.nodes`` member
list, both using original node ids), and every proper prefix becomes an
internal record. Each internal record keeps, fully in memory:

  * its ordered children,
  * one super-edge per pair of children that at least one original edge
    crosses, holding exactly those edges and their summed weight,
  * the set of its open nodes, i.e. members with at least one edge
    leaving the record's coverage.

Every original edge therefore lives in exactly one place: the leaf file
of its enclosing leaf, or the super-edge at the lowest record whose
coverage contains both endpoints. Connectivity queries between records
(``snc``) and for single graph nodes (``gnc``) are answered from the
in-memory part alone; leaf files are read only by ``load_leaf`` through
a bounded LRU cache.

Record ids follow the path naming "s0" (root), "s04" (child 4 of the
root), "s043", and so on; child indices are slash-separated once k
exceeds 10 ("s0/11/3").
"""

from __future__ import annotations

import hashlib
import json
import os
import threading
from collections import OrderedDict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator, Optional, Union

import numpy as np

from .core import EdgeRef, Graph, GraphError
from .partition import PartitionAssignment, Pathkey

ROOT_ID = "s0"
MANIFEST_NAME = "manifest.json"
MANIFEST_FORMAT = "graphtree-manifest"
MANIFEST_VERSION = 1
DEFAULT_LEAF_CACHE = 64
LEAF_CACHE_ENV = "GRAPHTREE_LEAF_CACHE"


class UnknownRecordError(GraphError):
    """Record id not present in the tree."""


class NestedSuperNodesError(GraphError):
    """Connectivity between a record and its own ancestor is undefined
    because their coverages overlap."""


class AmbiguousLabelError(GraphError):
    def __init__(self, label: str, candidates: list[int]):
        super().__init__(f"label {label!r} is ambiguous, candidate nodes: {candidates}")
        self.label = label
        self.candidates = candidates


class ManifestError(GraphError):
    """Unreadable, mismatched or corrupt tree manifest."""


def path_to_id(path: Pathkey, k: int) -> str:
    if k <= 10:
        return ROOT_ID + "".join(str(i) for i in path)
    return ROOT_ID + "".join(f"/{i}" for i in path)


def leaf_file_stem(record_id: str) -> str:
    return record_id.replace("/", "-")


def superedges_per_record(k: int) -> int:
    """Pairs of children of one internal record: k*(k-1)/2."""
    return k * (k - 1) // 2


def expected_complete_height(k: int, total_records: int) -> int:
    """Height of a complete k-ary tree with the given record count,
    ceil(log_k(tn*(k-1)+1)), computed in exact integer arithmetic."""
    x = total_records * (k - 1) + 1
    h, p = 0, 1
    while p < x:
        p *= k
        h += 1
    return h


@dataclass
class SuperEdgeRecord:
    """All original edges crossing two sibling coverages.

    Edge endpoints and weights sit in parallel arrays in canonical order;
    ``by_endpoint`` indexes row numbers by incident node so single-node
    lookups cost one hash probe.
    """

    a: str
    b: str
    u: np.ndarray
    v: np.ndarray
    w: np.ndarray
    weight: float = 0.0
    by_endpoint: dict[int, np.ndarray] = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if not self.weight:
            self.weight = float(self.w.sum())
        if not self.by_endpoint and len(self.u):
            rows: dict[int, list[int]] = {}
            for i in range(len(self.u)):
                rows.setdefault(int(self.u[i]), []).append(i)
                rows.setdefault(int(self.v[i]), []).append(i)
            self.by_endpoint = {n: np.array(ix, dtype=np.int64) for n, ix in rows.items()}

    @property
    def size(self) -> int:
        return len(self.u)

    def edge_refs(self, rows: Optional[np.ndarray] = None) -> set[EdgeRef]:
        it = range(len(self.u)) if rows is None else rows
        return {EdgeRef(int(self.u[i]), int(self.v[i]), float(self.w[i])) for i in it}


@dataclass
class SuperNodeRecord:
    id: str
    level: int
    parent: Optional[str]
    children: list[str]
    open_nodes: set[int]
    super_edges: dict[tuple[str, str], SuperEdgeRecord]
    coverage_size: int
    # super-edges touching each child, for single-node climbs
    edges_by_child: dict[str, list[SuperEdgeRecord]] = field(default_factory=dict, repr=False)

    is_leaf = False

    def build_child_index(self) -> None:
        self.edges_by_child = {c: [] for c in self.children}
        for (ca, cb), se in sorted(self.super_edges.items()):
            self.edges_by_child[ca].append(se)
            self.edges_by_child[cb].append(se)


@dataclass
class LeafSuperNodeRecord:
    id: str
    level: int
    parent: Optional[str]
    file_path: Optional[str]  # relative to the tree directory; None while memory-backed
    member_nodes: list[int]   # sorted original node ids
    open_nodes: set[int]
    internal_edge_count: int

    is_leaf = True

    @property
    def coverage_size(self) -> int:
        return len(self.member_nodes)


@dataclass
class TreeStats:
    """Shape and cost parameters of a built tree.

    ``external_ratio`` is the measured fraction of original edges that
    cross leaf boundaries (and so stay resident in super-edges), and
    ``f_per_level`` the expected super-edge size at each internal level
    derived from it: f(1) = m*r / se(k), then f(l) = f(l-1)*r / se(k).
    """

    total_records: int          # tn
    supernode_count: int        # sn (internal records)
    leaf_count: int             # lsn
    height: int                 # h, root is level 1
    fan_out: int                # k
    nodes_per_leaf: float       # p = |V| / lsn
    avg_degree: float           # d = |E| / |V|
    external_edge_count: int
    external_ratio: float       # r
    f_per_level: tuple[float, ...]

    @classmethod
    def compute(cls, *, total_records: int, supernode_count: int, leaf_count: int,
                height: int, fan_out: int, node_count: int, edge_count: int,
                external_edge_count: int) -> "TreeStats":
        r = external_edge_count / edge_count if edge_count else 0.0
        se = superedges_per_record(fan_out)
        f_levels: list[float] = []
        prev = None
        for _level in range(1, height):
            prev = (edge_count * r / se) if prev is None else (prev * r / se)
            f_levels.append(prev)
        return cls(
            total_records=total_records,
            supernode_count=supernode_count,
            leaf_count=leaf_count,
            height=height,
            fan_out=fan_out,
            nodes_per_leaf=node_count / leaf_count if leaf_count else 0.0,
            avg_degree=edge_count / node_count if node_count else 0.0,
            external_edge_count=external_edge_count,
            external_ratio=r,
            f_per_level=tuple(f_levels),
        )

    def to_dict(self) -> dict:
        return {
            "total_records": self.total_records,
            "supernode_count": self.supernode_count,
            "leaf_count": self.leaf_count,
            "height": self.height,
            "fan_out": self.fan_out,
            "nodes_per_leaf": self.nodes_per_leaf,
            "avg_degree": self.avg_degree,
            "external_edge_count": self.external_edge_count,
            "external_ratio": self.external_ratio,
            "f_per_level": list(self.f_per_level),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "TreeStats":
        return cls(
            total_records=d["total_records"],
            supernode_count=d["supernode_count"],
            leaf_count=d["leaf_count"],
            height=d["height"],
            fan_out=d["fan_out"],
            nodes_per_leaf=d["nodes_per_leaf"],
            avg_degree=d["avg_degree"],
            external_edge_count=d["external_edge_count"],
            external_ratio=d["external_ratio"],
            f_per_level=tuple(d["f_per_level"]),
        )


Record = Union[SuperNodeRecord, LeafSuperNodeRecord]


class GraphTree:
    """Built hierarchy; immutable after construction, safe for concurrent
    readers. The leaf cache is the only shared mutable state and is
    guarded by a lock (which also guarantees a single disk read per leaf
    under concurrency, at the price of serializing leaf loads)."""

    def __init__(self, *, root_id: str, records: dict[str, Record],
                 node_index: list[str], labels: dict[int, str],
                 stats: TreeStats, k: int, levels: int,
                 graph_checksum: str, graph_meta: dict,
                 storage_dir: Optional[Path],
                 memory_leaves: Optional[dict[str, list[tuple[int, int, float]]]] = None,
                 cache_size: Optional[int] = None):
        self.root_id = root_id
        self.records = records
        self.node_index = node_index
        self.labels = labels
        self.stats = stats
        self.k = k
        self.levels = levels
        self.graph_checksum = graph_checksum
        self.graph_meta = graph_meta
        self.storage_dir = Path(storage_dir) if storage_dir is not None else None
        self._memory_leaves = memory_leaves
        self.label_index: dict[str, list[int]] = {}
        for node_id, label in labels.items():
            self.label_index.setdefault(label, []).append(node_id)
        for ids in self.label_index.values():
            ids.sort()
        if cache_size is None:
            cache_size = int(os.environ.get(LEAF_CACHE_ENV, DEFAULT_LEAF_CACHE))
        self._cache_size = max(1, cache_size)
        self._leaf_cache: OrderedDict[str, Graph] = OrderedDict()
        self._cache_lock = threading.Lock()

    # ------------------------------------------------------------------
    # Navigation

    def record(self, record_id: str) -> Record:
        try:
            return self.records[record_id]
        except KeyError:
            raise UnknownRecordError(f"unknown record id {record_id!r}") from None

    def is_leaf(self, record_id: str) -> bool:
        return self.record(record_id).is_leaf

    def parent(self, record_id: str) -> Optional[str]:
        return self.record(record_id).parent

    def ancestors(self, record_id: str) -> list[str]:
        """Parent chain from immediate parent up to the root."""
        chain = []
        cur = self.record(record_id).parent
        while cur is not None:
            chain.append(cur)
            cur = self.records[cur].parent
        return chain

    def children(self, record_id: str) -> list[str]:
        rec = self.record(record_id)
        return [] if rec.is_leaf else list(rec.children)

    def iter_records(self) -> Iterator[Record]:
        for record_id in sorted(self.records):
            yield self.records[record_id]

    def coverage(self, record_id: str) -> set[int]:
        """Original graph nodes under a record: the member set at a leaf,
        the disjoint union of child coverages elsewhere."""
        out: set[int] = set()
        stack = [self.record(record_id)]
        while stack:
            rec = stack.pop()
            if rec.is_leaf:
                out.update(rec.member_nodes)
            else:
                stack.extend(self.records[c] for c in rec.children)
        return out

    def leaf_members(self, record_id: str) -> list[int]:
        rec = self.record(record_id)
        if not rec.is_leaf:
            raise GraphError(f"record {record_id!r} is not a leaf")
        return list(rec.member_nodes)

    def leaf_of(self, node: int) -> str:
        if not 0 <= node < len(self.node_index):
            raise GraphError(f"node id {node} out of range 0..{len(self.node_index) - 1}")
        return self.node_index[node]

    # ------------------------------------------------------------------
    # Connectivity

    def superedge(self, a: str, b: str) -> Optional[SuperEdgeRecord]:
        """Stored super-edge between two sibling records, if any."""
        ra, rb = self.record(a), self.record(b)
        if ra.parent is None or ra.parent != rb.parent:
            raise GraphError(f"records {a!r} and {b!r} are not siblings")
        key = (a, b) if a < b else (b, a)
        return self.records[ra.parent].super_edges.get(key)

    def snc(self, a: str, b: str) -> set[EdgeRef]:
        """Exact set of original edges between the coverages of two
        records, read off the super-edge at their first common parent and
        filtered by open-node membership on each side."""
        self.record(a), self.record(b)
        ca, cb = a, b
        ga: Optional[str] = None
        gb: Optional[str] = None
        while self.records[ca].level > self.records[cb].level:
            ga, ca = ca, self.records[ca].parent
        while self.records[cb].level > self.records[ca].level:
            gb, cb = cb, self.records[cb].parent
        if ca == cb:
            raise NestedSuperNodesError(
                f"connectivity between {a!r} and {b!r} is undefined: coverages are nested")
        while ca != cb:
            ga, gb = ca, cb
            ca = self.records[ca].parent
            cb = self.records[cb].parent
        common = self.records[ca]
        key = (ga, gb) if ga < gb else (gb, ga)
        se = common.super_edges.get(key)
        if se is None:
            return set()
        if ga == a and gb == b:
            return se.edge_refs()
        open_a = self.records[a].open_nodes
        open_b = self.records[b].open_nodes
        out: set[EdgeRef] = set()
        eu, ev, ew = se.u, se.v, se.w
        for i in range(len(eu)):
            u = int(eu[i])
            v = int(ev[i])
            if (u in open_a and v in open_b) or (v in open_a and u in open_b):
                out.add(EdgeRef(u, v, float(ew[i])))
        return out

    def gnc(self, node: int) -> set[EdgeRef]:
        """All edges from one graph node to nodes outside its leaf.

        Climbs from the node's leaf toward the root, collecting the
        node's entries from every super-edge incident to the subtree it
        sits in; the climb ends at the first record that no longer lists
        the node as open, because above that point no edge of the node
        remains unresolved.
        """
        leaf_id = self.leaf_of(node)
        out: set[EdgeRef] = set()
        cur = leaf_id
        while node in self.records[cur].open_nodes:
            pid = self.records[cur].parent
            if pid is None:
                break
            parent_rec = self.records[pid]
            for se in parent_rec.edges_by_child.get(cur, ()):
                rows = se.by_endpoint.get(node)
                if rows is not None:
                    for i in rows:
                        out.add(EdgeRef(int(se.u[i]), int(se.v[i]), float(se.w[i])))
            cur = pid
        return out

    def resident_edge_count(self) -> int:
        """Original edges held in memory, i.e. the super-edge total."""
        total = 0
        for rec in self.records.values():
            if not rec.is_leaf:
                total += sum(se.size for se in rec.super_edges.values())
        return total

    # ------------------------------------------------------------------
    # Labels

    def label_search(self, label: str) -> Optional[tuple[int, str]]:
        """Exact-match label lookup: (node id, leaf id), or None.

        Raises AmbiguousLabelError when several nodes share the label.
        """
        ids = self.label_index.get(label)
        if not ids:
            return None
        if len(ids) > 1:
            raise AmbiguousLabelError(label, list(ids))
        return ids[0], self.node_index[ids[0]]

    # ------------------------------------------------------------------
    # Leaf subgraphs

    def _read_leaf_triples(self, rec: LeafSuperNodeRecord) -> list[tuple[int, int, float]]:
        if self._memory_leaves is not None:
            return self._memory_leaves[rec.id]
        if self.storage_dir is None or rec.file_path is None:
            raise GraphError(f"leaf {rec.id!r} has no backing storage")
        path = self.storage_dir / rec.file_path
        triples: list[tuple[int, int, float]] = []
        try:
            with open(path, "r", encoding="utf-8") as fh:
                for raw in fh:
                    line = raw.strip()
                    if not line or line.startswith("#"):
                        continue
                    parts = line.split("\t")
                    triples.append((int(parts[0]), int(parts[1]), float(parts[2])))
        except (OSError, ValueError, IndexError) as exc:
            raise GraphError(f"cannot read leaf file {path}: {exc}") from exc
        return triples

    def load_leaf(self, record_id: str) -> Graph:
        """Leaf subgraph as a dense local graph.

        Local id i is position i in the sorted member list (see
        ``leaf_members``); labels carry over. Loads are cached (LRU,
        bounded) so repeated requests for the same leaf hit memory.
        """
        rec = self.record(record_id)
        if not rec.is_leaf:
            raise GraphError(f"record {record_id!r} is not a leaf")
        with self._cache_lock:
            cached = self._leaf_cache.get(record_id)
            if cached is not None:
                self._leaf_cache.move_to_end(record_id)
                return cached
            triples = self._read_leaf_triples(rec)
            local = {orig: i for i, orig in enumerate(rec.member_nodes)}
            try:
                local_triples = [(local[u], local[v], w) for u, v, w in triples]
            except KeyError as exc:
                raise GraphError(
                    f"leaf file for {record_id!r} mentions non-member node {exc.args[0]}") from None
            labels = {local[n]: self.labels[n] for n in rec.member_nodes if n in self.labels}
            g = Graph.from_edges(len(rec.member_nodes), local_triples, labels)
            self._leaf_cache[record_id] = g
            if len(self._leaf_cache) > self._cache_size:
                self._leaf_cache.popitem(last=False)
            return g

    # ------------------------------------------------------------------
    # Persistence

    def _manifest_payload(self) -> dict:
        records = []
        for rec in self.iter_records():
            entry: dict = {
                "id": rec.id,
                "level": rec.level,
                "parent": rec.parent,
                "open_nodes": sorted(rec.open_nodes),
            }
            if rec.is_leaf:
                entry["kind"] = "leaf"
                entry["file"] = rec.file_path
                entry["members"] = list(rec.member_nodes)
                entry["internal_edge_count"] = rec.internal_edge_count
            else:
                entry["kind"] = "super"
                entry["children"] = list(rec.children)
                entry["coverage_size"] = rec.coverage_size
                entry["super_edges"] = [
                    {
                        "a": se.a,
                        "b": se.b,
                        "weight": se.weight,
                        "edges": [[int(se.u[i]), int(se.v[i]), float(se.w[i])]
                                  for i in range(se.size)],
                    }
                    for _, se in sorted(rec.super_edges.items())
                ]
            records.append(entry)
        return {
            "format": MANIFEST_FORMAT,
            "format_version": MANIFEST_VERSION,
            "graph": dict(self.graph_meta, checksum=self.graph_checksum),
            "hierarchy": {"k": self.k, "levels": self.levels, "root": self.root_id},
            "records": records,
            "labels": {str(n): lab for n, lab in sorted(self.labels.items())},
            "stats": self.stats.to_dict(),
        }

    def save(self, directory: Union[str, Path]) -> Path:
        """Write the manifest (and leaf files, if not already there).

        Returns the manifest path. The manifest is canonical JSON, so
        identical trees produce byte-identical files.
        """
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        relocating = self.storage_dir is None or directory.resolve() != self.storage_dir.resolve()
        if relocating:
            leaves_dir = directory / "leaves"
            leaves_dir.mkdir(parents=True, exist_ok=True)
            for rec in self.iter_records():
                if not rec.is_leaf:
                    continue
                triples = self._read_leaf_triples(rec)
                stem = leaf_file_stem(rec.id)
                _write_leaf_files(leaves_dir, stem, rec.member_nodes, triples)
                rec.file_path = f"leaves/{stem}.edges"
            self.storage_dir = directory
            self._memory_leaves = None
        payload = self._manifest_payload()
        canon = json.dumps(payload, sort_keys=True, separators=(",", ":"))
        checksum = hashlib.sha256(canon.encode()).hexdigest()
        doc = {"checksum": checksum, "payload": payload}
        manifest_path = directory / MANIFEST_NAME
        with open(manifest_path, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, sort_keys=True, separators=(",", ":"))
            fh.write("\n")
        return manifest_path

    @classmethod
    def open(cls, directory: Union[str, Path], cache_size: Optional[int] = None) -> "GraphTree":
        """Load a tree from its manifest; leaf files stay on disk."""
        directory = Path(directory)
        manifest_path = directory / MANIFEST_NAME
        try:
            with open(manifest_path, "r", encoding="utf-8") as fh:
                doc = json.load(fh)
        except OSError as exc:
            raise ManifestError(f"cannot read {manifest_path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ManifestError(f"manifest is not valid JSON: {exc}") from exc
        payload = doc.get("payload")
        if not isinstance(payload, dict):
            raise ManifestError("manifest has no payload")
        canon = json.dumps(payload, sort_keys=True, separators=(",", ":"))
        if hashlib.sha256(canon.encode()).hexdigest() != doc.get("checksum"):
            raise ManifestError("manifest checksum mismatch")
        if payload.get("format") != MANIFEST_FORMAT:
            raise ManifestError(f"unexpected format {payload.get('format')!r}")
        if payload.get("format_version") != MANIFEST_VERSION:
            raise ManifestError(f"unsupported manifest version {payload.get('format_version')!r}")

        records: dict[str, Record] = {}
        node_count = payload["graph"]["node_count"]
        node_index: list[Optional[str]] = [None] * node_count
        for entry in payload["records"]:
            if entry["kind"] == "leaf":
                rec: Record = LeafSuperNodeRecord(
                    id=entry["id"],
                    level=entry["level"],
                    parent=entry["parent"],
                    file_path=entry["file"],
                    member_nodes=list(entry["members"]),
                    open_nodes=set(entry["open_nodes"]),
                    internal_edge_count=entry["internal_edge_count"],
                )
                for n in rec.member_nodes:
                    node_index[n] = rec.id
            else:
                super_edges = {}
                for se_entry in entry["super_edges"]:
                    edges = se_entry["edges"]
                    se = SuperEdgeRecord(
                        a=se_entry["a"],
                        b=se_entry["b"],
                        u=np.array([e[0] for e in edges], dtype=np.int64),
                        v=np.array([e[1] for e in edges], dtype=np.int64),
                        w=np.array([e[2] for e in edges], dtype=np.float64),
                        weight=se_entry["weight"],
                    )
                    super_edges[(se.a, se.b)] = se
                rec = SuperNodeRecord(
                    id=entry["id"],
                    level=entry["level"],
                    parent=entry["parent"],
                    children=list(entry["children"]),
                    open_nodes=set(entry["open_nodes"]),
                    super_edges=super_edges,
                    coverage_size=entry["coverage_size"],
                )
                rec.build_child_index()
            records[rec.id] = rec
        missing = [i for i, leaf in enumerate(node_index) if leaf is None]
        if missing:
            raise ManifestError(f"manifest covers no leaf for node {missing[0]}")
        labels = {int(n): lab for n, lab in payload["labels"].items()}
        return cls(
            root_id=payload["hierarchy"]["root"],
            records=records,
            node_index=node_index,  # type: ignore[arg-type]
            labels=labels,
            stats=TreeStats.from_dict(payload["stats"]),
            k=payload["hierarchy"]["k"],
            levels=payload["hierarchy"]["levels"],
            graph_checksum=payload["graph"]["checksum"],
            graph_meta={k_: v for k_, v in payload["graph"].items() if k_ != "checksum"},
            storage_dir=directory,
            cache_size=cache_size,
        )


def _write_leaf_files(leaves_dir: Path, stem: str, members: list[int],
                      triples: list[tuple[int, int, float]]) -> None:
    with open(leaves_dir / f"{stem}.edges", "w", encoding="utf-8") as fh:
        for u, v, w in triples:
            fh.write(f"{u}\t{v}\t{w!r}\n")
    with open(leaves_dir / f"{stem}.nodes", "w", encoding="utf-8") as fh:
        for n in members:
            fh.write(f"{n}\n")


def build(g: Graph, assignment: PartitionAssignment,
          storage_dir: Optional[Union[str, Path]] = None, *,
          leaf_store: str = "disk",
          cache_size: Optional[int] = None) -> GraphTree:
    """Fill a tree from a graph and its partition assignment, bottom up.

    Leaves write their internal-edge subgraphs to ``storage_dir/leaves``
    and hand their external edges upward; each internal record matches
    the external edges meeting under it into per-child-pair super-edges,
    notes which of its covered nodes still have edges leaving, and passes
    the rest on. At the root nothing may remain unmatched, which is
    exactly the guarantee that every edge was placed once.

    ``leaf_store="memory"`` keeps leaf subgraphs in memory instead of on
    disk (useful for throwaway trees in tests and benchmarks); such a
    tree gains files when saved.
    """
    if assignment.node_count != g.node_count:
        raise GraphError(
            f"assignment covers {assignment.node_count} nodes, graph has {g.node_count}")
    if leaf_store not in ("disk", "memory"):
        raise GraphError(f"unknown leaf_store {leaf_store!r}")
    if leaf_store == "disk" and storage_dir is None:
        raise GraphError("disk leaf store needs a storage_dir")

    k = assignment.spec.k
    leaf_paths = assignment.leaf_paths()
    if not leaf_paths:
        leaf_paths = [()]
    nodes_by_leaf = assignment.nodes_by_leaf()

    # Skeleton: leaf records plus every proper prefix as an internal record.
    leaf_ids = {path: path_to_id(path, k) for path in leaf_paths}
    internal_paths: set[Pathkey] = set()
    for path in leaf_paths:
        for depth in range(len(path)):
            internal_paths.add(path[:depth])
    children_of: dict[Pathkey, list[Pathkey]] = {p: [] for p in internal_paths}
    for path in leaf_paths + sorted(internal_paths - {()}):
        if path:
            children_of[path[:-1]].append(path)
    for lst in children_of.values():
        lst.sort()

    records: dict[str, Record] = {}
    node_index: list[Optional[str]] = [None] * g.node_count

    leaves_dir: Optional[Path] = None
    if leaf_store == "disk":
        leaves_dir = Path(storage_dir) / "leaves"
        leaves_dir.mkdir(parents=True, exist_ok=True)
    memory_leaves: Optional[dict[str, list[tuple[int, int, float]]]] = (
        {} if leaf_store == "memory" else None)

    # Classify edges against leaves in bulk.
    leaf_ord = {path: i for i, path in enumerate(leaf_paths)}
    node_ord = np.empty(g.node_count, dtype=np.int64)
    for path, members in nodes_by_leaf.items():
        node_ord[members] = leaf_ord[path]
    if g.node_count:
        eu = node_ord[g.edge_u]
        ev = node_ord[g.edge_v]
    else:
        eu = ev = np.empty(0, dtype=np.int64)
    internal_mask = eu == ev
    internal_idx = np.nonzero(internal_mask)[0]
    cross_idx = np.nonzero(~internal_mask)[0]

    def _group(idx: np.ndarray, ords: np.ndarray) -> dict[int, np.ndarray]:
        if not len(idx):
            return {}
        order = np.argsort(ords[idx], kind="stable")
        sorted_idx = idx[order]
        sorted_ord = ords[idx][order]
        bounds = np.searchsorted(sorted_ord, np.arange(len(leaf_paths) + 1))
        return {i: sorted_idx[bounds[i]:bounds[i + 1]]
                for i in range(len(leaf_paths)) if bounds[i] < bounds[i + 1]}

    internal_by_leaf = _group(internal_idx, eu)
    cross_by_u = _group(cross_idx, eu)
    cross_by_v = _group(cross_idx, ev)

    # pending[record_id] = [(edge_index, endpoint inside that record), ...]
    pending: dict[str, list[tuple[int, int]]] = {}

    for path in leaf_paths:
        ord_i = leaf_ord[path]
        rec_id = leaf_ids[path]
        members = sorted(nodes_by_leaf.get(path, []))
        own_internal = internal_by_leaf.get(ord_i, np.empty(0, dtype=np.int64))
        triples = [(int(g.edge_u[i]), int(g.edge_v[i]), float(g.edge_w[i]))
                   for i in own_internal]
        entries: list[tuple[int, int]] = []
        for i in cross_by_u.get(ord_i, ()):
            entries.append((int(i), int(g.edge_u[i])))
        for i in cross_by_v.get(ord_i, ()):
            entries.append((int(i), int(g.edge_v[i])))
        open_nodes = {side for _, side in entries}
        file_path = None
        if leaves_dir is not None:
            stem = leaf_file_stem(rec_id)
            try:
                _write_leaf_files(leaves_dir, stem, members, triples)
            except OSError as exc:
                raise GraphError(f"cannot write leaf files for {rec_id}: {exc}") from exc
            file_path = f"leaves/{stem}.edges"
        else:
            memory_leaves[rec_id] = triples
        records[rec_id] = LeafSuperNodeRecord(
            id=rec_id,
            level=len(path) + 1,
            parent=path_to_id(path[:-1], k) if path else None,
            file_path=file_path,
            member_nodes=members,
            open_nodes=open_nodes,
            internal_edge_count=len(triples),
        )
        pending[rec_id] = entries
        for n in members:
            node_index[n] = rec_id

    # Internal records, deepest level first, matching external edges.
    external_total = 0
    for path in sorted(internal_paths, key=len, reverse=True):
        rec_id = path_to_id(path, k)
        child_ids = [leaf_ids.get(cp) or path_to_id(cp, k) for cp in children_of[path]]
        incoming: dict[int, tuple[str, int]] = {}
        matches: dict[tuple[str, str], list[int]] = {}
        for child_id in child_ids:
            for edge_i, side in pending.pop(child_id, ()):
                prev = incoming.get(edge_i)
                if prev is None:
                    incoming[edge_i] = (child_id, side)
                else:
                    pair = (prev[0], child_id) if prev[0] < child_id else (child_id, prev[0])
                    matches.setdefault(pair, []).append(edge_i)
                    del incoming[edge_i]
        super_edges: dict[tuple[str, str], SuperEdgeRecord] = {}
        for pair, idx_list in matches.items():
            idx = np.array(sorted(idx_list), dtype=np.int64)
            se = SuperEdgeRecord(
                a=pair[0], b=pair[1],
                u=g.edge_u[idx].copy(), v=g.edge_v[idx].copy(), w=g.edge_w[idx].copy(),
            )
            super_edges[pair] = se
            external_total += se.size
        remaining = sorted(incoming.items())
        rec = SuperNodeRecord(
            id=rec_id,
            level=len(path) + 1,
            parent=path_to_id(path[:-1], k) if path else None,
            children=child_ids,
            open_nodes={side for _, (_, side) in remaining},
            super_edges=super_edges,
            coverage_size=sum(records[c].coverage_size for c in child_ids),
        )
        rec.build_child_index()
        records[rec_id] = rec
        if path:
            pending[rec_id] = [(edge_i, side) for edge_i, (_, side) in remaining]
        elif remaining:
            raise GraphError(
                f"{len(remaining)} external edges stayed unmatched at the root; "
                "the assignment does not cover the graph")

    root_id = path_to_id((), k) if internal_paths else leaf_ids[leaf_paths[0]]
    if not internal_paths:
        # Single-leaf tree: its own pending set must be empty.
        leftover = pending.get(root_id)
        if leftover:
            raise GraphError("single-leaf tree cannot have external edges")

    leaf_count = len(leaf_paths)
    supernode_count = len(internal_paths)
    height = max(rec.level for rec in records.values())
    stats = TreeStats.compute(
        total_records=len(records),
        supernode_count=supernode_count,
        leaf_count=leaf_count,
        height=height,
        fan_out=k,
        node_count=g.node_count,
        edge_count=g.edge_count,
        external_edge_count=external_total,
    )
    missing = [i for i, leaf in enumerate(node_index) if leaf is None]
    if missing:
        raise GraphError(f"assignment leaves node {missing[0]} uncovered")
    return GraphTree(
        root_id=root_id,
        records=records,
        node_index=node_index,  # type: ignore[arg-type]
        labels=dict(g.labels),
        stats=stats,
        k=k,
        levels=assignment.spec.levels,
        graph_checksum=g.checksum(),
        graph_meta={
            "node_count": g.node_count,
            "edge_count": g.edge_count,
            "total_weight": g.total_weight,
        },
        storage_dir=storage_dir if leaf_store == "disk" else None,
        memory_leaves=memory_leaves,
        cache_size=cache_size,
    )
