"""Center-piece summarization of a subgraph around chosen query nodes.

Pipeline: column-normalize the weighted adjacency, run one random walk
with restart per query node to get per-node goodness scores, multiply
them into a meeting score, then grow the output subgraph by repeatedly
picking the best node not yet included and connecting it to every query
node through the best "downhill" path (scores strictly decreasing away
from the source). Path quality is extracted goodness per newly added
node, maximized by dynamic programming over the acyclic downhill order.
The result is the induced subgraph on the collected nodes together with
the fraction of total meeting score it captures.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Sequence

import numpy as np
from scipy import sparse

from .core import EdgeRef, Graph, GraphError


class CepsError(GraphError):
    pass


class UnreachableDestinationError(CepsError):
    """No downhill path exists from the source to the destination."""


@dataclass(frozen=True)
class CepsParams:
    """Tuning knobs for scoring and extraction.

    budget caps the total node count of the output (queries included);
    max_path_len caps the node count of a single key path, so with the
    default 4 every key path spans at most 3 hops.
    """

    budget: int
    c: float = 0.85
    tol: float = 1e-9
    max_iter: int = 100
    max_path_len: int = 4

    def __post_init__(self):
        if not 0.0 < self.c < 1.0:
            raise CepsError(f"fly-out probability must be in (0,1), got {self.c}")
        if self.tol <= 0:
            raise CepsError("tol must be positive")
        if self.max_iter < 1:
            raise CepsError("max_iter must be at least 1")
        if self.budget < 1:
            raise CepsError("budget must be at least 1")
        if self.max_path_len < 2:
            raise CepsError("max_path_len must be at least 2")


class RwrResult(NamedTuple):
    vector: np.ndarray
    converged: bool
    iterations: int


@dataclass
class GoodnessScores:
    """Per-query steady-state vectors and their elementwise product."""

    queries: tuple[int, ...]
    per_query: np.ndarray        # shape (len(queries), n)
    combined: np.ndarray         # shape (n,)
    converged: tuple[bool, ...]
    iterations: tuple[int, ...]

    @property
    def all_converged(self) -> bool:
        return all(self.converged)


@dataclass(frozen=True)
class KeyPath:
    source: int
    destination: int
    nodes: tuple[int, ...]


@dataclass
class CenterPiece:
    """Induced summarization subgraph around the query nodes."""

    nodes: frozenset[int]
    edges: list[EdgeRef]
    key_paths: list[KeyPath]
    iratio: float
    params: CepsParams
    queries: tuple[int, ...]
    warnings: list[str] = field(default_factory=list)
    converged: bool = True

    def to_payload(self, scores: GoodnessScores,
                   node_ids: Optional[dict[int, int]] = None,
                   labels: Optional[dict[int, str]] = None) -> dict:
        """JSON-ready dict; node ids pass through `node_ids` so callers
        can translate leaf-local ids back to original graph ids."""
        def ident(n: int) -> int:
            return node_ids[n] if node_ids is not None else n

        nodes = []
        for n in sorted(self.nodes):
            item = {"id": ident(n), "score": _sig(float(scores.combined[n]))}
            if labels and n in labels:
                item["label"] = labels[n]
            nodes.append(item)
        return {
            "format": "center-piece@1",
            "queries": [ident(q) for q in self.queries],
            "params": {
                "budget": self.params.budget,
                "c": self.params.c,
                "tol": self.params.tol,
                "max_iter": self.params.max_iter,
                "max_path_len": self.params.max_path_len,
            },
            "iratio": _sig(self.iratio),
            "total_score": _sig(float(scores.combined.sum())),
            "converged": self.converged,
            "warnings": list(self.warnings),
            "nodes": nodes,
            "edges": [[ident(e.u), ident(e.v), e.w] for e in sorted(self.edges)],
            "key_paths": [
                {"source": ident(p.source), "destination": ident(p.destination),
                 "nodes": [ident(n) for n in p.nodes]}
                for p in self.key_paths
            ],
        }


def _sig(x: float) -> float:
    """Round to 12 significant digits for stable serialized scores."""
    return float(f"{x:.12g}")


def normalize_columns(g: Graph) -> sparse.csr_matrix:
    """Column-stochastic transition table of the weighted adjacency.

    Columns of isolated nodes stay all-zero, so a walk standing on such
    a node loses its continue mass and only the restart term remains.
    """
    n = g.node_count
    if n == 0:
        return sparse.csr_matrix((0, 0))
    rows = np.concatenate([g.edge_u, g.edge_v])
    cols = np.concatenate([g.edge_v, g.edge_u])
    data = np.concatenate([g.edge_w, g.edge_w])
    adj = sparse.csr_matrix((data, (rows, cols)), shape=(n, n))
    colsum = np.asarray(adj.sum(axis=0)).ravel()
    inv = np.divide(1.0, colsum, out=np.zeros_like(colsum), where=colsum > 0)
    return (adj @ sparse.diags(inv)).tocsr()


def rwr(w_norm: sparse.csr_matrix, source: int, params: CepsParams) -> RwrResult:
    """Random walk with restart from one node by power iteration.

    Iterates r <- c * W * r + (1-c) * e_source from r = e_source until
    the L1 change drops under tol; hitting max_iter first yields a
    flagged (converged=False) result rather than an error.
    """
    n = w_norm.shape[0]
    if not 0 <= source < n:
        raise CepsError(f"query node {source} out of range 0..{n - 1}")
    e = np.zeros(n, dtype=np.float64)
    e[source] = 1.0
    restart = (1.0 - params.c) * e
    r = e.copy()
    for it in range(1, params.max_iter + 1):
        nxt = params.c * (w_norm @ r) + restart
        delta = float(np.abs(nxt - r).sum())
        r = nxt
        if delta < params.tol:
            return RwrResult(r, True, it)
    return RwrResult(r, False, params.max_iter)


def combine(vectors: Sequence[np.ndarray]) -> np.ndarray:
    """Elementwise product: the chance that every walk meets at a node."""
    if not len(vectors):
        raise CepsError("need at least one score vector")
    sizes = {len(v) for v in vectors}
    if len(sizes) != 1:
        raise CepsError(f"score vectors differ in length: {sorted(sizes)}")
    return np.prod(np.vstack(vectors), axis=0)


def goodness_scores(g: Graph, queries: Sequence[int], params: CepsParams) -> GoodnessScores:
    """Score every node against each query node and against all at once."""
    if not queries:
        raise CepsError("query set is empty")
    if len(set(queries)) != len(queries):
        raise CepsError("query nodes must be distinct")
    w_norm = normalize_columns(g)
    results = [rwr(w_norm, q, params) for q in queries]
    per_query = np.vstack([res.vector for res in results])
    return GoodnessScores(
        queries=tuple(int(q) for q in queries),
        per_query=per_query,
        combined=combine(per_query),
        converged=tuple(res.converged for res in results),
        iterations=tuple(res.iterations for res in results),
    )


def single_key_path(g: Graph, source_index: int, destination: int,
                    scores: GoodnessScores, current_h: set[int],
                    params: CepsParams) -> tuple[int, ...]:
    """Best downhill path from one query node to the destination.

    Only nodes scoring at least as high as the destination (w.r.t. the
    source) take part, and only edges pointing strictly downhill, which
    makes the search space acyclic; exact score ties order by node id.
    Dynamic programming tracks, per node, path node count t and count s
    of path nodes outside the present output subgraph, keeping the best
    accumulated meeting score; the answer maximizes score/s over s != 0.
    Equal ratios prefer fewer new nodes, then the lexicographically
    smallest node sequence. Raises UnreachableDestinationError when no
    admissible path exists.
    """
    r_i = scores.per_query[source_index]
    r_q = scores.combined
    source = scores.queries[source_index]
    if destination == source:
        raise CepsError("destination equals the source query node")
    if not 0 <= destination < g.node_count:
        raise CepsError(f"destination {destination} out of range")
    if r_i[destination] <= 0.0:
        raise UnreachableDestinationError(
            f"node {destination} has zero score w.r.t. source {source}")

    def rank_key(u: int) -> tuple[float, int]:
        return (-float(r_i[u]), u)

    dest_key = rank_key(destination)
    if rank_key(source) > dest_key:
        raise UnreachableDestinationError(
            f"source {source} ranks below destination {destination}")
    candidates = sorted((u for u in range(g.node_count) if rank_key(u) <= dest_key),
                        key=rank_key)
    in_candidates = set(candidates)

    # states[v][(t, s)] = (best accumulated score, lex-smallest best path)
    states: dict[int, dict[tuple[int, int], tuple[float, tuple[int, ...]]]] = \
        {u: {} for u in candidates}
    s0 = 0 if source in current_h else 1
    states[source][(1, s0)] = (float(r_q[source]), (source,))

    for v in candidates:
        if v == source:
            continue
        v_key = rank_key(v)
        add_s = 0 if v in current_h else 1
        gain = float(r_q[v])
        target = states[v]
        nbr, _w = g.neighbor_arrays(v)
        for u_raw in nbr:
            u = int(u_raw)
            if u not in in_candidates or not rank_key(u) < v_key:
                continue
            for (t, s), (acc, path) in states[u].items():
                if t + 1 > params.max_path_len:
                    continue
                key = (t + 1, s + add_s)
                cand = (acc + gain, path + (v,))
                cur = target.get(key)
                if cur is None or cand[0] > cur[0] or (cand[0] == cur[0] and cand[1] < cur[1]):
                    target[key] = cand
    best: Optional[tuple[float, int, tuple[int, ...]]] = None
    for (t, s), (acc, path) in sorted(states[destination].items()):
        if s == 0:
            continue
        score = acc / s
        if (best is None or score > best[0]
                or (score == best[0] and (s < best[1] or (s == best[1] and path < best[2])))):
            best = (score, s, path)
    if best is None:
        raise UnreachableDestinationError(
            f"no downhill path from {source} to {destination} adding at least one "
            f"new node within {params.max_path_len} nodes")
    return best[2]


def extract(g: Graph, queries: Sequence[int], scores: GoodnessScores,
            params: CepsParams, time_budget_s: Optional[float] = None) -> CenterPiece:
    """Assemble the center-piece subgraph around the query nodes.

    Starts from the query nodes themselves, then repeats while under
    budget: pick the unincluded node with the highest meeting score and
    add one key path to it from every query node, merging duplicates.
    Sources that cannot reach the chosen destination downhill are
    skipped with a warning; a destination no source can reach is set
    aside so the loop can move on. Finally the edges among the collected
    nodes are induced from the host subgraph.
    """
    queries = [int(q) for q in queries]
    if not queries:
        raise CepsError("query set is empty")
    for q in queries:
        if not 0 <= q < g.node_count:
            raise CepsError(f"query node {q} out of range 0..{g.node_count - 1}")
    if len(set(queries)) != len(queries):
        raise CepsError("query nodes must be distinct")
    if params.budget < len(queries):
        raise CepsError(f"budget {params.budget} below query count {len(queries)}")

    combined = scores.combined
    h_nodes: set[int] = set(queries)
    key_paths: list[KeyPath] = []
    notes: list[str] = []
    set_aside: set[int] = set()
    started = time.perf_counter()

    while len(h_nodes) < params.budget:
        pd = None
        best_score = 0.0
        for j in range(g.node_count):
            if j in h_nodes or j in set_aside:
                continue
            sc = float(combined[j])
            if sc > best_score:
                best_score = sc
                pd = j
        if pd is None:
            if h_nodes == set(queries):
                notes.append("no node outside the query set has a positive meeting "
                             "score; the queries are returned alone")
            break
        for idx, q in enumerate(queries):
            try:
                path = single_key_path(g, idx, pd, scores, h_nodes, params)
            except UnreachableDestinationError:
                # Once pd has been merged by an earlier source, a failed
                # discovery just means there is nothing left to add; only
                # a destination still outside is a real coverage gap.
                if pd not in h_nodes:
                    notes.append(f"source {q} cannot reach destination {pd} downhill")
                continue
            h_nodes.update(path)
            key_paths.append(KeyPath(source=q, destination=pd, nodes=path))
        if pd not in h_nodes:
            set_aside.add(pd)
        if time_budget_s is not None and time.perf_counter() - started > time_budget_s:
            notes.append("time budget exhausted; returning the subgraph collected so far")
            break

    total = float(combined.sum())
    if total > 0.0:
        ratio = float(combined[sorted(h_nodes)].sum()) / total
    else:
        ratio = 0.0
        notes.append("total meeting score is zero; captured-importance ratio undefined, "
                     "reported as 0")
    return CenterPiece(
        nodes=frozenset(h_nodes),
        edges=g.induced_edge_refs(h_nodes),
        key_paths=key_paths,
        iratio=ratio,
        params=params,
        queries=tuple(queries),
        warnings=notes,
        converged=scores.all_converged,
    )


def iratio(subgraph_nodes: Sequence[int], combined: np.ndarray) -> float:
    """Share of the total meeting score captured by a node subset.

    Raises CepsError when the total score is zero (ratio undefined).
    """
    total = float(combined.sum())
    if total <= 0.0:
        raise CepsError("total meeting score is zero; ratio undefined")
    idx = sorted(int(j) for j in subgraph_nodes)
    if not idx:
        return 0.0
    if idx[0] < 0 or idx[-1] >= len(combined):
        raise CepsError("subgraph node outside the host graph")
    return float(combined[idx].sum()) / total
