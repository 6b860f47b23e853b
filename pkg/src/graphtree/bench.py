"""Desk-scale timing suite for the connectivity queries.

Runs the hierarchy engine against a plain in-memory adjacency-list
baseline on synthetic graphs, checking answer equality on every timed
query and recording wall-clock medians. Between-record connectivity is
timed per sibling pair (the answer size spans several orders of
magnitude across levels and graph sizes), single-node connectivity over
a fixed fraction of nodes per tree. The CSV columns are:

    op,engine,n,avg_degree,m,k,levels,height,query,answer_size,
    reps,median_seconds,resident_edges,status

op is one of snc, gnc, memory; engine is tree or baseline. gnc rows
carry the per-query mean of a whole-sample batch, medianed over
repetitions; memory rows carry resident edge counts and no timing.
"""

from __future__ import annotations

import csv
import hashlib
import random
import statistics
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from .core import EdgeRef, Graph, GraphError, generate_synthetic
from .partition import HierarchySpec, PartitionAssignment, Pathkey, partition_recursive
from .tree import GraphTree, build, path_to_id


class InsufficientDataError(GraphError):
    """Not enough distinct x values to fit a line."""


@dataclass(frozen=True)
class BenchConfig:
    node_counts: tuple[int, ...] = (5_000, 20_000, 50_000)
    degrees: tuple[float, ...] = (3.0, 12.0, 20.0)
    hierarchies: tuple[tuple[int, int], ...] = ((4, 3), (2, 5))
    repetitions: int = 5
    warmup: int = 1
    gnc_fraction: float = 0.25
    snc_query_cap: int = 200
    gnc_sample_cap: int = 20_000
    seed: int = 0
    max_nodes: int = 200_000
    max_edges: int = 4_000_000

    def __post_init__(self):
        if self.repetitions < 5:
            raise GraphError("reported medians need at least 5 repetitions")
        if not 0 < self.gnc_fraction <= 1:
            raise GraphError("gnc_fraction must be in (0, 1]")


@dataclass
class Measurement:
    op: str                      # snc | gnc | memory
    engine: str                  # tree | baseline
    n: int
    avg_degree: float
    m: int
    k: int
    levels: int
    height: int
    query: str
    answer_size: Optional[int]
    reps: int
    median_seconds: Optional[float]
    resident_edges: Optional[int]
    status: str = "ok"


CSV_COLUMNS = ["op", "engine", "n", "avg_degree", "m", "k", "levels", "height",
               "query", "answer_size", "reps", "median_seconds", "resident_edges",
               "status"]


def write_csv(measurements: Iterable[Measurement], dest: Union[str, Path]) -> None:
    with open(dest, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for row in measurements:
            writer.writerow([
                row.op, row.engine, row.n, row.avg_degree, row.m, row.k,
                row.levels, row.height, row.query,
                "" if row.answer_size is None else row.answer_size,
                row.reps,
                "" if row.median_seconds is None else repr(row.median_seconds),
                "" if row.resident_edges is None else row.resident_edges,
                row.status,
            ])


class BaselineAdjacency:
    """Whole-graph adjacency engine with partition labels on the nodes.

    Between-record queries scan the labeled node/edge arrays; per-node
    queries scan the node's neighbor list. Answers must match the tree
    engine edge for edge, which the suite asserts on every query.
    """

    def __init__(self, g: Graph, assignment: PartitionAssignment):
        if assignment.node_count != g.node_count:
            raise GraphError("assignment does not cover the graph")
        self.g = g
        self.k = assignment.spec.k
        depth = max((len(p) for p in assignment.paths), default=0)
        self._depth = depth
        mat = np.full((g.node_count, depth), -1, dtype=np.int32)
        for node, p in enumerate(assignment.paths):
            if p:
                mat[node, :len(p)] = p
        self._paths_mat = mat
        leaf_paths = assignment.leaf_paths()
        leaf_ord = {p: i for i, p in enumerate(leaf_paths)}
        self._node_leaf = np.array([leaf_ord[p] for p in assignment.paths], dtype=np.int64) \
            if assignment.paths else np.empty(0, dtype=np.int64)
        prefixes: dict[str, Pathkey] = {}
        for p in leaf_paths:
            for d in range(len(p) + 1):
                prefixes[path_to_id(p[:d], self.k)] = p[:d]
        self._prefix_by_id = prefixes

    def _node_mask(self, record_id: str) -> np.ndarray:
        prefix = self._prefix_by_id.get(record_id)
        if prefix is None:
            raise GraphError(f"unknown record id {record_id!r}")
        if not prefix:
            return np.ones(self.g.node_count, dtype=bool)
        want = np.array(prefix, dtype=np.int32)
        return (self._paths_mat[:, :len(prefix)] == want).all(axis=1)

    def snc(self, a: str, b: str) -> set[EdgeRef]:
        in_a = self._node_mask(a)
        in_b = self._node_mask(b)
        g = self.g
        hit = (in_a[g.edge_u] & in_b[g.edge_v]) | (in_b[g.edge_u] & in_a[g.edge_v])
        idx = np.nonzero(hit)[0]
        return {EdgeRef(int(g.edge_u[i]), int(g.edge_v[i]), float(g.edge_w[i])) for i in idx}

    def gnc(self, node: int) -> set[EdgeRef]:
        g = self.g
        nbr, wgt = g.neighbor_arrays(node)
        own = self._node_leaf[node]
        out = set()
        for other, w in zip(nbr, wgt):
            if self._node_leaf[other] != own:
                u, v = (node, int(other)) if node < other else (int(other), node)
                out.add(EdgeRef(u, v, float(w)))
        return out

    def resident_edge_count(self) -> int:
        return self.g.edge_count


def _seed_for(seed: int, tag: str) -> int:
    digest = hashlib.blake2b(f"{seed}|{tag}".encode(), digest_size=8).digest()
    return int.from_bytes(digest, "big")


def _median_time(fn, reps: int, warmup: int) -> float:
    for _ in range(warmup):
        fn()
    times = []
    for _ in range(reps):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return statistics.median(times)


def _sibling_pairs(tree: GraphTree) -> list[tuple[str, str, int]]:
    """(a, b, stored size) for every populated super-edge."""
    out = []
    for rec in tree.iter_records():
        if rec.is_leaf:
            continue
        for key in sorted(rec.super_edges):
            out.append((key[0], key[1], rec.super_edges[key].size))
    return out


def run_suite(cfg: BenchConfig, out_csv: Optional[Union[str, Path]] = None,
              progress: bool = False) -> list[Measurement]:
    """Build, verify and time every configured (graph, hierarchy) cell.

    Query selection is deterministic under cfg.seed. Baseline cells that
    exhaust memory are recorded with status "oom" and the suite moves on.
    """
    rows: list[Measurement] = []

    def note(msg: str) -> None:
        if progress:
            print(msg, flush=True)

    for n in cfg.node_counts:
        for d in cfg.degrees:
            m_target = int(round(n * d / 2.0))
            if n > cfg.max_nodes or m_target > cfg.max_edges:
                note(f"skip n={n} d={d}: over desk-scale caps")
                continue
            g = generate_synthetic(n, d, _seed_for(cfg.seed, f"graph:{n}:{d}"))
            for k, levels in cfg.hierarchies:
                spec = HierarchySpec(k, levels)
                note(f"n={n} d={d} k={k} levels={levels}: partitioning")
                assignment = partition_recursive(
                    g, spec, _seed_for(cfg.seed, f"part:{n}:{d}:{k}:{levels}"))
                note(f"n={n} d={d} k={k} levels={levels}: building tree")
                tree = build(g, assignment, leaf_store="memory")
                h = tree.stats.height
                base = dict(n=n, avg_degree=d, m=g.edge_count, k=k, levels=levels, height=h)

                baseline: Optional[BaselineAdjacency] = None
                try:
                    baseline = BaselineAdjacency(g, assignment)
                except MemoryError:
                    rows.append(Measurement(op="memory", engine="baseline", **base,
                                            query="-", answer_size=None, reps=0,
                                            median_seconds=None, resident_edges=None,
                                            status="oom"))

                rows.append(Measurement(op="memory", engine="tree", **base, query="-",
                                        answer_size=None, reps=0, median_seconds=None,
                                        resident_edges=tree.resident_edge_count()))
                if baseline is not None:
                    rows.append(Measurement(op="memory", engine="baseline", **base,
                                            query="-", answer_size=None, reps=0,
                                            median_seconds=None,
                                            resident_edges=baseline.resident_edge_count()))

                pairs = _sibling_pairs(tree)
                if len(pairs) > cfg.snc_query_cap:
                    rng = random.Random(_seed_for(cfg.seed, f"snc:{n}:{d}:{k}:{levels}"))
                    pairs = sorted(rng.sample(pairs, cfg.snc_query_cap))
                note(f"n={n} d={d} k={k} levels={levels}: {len(pairs)} snc queries")
                for a, b, _size in pairs:
                    answer = tree.snc(a, b)
                    f_size = len(answer)
                    if baseline is not None:
                        try:
                            base_answer = baseline.snc(a, b)
                        except MemoryError:
                            rows.append(Measurement(op="snc", engine="baseline", **base,
                                                    query=f"{a}|{b}", answer_size=None,
                                                    reps=0, median_seconds=None,
                                                    resident_edges=None, status="oom"))
                            base_answer = None
                        if base_answer is not None and base_answer != answer:
                            raise GraphError(
                                f"engines disagree on snc({a}, {b}) for n={n} d={d}")
                    med = _median_time(lambda: tree.snc(a, b), cfg.repetitions, cfg.warmup)
                    rows.append(Measurement(op="snc", engine="tree", **base,
                                            query=f"{a}|{b}", answer_size=f_size,
                                            reps=cfg.repetitions, median_seconds=med,
                                            resident_edges=None))
                    if baseline is not None and base_answer is not None:
                        med_b = _median_time(lambda: baseline.snc(a, b),
                                             cfg.repetitions, cfg.warmup)
                        rows.append(Measurement(op="snc", engine="baseline", **base,
                                                query=f"{a}|{b}", answer_size=f_size,
                                                reps=cfg.repetitions, median_seconds=med_b,
                                                resident_edges=None))

                sample_size = min(int(round(cfg.gnc_fraction * n)), cfg.gnc_sample_cap)
                rng = random.Random(_seed_for(cfg.seed, f"gnc:{n}:{d}:{k}:{levels}"))
                sample = sorted(rng.sample(range(n), sample_size)) if sample_size else []
                note(f"n={n} d={d} k={k} levels={levels}: {len(sample)} gnc queries")
                if sample and baseline is not None:
                    for v in sample:
                        if tree.gnc(v) != baseline.gnc(v):
                            raise GraphError(
                                f"engines disagree on gnc({v}) for n={n} d={d}")
                if sample:
                    def tree_batch():
                        for v in sample:
                            tree.gnc(v)

                    med = _median_time(tree_batch, cfg.repetitions, cfg.warmup) / len(sample)
                    rows.append(Measurement(op="gnc", engine="tree", **base,
                                            query=f"sample[{len(sample)}]",
                                            answer_size=None, reps=cfg.repetitions,
                                            median_seconds=med, resident_edges=None))
                    if baseline is not None:
                        def base_batch():
                            for v in sample:
                                baseline.gnc(v)

                        med_b = _median_time(base_batch, cfg.repetitions,
                                             cfg.warmup) / len(sample)
                        rows.append(Measurement(op="gnc", engine="baseline", **base,
                                                query=f"sample[{len(sample)}]",
                                                answer_size=None, reps=cfg.repetitions,
                                                median_seconds=med_b, resident_edges=None))
    if out_csv is not None:
        write_csv(rows, out_csv)
    return rows


@dataclass
class ScalingReport:
    snc_slope_vs_f: float
    snc_intercept: float
    snc_r2: float
    snc_point_count: int
    gnc_slope_vs_h: float
    gnc_intercept: float
    gnc_r2: float
    gnc_point_count: int

    def summary(self) -> str:
        return (
            f"snc: log-log slope vs answer size = {self.snc_slope_vs_f:.3f} "
            f"(r2={self.snc_r2:.3f}, {self.snc_point_count} points)\n"
            f"gnc: slope vs height = {self.gnc_slope_vs_h:.3e} s/level "
            f"(r2={self.gnc_r2:.3f}, {self.gnc_point_count} points)"
        )


def _fit_line(x: np.ndarray, y: np.ndarray) -> tuple[float, float, float]:
    if len(set(np.round(x, 12))) < 5:
        raise InsufficientDataError(f"need at least 5 distinct x values, got {len(set(x))}")
    slope, intercept = np.polyfit(x, y, 1)
    pred = slope * x + intercept
    ss_res = float(np.sum((y - pred) ** 2))
    ss_tot = float(np.sum((y - np.mean(y)) ** 2))
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return float(slope), float(intercept), r2


def fit_scaling(measurements: Sequence[Measurement],
                fit_min_answer: int = 500) -> ScalingReport:
    """Log-log slope of tree snc time vs answer size, and linear fit of
    tree gnc time vs height. snc points below `fit_min_answer` edges are
    ignored: there the fixed per-query overhead, not the answer scan,
    dominates the runtime."""
    snc_x, snc_y = [], []
    for row in measurements:
        if (row.op == "snc" and row.engine == "tree" and row.status == "ok"
                and row.answer_size and row.answer_size >= fit_min_answer
                and row.median_seconds and row.median_seconds > 0):
            snc_x.append(np.log10(row.answer_size))
            snc_y.append(np.log10(row.median_seconds))
    gnc_x, gnc_y = [], []
    for row in measurements:
        if (row.op == "gnc" and row.engine == "tree" and row.status == "ok"
                and row.median_seconds is not None):
            gnc_x.append(float(row.height))
            gnc_y.append(row.median_seconds)
    snc_slope, snc_icpt, snc_r2 = _fit_line(np.array(snc_x), np.array(snc_y))
    gnc_slope, gnc_icpt, gnc_r2 = _fit_line(np.array(gnc_x), np.array(gnc_y))
    return ScalingReport(
        snc_slope_vs_f=snc_slope, snc_intercept=snc_icpt, snc_r2=snc_r2,
        snc_point_count=len(snc_x),
        gnc_slope_vs_h=gnc_slope, gnc_intercept=gnc_icpt, gnc_r2=gnc_r2,
        gnc_point_count=len(gnc_x),
    )


def plot_measurements(measurements: Sequence[Measurement],
                      out_dir: Union[str, Path]) -> list[Path]:
    """Write the three standard panels as PNG files; returns the paths."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []

    fig, ax = plt.subplots()
    for engine, marker in (("tree", "o"), ("baseline", "x")):
        xs = [r.answer_size for r in measurements
              if r.op == "snc" and r.engine == engine and r.median_seconds and r.answer_size]
        ys = [r.median_seconds for r in measurements
              if r.op == "snc" and r.engine == engine and r.median_seconds and r.answer_size]
        if xs:
            ax.loglog(xs, ys, marker, label=engine, alpha=0.6)
    ax.set_xlabel("answer size (edges)")
    ax.set_ylabel("median seconds")
    ax.set_title("between-record connectivity time vs answer size")
    ax.legend()
    p = out_dir / "snc_time_vs_answer.png"
    fig.savefig(p, dpi=120)
    plt.close(fig)
    written.append(p)

    fig, ax = plt.subplots()
    for engine, marker in (("tree", "o"), ("baseline", "x")):
        xs = [r.height for r in measurements
              if r.op == "gnc" and r.engine == engine and r.median_seconds]
        ys = [r.median_seconds for r in measurements
              if r.op == "gnc" and r.engine == engine and r.median_seconds]
        if xs:
            ax.plot(xs, ys, marker, label=engine, alpha=0.6)
    ax.set_xlabel("tree height")
    ax.set_ylabel("median seconds per query")
    ax.set_title("single-node connectivity time vs height")
    ax.legend()
    p = out_dir / "gnc_time_vs_height.png"
    fig.savefig(p, dpi=120)
    plt.close(fig)
    written.append(p)

    fig, ax = plt.subplots()
    for engine, marker in (("tree", "o"), ("baseline", "x")):
        pts = [(r.m, r.resident_edges) for r in measurements
               if r.op == "memory" and r.engine == engine and r.resident_edges is not None]
        if pts:
            ax.loglog([a for a, _ in pts], [b for _, b in pts], marker,
                      label=engine, alpha=0.6)
    ax.set_xlabel("graph edges")
    ax.set_ylabel("resident edges")
    ax.set_title("in-memory edges vs graph size")
    ax.legend()
    p = out_dir / "memory_vs_edges.png"
    fig.savefig(p, dpi=120)
    plt.close(fig)
    written.append(p)
    return written
