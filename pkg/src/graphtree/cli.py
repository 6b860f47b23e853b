"""Command line interface: build, query, summarize, benchmark, serve.

Exit codes: 0 success, 1 usage or unexpected error, 2 nested-record
connectivity request, 3 id/label/node not found, 4 input parsing or
validation failure, 5 ambiguous label.

The bench subcommand reads a plain key=value config file, for example:

    # desk-scale sweep
    node_counts = 5000, 20000
    degrees = 3, 12, 20
    hierarchies = 4x3, 2x5
    repetitions = 5
    seed = 7

Unknown keys are rejected. The GRAPHTREE_LEAF_CACHE environment
variable bounds the leaf cache (default 64 leaves).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

from .bench import BenchConfig, InsufficientDataError, fit_scaling, plot_measurements, run_suite
from .ceps import CepsError, CepsParams, extract, goodness_scores
from .core import EdgeListParseError, EdgeRef, GraphError, load_edge_list
from .partition import (AssignmentError, HierarchySpec, load_assignment,
                        partition_recursive, save_assignment)
from .tree import (AmbiguousLabelError, GraphTree, ManifestError,
                   NestedSuperNodesError, UnknownRecordError, build)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_NESTED = 2
EXIT_NOT_FOUND = 3
EXIT_PARSE = 4
EXIT_AMBIGUOUS = 5


def render_edge_tsv(edges: set[EdgeRef]) -> str:
    return "".join(f"{e.u}\t{e.v}\t{e.w!r}\n" for e in sorted(edges))


def _resolve_node(tree: GraphTree, text: str) -> int:
    """A node argument is an integer id or an exact label."""
    try:
        node = int(text)
    except ValueError:
        hit = tree.label_search(text)
        if hit is None:
            raise UnknownRecordError(f"label {text!r} not found") from None
        return hit[0]
    if not 0 <= node < len(tree.node_index):
        raise UnknownRecordError(f"node id {node} out of range")
    return node


def _cmd_build(args) -> int:
    g = load_edge_list(args.input)
    if args.assignment:
        assignment = load_assignment(args.assignment, node_count=g.node_count)
    else:
        if args.k is None or args.levels is None:
            print("build: need either --assignment or both --k and --levels",
                  file=sys.stderr)
            return EXIT_ERROR
        assignment = partition_recursive(g, HierarchySpec(args.k, args.levels), args.seed)
    out = Path(args.out)
    tree = build(g, assignment, out)
    tree.save(out)
    if args.emit_assignment:
        save_assignment(assignment, args.emit_assignment)
    with open(out / "manifest.json", "r", encoding="utf-8") as fh:
        checksum = json.load(fh)["checksum"]
    s = tree.stats
    print(f"nodes\t{g.node_count}")
    print(f"edges\t{g.edge_count}")
    print(f"leaves\t{s.leaf_count}")
    print(f"records\t{s.total_records}")
    print(f"height\t{s.height}")
    print(f"external_ratio\t{s.external_ratio:.6f}")
    print(f"manifest_checksum\t{checksum}")
    return EXIT_OK


def _cmd_snc(args) -> int:
    tree = GraphTree.open(args.tree)
    edges = tree.snc(args.a, args.b)
    sys.stdout.write(render_edge_tsv(edges))
    return EXIT_OK


def _cmd_gnc(args) -> int:
    tree = GraphTree.open(args.tree)
    node = _resolve_node(tree, args.node)
    edges = tree.gnc(node)
    sys.stdout.write(render_edge_tsv(edges))
    return EXIT_OK


def _cmd_ceps(args) -> int:
    tree = GraphTree.open(args.tree)
    rec = tree.record(args.leaf)
    if not rec.is_leaf:
        print(f"ceps: record {args.leaf!r} is not a leaf", file=sys.stderr)
        return EXIT_ERROR
    queries = [_resolve_node(tree, part.strip())
               for part in args.nodes.split(",") if part.strip()]
    members = rec.member_nodes
    local = {orig: i for i, orig in enumerate(members)}
    missing = [q for q in queries if q not in local]
    if missing:
        print(f"ceps: query nodes {missing} are not members of leaf {args.leaf!r}",
              file=sys.stderr)
        return EXIT_ERROR
    params = CepsParams(budget=args.budget, c=args.c, tol=args.tol,
                        max_iter=args.max_iter, max_path_len=args.len)
    subgraph = tree.load_leaf(args.leaf)
    local_queries = [local[q] for q in queries]
    scores = goodness_scores(subgraph, local_queries, params)
    piece = extract(subgraph, local_queries, scores, params)
    payload = piece.to_payload(
        scores,
        node_ids={i: members[i] for i in range(len(members))},
        labels=dict(subgraph.labels),
    )
    payload["leaf"] = args.leaf
    print(json.dumps(payload, sort_keys=True, indent=2))
    return EXIT_OK


def _parse_bench_config(path: str) -> BenchConfig:
    values: dict = {}
    list_int = ("node_counts",)
    list_float = ("degrees",)
    scalar_int = ("repetitions", "warmup", "snc_query_cap", "gnc_sample_cap",
                  "seed", "max_nodes", "max_edges")
    scalar_float = ("gnc_fraction",)
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise AssignmentError(f"{path}:{line_no}: expected key = value")
            key, _, value = line.partition("=")
            key = key.strip()
            value = value.strip()
            try:
                if key in list_int:
                    values[key] = tuple(int(p.strip()) for p in value.split(","))
                elif key in list_float:
                    values[key] = tuple(float(p.strip()) for p in value.split(","))
                elif key == "hierarchies":
                    pairs = []
                    for part in value.split(","):
                        ks, _, ls = part.strip().partition("x")
                        pairs.append((int(ks), int(ls)))
                    values[key] = tuple(pairs)
                elif key in scalar_int:
                    values[key] = int(value)
                elif key in scalar_float:
                    values[key] = float(value)
                else:
                    raise AssignmentError(f"{path}:{line_no}: unknown key {key!r}")
            except ValueError:
                raise AssignmentError(f"{path}:{line_no}: cannot parse {value!r}") from None
    return BenchConfig(**values)


def _cmd_bench(args) -> int:
    cfg = _parse_bench_config(args.config) if args.config else BenchConfig()
    rows = run_suite(cfg, out_csv=args.out, progress=args.progress)
    print(f"wrote {len(rows)} measurements to {args.out}")
    try:
        report = fit_scaling(rows)
        print(report.summary())
    except InsufficientDataError as exc:
        print(f"scaling fits skipped: {exc}")
    if args.plots:
        for p in plot_measurements(rows, args.plots):
            print(f"plot: {p}")
    return EXIT_OK


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app
    app = create_app(args.tree, cors=args.cors)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="graphtree", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="partition a graph and fill its tree")
    p.add_argument("--input", required=True, help="edge-list TSV file")
    p.add_argument("--assignment", help="externally produced assignment TSV")
    p.add_argument("--k", type=int, help="children per split (built-in partitioner)")
    p.add_argument("--levels", type=int, help="hierarchy levels incl. root")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="tree directory to create")
    p.add_argument("--emit-assignment", help="also write the assignment TSV here")
    p.set_defaults(fn=_cmd_build)

    p = sub.add_parser("snc", help="edges between two hierarchy records")
    p.add_argument("--tree", required=True)
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.set_defaults(fn=_cmd_snc)

    p = sub.add_parser("gnc", help="external edges of one graph node")
    p.add_argument("--tree", required=True)
    p.add_argument("--node", required=True, help="node id or exact label")
    p.set_defaults(fn=_cmd_gnc)

    p = sub.add_parser("ceps", help="summarize a leaf around query nodes")
    p.add_argument("--tree", required=True)
    p.add_argument("--leaf", required=True)
    p.add_argument("--nodes", required=True, help="comma-separated ids or labels")
    p.add_argument("--budget", type=int, required=True)
    p.add_argument("--len", type=int, default=4, help="max nodes per key path")
    p.add_argument("--c", type=float, default=0.85, help="fly-out probability")
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--max-iter", type=int, default=100)
    p.set_defaults(fn=_cmd_ceps)

    p = sub.add_parser("bench", help="run the timing suite")
    p.add_argument("--config", help="key=value config file (defaults when omitted)")
    p.add_argument("--out", required=True, help="CSV output path")
    p.add_argument("--plots", help="directory for PNG panels")
    p.add_argument("--progress", action="store_true")
    p.set_defaults(fn=_cmd_bench)

    p = sub.add_parser("serve", help="serve a tree over HTTP")
    p.add_argument("--tree", required=True)
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--cors", action="store_true")
    p.set_defaults(fn=_cmd_serve)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except NestedSuperNodesError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NESTED
    except AmbiguousLabelError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_AMBIGUOUS
    except (UnknownRecordError,) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NOT_FOUND
    except (EdgeListParseError, AssignmentError, ManifestError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (CepsError, GraphError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
