"""Measure how query time scales, at coffee-break size.

Runs the measurement suite on a handful of synthetic graphs: every timed
query is answered by both the tree engine and a labeled adjacency-list
baseline (answers must agree), then the medians are fitted. Expect the
between-record query to be linear in its answer size and the per-node
query to follow tree height, with the tree keeping only the external
share of edges in memory. The full desk-scale sweep lives in the
acceptance tests; pass --full here to reproduce it (takes minutes).

Run:  python3 demos/03_scaling_measurements.py [--full] [--plots DIR]
"""

import sys

from graphtree.bench import BenchConfig, fit_scaling, plot_measurements, run_suite

full = "--full" in sys.argv
plots_dir = None
if "--plots" in sys.argv:
    plots_dir = sys.argv[sys.argv.index("--plots") + 1]

if full:
    cfg = BenchConfig(node_counts=(5_000, 20_000, 50_000, 200_000),
                      degrees=(3.0, 12.0, 20.0),
                      hierarchies=((4, 3), (2, 2), (2, 4), (3, 5), (2, 6)),
                      repetitions=5, seed=7, snc_query_cap=40, gnc_sample_cap=4_000)
else:
    cfg = BenchConfig(node_counts=(5_000, 20_000), degrees=(3.0, 12.0),
                      hierarchies=((4, 3), (2, 2), (2, 4), (3, 5), (2, 6)),
                      repetitions=5, seed=7, snc_query_cap=30, gnc_sample_cap=2_000)

rows = run_suite(cfg, out_csv="scaling_rows.csv", progress=True)
print(f"\n{len(rows)} measurements -> scaling_rows.csv")

report = fit_scaling(rows)
print(report.summary())

mem = [(r.n, r.avg_degree, r.k, r.levels, r.engine, r.resident_edges, r.m)
       for r in rows if r.op == "memory" and r.resident_edges is not None]
print("\nresident edges (tree vs baseline):")
seen = set()
for n, d, k, levels, engine, resident, m in mem:
    key = (n, d, k, levels)
    if key in seen or engine != "tree":
        continue
    seen.add(key)
    base = next(r for nn, dd, kk, ll, e, r, _ in mem
                if (nn, dd, kk, ll) == key and e == "baseline")
    print(f"  n={n:>7} d={d:>4} ({k}x{levels}): tree {resident:>9} / baseline {base:>9} "
          f"({resident / base:.0%} resident)")

if plots_dir:
    for path in plot_measurements(rows, plots_dir):
        print(f"plot: {path}")
