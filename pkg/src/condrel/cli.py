"""Command line entry point.

Exit codes: 0 success, 1 query error (bad node, guard exceeded, ...),
2 graph parse error or bad usage.
"""

from __future__ import annotations

import argparse
import json
import sys
import warnings
from pathlib import Path

from . import fixtures
from .bench import ALGORITHMS, rows_to_csv, run_benchmark, summarize, summary_to_csv
from .errors import GraphFormatError, GuardExceeded, StructuralError
from .estimator import SamplerConfig
from .io import format_graph, load_graph
from .multi import AggregateQuery, ConnectivityQuery, connectivity_topk, run_aggregate
from .oracle import MAX_EXACT_EDGES, exact_connectivity, exact_multi_reliability, exhaustive_topk
from .queries import MODES, QueryError, QuerySpec, generate_queries
from .selection import greedy_topk, individual_topk, rel_path

SINGLE_PAIR = ("ind-k", "greedy", "rel-path")
NAMED_GRAPHS = {
    "diamond": fixtures.diamond_graph,
    "detour": fixtures.detour_graph,
    "cover": fixtures.cover_graph,
}


def _nodes(graph, text: str | None) -> list[int]:
    if not text:
        return []
    return [graph.node(x.strip()) for x in text.split(",") if x.strip()]


def _catalysts(graph, text: str | None) -> frozenset[int]:
    if not text:
        return frozenset()
    return frozenset(graph.catalyst(x.strip()) for x in text.split(",") if x.strip())


def _emit(fmt: str, record: dict) -> str:
    """One result as a CSV header plus row, or as a JSON object."""
    if fmt == "json":
        return json.dumps(record) + "\n"
    cells = []
    for v in record.values():
        if isinstance(v, list):
            v = " ".join(map(str, v))
        elif isinstance(v, float):
            v = repr(v)
        cells.append(str(v))
    return ",".join(record) + "\n" + ",".join(cells) + "\n"


def _cfg(args) -> SamplerConfig:
    return SamplerConfig(samples=args.samples, seed=args.seed, workers=args.workers)


def cmd_query(args, out) -> None:
    g = load_graph(args.graph)
    cfg = _cfg(args)
    if args.peers:
        res = connectivity_topk(g, ConnectivityQuery(tuple(_nodes(g, args.peers)), args.k, args.r), cfg)
        algo = "connectivity"
    elif args.sources or args.targets:
        q = AggregateQuery(tuple(_nodes(g, args.sources)), tuple(_nodes(g, args.targets)),
                           args.k, args.r, args.aggregate)
        res = run_aggregate(g, q, cfg)
        algo = args.aggregate
    else:
        if args.source is None or args.target is None:
            raise QueryError("give --source/--target, --sources/--targets or --peers")
        s, t = g.node(args.source), g.node(args.target)
        algo = args.algo
        if algo == "ind-k":
            res = individual_topk(g, s, t, args.k, cfg)
        elif algo == "greedy":
            res = greedy_topk(g, s, t, args.k, cfg)
        else:
            res = rel_path(g, s, t, args.k, args.r, cfg)
    out.write(_emit(args.format, {
        "algo": algo,
        "k": args.k,
        "r": args.r,
        "seed": args.seed,
        "catalysts": res.labels(g),
        "reliability": res.reliability,
    }))


def cmd_bench(args, out) -> None:
    g = load_graph(args.graph)
    if args.queries:
        lines = Path(args.queries).read_text(encoding="utf-8").splitlines()
        queries = [QuerySpec.from_json(x, g) for x in lines if x.strip()]
    else:
        queries = generate_queries(g, args.mode, args.count, args.seed, d=args.d)
    algos = [a.strip() for a in args.algos.split(",") if a.strip()]
    rows = run_benchmark(g, queries, algos, args.k, args.r, _cfg(args), timing=args.timing == "on")
    for row in rows:
        if row.error:
            print(f"query {row.query} {row.algo}: {row.error}", file=sys.stderr)
    out.write(rows_to_csv(rows))
    if args.summary:
        Path(args.summary).write_text(summary_to_csv(summarize(rows)), encoding="utf-8")


def cmd_gen_queries(args, out) -> None:
    g = load_graph(args.graph)
    qs = generate_queries(g, args.mode, args.count, args.seed, d=args.d, n_sources=args.n_sources,
                          n_targets=args.n_targets, n_peers=args.n_peers)
    if args.format == "json":
        for q in qs:
            out.write(q.to_json(g) + "\n")
        return
    lab = g.node_labels
    out.write("query,mode,sources,targets,peers\n")
    for q in qs:
        out.write(",".join([str(q.qid), q.mode, *(" ".join(lab[v] for v in vs)
                                                  for vs in (q.sources, q.targets, q.peers))]) + "\n")


def cmd_oracle(args, out) -> None:
    g = load_graph(args.graph)
    if args.peers:
        res = exact_connectivity(g, _nodes(g, args.peers), _catalysts(g, args.catalysts), args.limit)
        record = {"quantity": "connectivity", "catalysts": sorted(args.catalysts.split(",")) if args.catalysts else [],
                  "value": res.value, "worlds": res.worlds_enumerated}
    else:
        if args.source is None or args.target is None:
            raise QueryError("give --source and --target, or --peers")
        s, t = g.node(args.source), g.node(args.target)
        if args.topk is not None:
            best, value = exhaustive_topk(g, s, t, args.topk, args.limit)
            record = {"quantity": "best-set", "k": args.topk,
                      "catalysts": [g.catalyst_labels[c] for c in sorted(best)], "value": value}
        else:
            cats = _catalysts(g, args.catalysts)
            res = exact_multi_reliability(g, [s], t, cats, args.limit)
            record = {"quantity": "reliability", "catalysts": [g.catalyst_labels[c] for c in sorted(cats)],
                      "value": res.value, "worlds": res.worlds_enumerated}
    out.write(_emit(args.format, record))


def cmd_validate(args, out) -> None:
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        g = load_graph(args.graph)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    isolated = sum(1 for v in range(g.n_nodes) if not g.out_edges[v] and not g.in_edges[v])
    out.write(_emit(args.format, {"nodes": g.n_nodes, "edges": g.n_edges, "catalysts": g.n_catalysts,
                                  "rows": sum(len(e.table) for e in g.edges), "isolated": isolated,
                                  "warnings": len(caught)}))


def cmd_synth(args, out) -> None:
    if args.name:
        g = NAMED_GRAPHS[args.name]()
    else:
        g = fixtures.random_graph(args.seed, args.nodes, args.edge_prob, args.n_catalysts)
    out.write(format_graph(g))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="condrel", description="Catalyst selection for uncertain graphs.")
    sub = parser.add_subparsers(dest="verb", required=True)

    def common(p, graph=True):
        if graph:
            p.add_argument("--graph", required=True, help="graph file")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--format", choices=("csv", "json"), default="csv")

    def sampling(p):
        p.add_argument("--k", type=int, default=3, help="catalyst budget")
        p.add_argument("--r", type=int, default=10, help="paths or trees per query")
        p.add_argument("--samples", type=int, default=1000, help="Monte Carlo trials per estimate")
        p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("query", help="select catalysts for one query")
    common(p)
    sampling(p)
    p.add_argument("--source")
    p.add_argument("--target")
    p.add_argument("--sources", help="comma-separated node labels")
    p.add_argument("--targets", help="comma-separated node labels")
    p.add_argument("--peers", help="comma-separated node labels")
    p.add_argument("--algo", choices=SINGLE_PAIR, default="rel-path")
    p.add_argument("--aggregate", choices=("max", "avg", "min"), default="avg")
    p.set_defaults(func=cmd_query)

    p = sub.add_parser("bench", help="run algorithms over many queries, CSV out")
    common(p)
    sampling(p)
    p.add_argument("--queries", help="JSON-lines file from gen-queries --format json")
    p.add_argument("--mode", choices=MODES, default="random-pair")
    p.add_argument("--count", type=int, default=10)
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--algos", default="ind-k,greedy,rel-path", help=f"comma list from {','.join(ALGORITHMS)}")
    p.add_argument("--summary", help="write per-algorithm means to this CSV file")
    p.add_argument("--timing", choices=("on", "off"), default="on",
                   help="'off' leaves the ms column empty so output is reproducible")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("gen-queries", help="generate seeded queries")
    common(p)
    p.add_argument("--mode", choices=MODES, default="random-pair")
    p.add_argument("--count", type=int, default=10)
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--n-sources", type=int, default=2)
    p.add_argument("--n-targets", type=int, default=2)
    p.add_argument("--n-peers", type=int, default=3)
    p.set_defaults(func=cmd_gen_queries)

    p = sub.add_parser("oracle", help="exact values by enumeration (small graphs only)")
    common(p)
    p.add_argument("--source")
    p.add_argument("--target")
    p.add_argument("--peers")
    p.add_argument("--catalysts", help="comma-separated catalyst labels")
    p.add_argument("--topk", type=int, help="search every catalyst set of this size")
    p.add_argument("--limit", type=int, default=MAX_EXACT_EDGES, help="max positive edges")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("validate", help="check a graph file")
    common(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("synth", help="write a built-in or random graph")
    common(p, graph=False)
    p.add_argument("--name", choices=sorted(NAMED_GRAPHS))
    p.add_argument("--nodes", type=int, default=50)
    p.add_argument("--edge-prob", type=float, default=0.05)
    p.add_argument("--n-catalysts", type=int, default=8)
    p.set_defaults(func=cmd_synth)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args, sys.stdout)
    except GraphFormatError as e:
        print(f"error: {args.graph}: {e}", file=sys.stderr)
        return 2
    except (QueryError, StructuralError, GuardExceeded, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    return 0
