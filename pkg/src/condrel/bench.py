"""Benchmark harness: run algorithms over a query list and tabulate the results."""

from __future__ import annotations

import csv
import io
import math
import time
from dataclasses import dataclass, field
from typing import Sequence

from . import rng
from .errors import GuardExceeded, StructuralError
from .estimator import SamplerConfig, mc_connectivity, mc_reliability
from .graph import UncertainGraph
from .multi import AggregateQuery, ConnectivityQuery, connectivity_topk, run_aggregate
from .queries import QuerySpec
from .selection import greedy_topk, individual_topk, rel_path

ALGORITHMS = ("ind-k", "greedy", "rel-path", "max", "avg", "min", "connectivity")
HEADER = ("algo", "query", "k", "r", "seed", "reliability", "ms")
SUMMARY_HEADER = ("algo", "queries", "failures", "mean_reliability", "mean_ms")

_TAG_EVAL = 21


@dataclass(frozen=True)
class BenchmarkRow:
    algo: str
    query: int
    k: int
    r: int
    seed: int
    reliability: float      # nan when the run failed
    ms: float | None        # None when timing is switched off
    # kept for reporting, not part of the CSV schema
    catalysts: tuple[int, ...] = field(default=(), compare=False)
    error: str = field(default="", compare=False)

    @property
    def failed(self) -> bool:
        return math.isnan(self.reliability)

    def cells(self) -> list[str]:
        ms = "" if self.ms is None else f"{self.ms:.3f}"
        return [self.algo, str(self.query), str(self.k), str(self.r), str(self.seed), repr(self.reliability), ms]

    @classmethod
    def from_cells(cls, cells: Sequence[str]) -> "BenchmarkRow":
        algo, q, k, r, seed, rel, ms = cells
        return cls(algo, int(q), int(k), int(r), int(seed), float(rel), float(ms) if ms else None)


def _independent_value(graph, query: QuerySpec, algo, cats, cfg) -> float:
    """Achieved objective under ``cats``, re-estimated by MC with a fresh seed."""
    ev = cfg.with_seed(rng.derive(cfg.seed, _TAG_EVAL, query.qid))
    if algo == "connectivity":
        peers = query.peers or (*query.sources, *query.targets)
        return mc_connectivity(graph, peers, cats, ev).value
    pairs = [(s, t) for s in query.sources for t in query.targets]
    if algo == "max":
        pairs = [(s, t) for s, t in pairs if s not in query.targets and t not in query.sources]
    vals = [mc_reliability(graph, s, t, cats, ev.with_seed(rng.derive(ev.seed, i))).value
            for i, (s, t) in enumerate(pairs)]
    if algo == "max":
        return max(vals)
    if algo == "min":
        return min(vals)
    return sum(vals) / len(vals)


def run_one(graph: UncertainGraph, query: QuerySpec, algo: str, k: int, r: int, cfg: SamplerConfig):
    """Catalyst set chosen by ``algo`` for ``query``."""
    if algo in ("ind-k", "greedy", "rel-path"):
        if not query.is_pair:
            raise ValueError(f"{algo} needs a single source-target query")
        s, t = query.sources[0], query.targets[0]
        if algo == "ind-k":
            return individual_topk(graph, s, t, k, cfg).catalysts
        if algo == "greedy":
            return greedy_topk(graph, s, t, k, cfg).catalysts
        return rel_path(graph, s, t, k, r, cfg).catalysts
    if algo in ("max", "avg", "min"):
        if not query.sources:
            raise ValueError(f"{algo} needs sources and targets")
        q = AggregateQuery(query.sources, query.targets, k, r, algo)
        return run_aggregate(graph, q, cfg).catalysts
    if algo == "connectivity":
        peers = query.peers or (*query.sources, *query.targets)
        return connectivity_topk(graph, ConnectivityQuery(peers, k, r), cfg).catalysts
    raise ValueError(f"unknown algorithm {algo!r}")


def run_benchmark(
    graph: UncertainGraph,
    queries: Sequence[QuerySpec],
    algorithms: Sequence[str],
    k: int,
    r: int,
    cfg: SamplerConfig = SamplerConfig(),
    timing: bool = True,
) -> list[BenchmarkRow]:
    bad = [a for a in algorithms if a not in ALGORITHMS]
    if bad:
        raise ValueError(f"unknown algorithms: {', '.join(bad)}")
    rows = []
    for query in queries:
        for algo in algorithms:
            start = time.perf_counter()
            try:
                cats = run_one(graph, query, algo, k, r, cfg)
                elapsed = round((time.perf_counter() - start) * 1000.0, 3)
                value = _independent_value(graph, query, algo, cats, cfg)
                rows.append(BenchmarkRow(algo, query.qid, k, r, cfg.seed, value,
                                         elapsed if timing else None, tuple(sorted(cats))))
            except (ValueError, StructuralError, GuardExceeded) as e:
                elapsed = round((time.perf_counter() - start) * 1000.0, 3)
                rows.append(BenchmarkRow(algo, query.qid, k, r, cfg.seed, math.nan,
                                         elapsed if timing else None, error=str(e)))
    return rows


def summarize(rows: Sequence[BenchmarkRow]) -> list[tuple[str, int, int, float, float | None]]:
    """Per-algorithm means over successful rows, in first-appearance order."""
    groups: dict[str, list[BenchmarkRow]] = {}
    for row in rows:
        groups.setdefault(row.algo, []).append(row)
    out = []
    for algo, rs in groups.items():
        ok = [x for x in rs if not x.failed]
        mean_rel = math.fsum(x.reliability for x in ok) / len(ok) if ok else math.nan
        times = [x.ms for x in ok if x.ms is not None]
        mean_ms = math.fsum(times) / len(times) if times else None
        out.append((algo, len(rs), len(rs) - len(ok), mean_rel, mean_ms))
    return out


def rows_to_csv(rows: Sequence[BenchmarkRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(HEADER)
    for row in rows:
        w.writerow(row.cells())
    return buf.getvalue()


def rows_from_csv(text: str) -> list[BenchmarkRow]:
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    if tuple(header) != HEADER:
        raise ValueError(f"unexpected header {header}")
    return [BenchmarkRow.from_cells(cells) for cells in reader]


def summary_to_csv(summary) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SUMMARY_HEADER)
    for algo, n, fails, rel, ms in summary:
        w.writerow([algo, n, fails, repr(rel), "" if ms is None else f"{ms:.3f}"])
    return buf.getvalue()
