"""Seeded query generation.

Random-pair queries draw a uniform source and a uniform other node.
Distance-bounded queries draw a uniform source and then a uniform target among
the nodes reachable within ``d`` hops, ignoring probabilities.  Multi queries
draw a source set and a target set; peer queries draw a node set.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass

from . import rng
from .graph import UncertainGraph

MODES = ("random-pair", "distance", "multi", "peers")
MAX_RETRIES = 100


class QueryError(ValueError):
    pass


@dataclass(frozen=True)
class QuerySpec:
    qid: int
    mode: str
    sources: tuple[int, ...] = ()
    targets: tuple[int, ...] = ()
    peers: tuple[int, ...] = ()

    @property
    def is_pair(self) -> bool:
        return len(self.sources) == 1 and len(self.targets) == 1

    def to_json(self, graph: UncertainGraph) -> str:
        lab = graph.node_labels
        return json.dumps({
            "query": self.qid,
            "mode": self.mode,
            "sources": [lab[v] for v in self.sources],
            "targets": [lab[v] for v in self.targets],
            "peers": [lab[v] for v in self.peers],
        })

    @classmethod
    def from_json(cls, line: str, graph: UncertainGraph) -> "QuerySpec":
        d = json.loads(line)
        return cls(
            int(d["query"]),
            d["mode"],
            tuple(graph.node(x) for x in d.get("sources", ())),
            tuple(graph.node(x) for x in d.get("targets", ())),
            tuple(graph.node(x) for x in d.get("peers", ())),
        )


def within_hops(graph: UncertainGraph, s: int, d: int) -> list[int]:
    """Nodes other than ``s`` reachable from ``s`` in at most ``d`` hops."""
    dist = {s: 0}
    queue = deque([s])
    while queue:
        u = queue.popleft()
        if dist[u] == d:
            continue
        for j in graph.out_edges[u]:
            v = graph.edges[j].dst
            if v not in dist:
                dist[v] = dist[u] + 1
                queue.append(v)
    return sorted(v for v in dist if v != s)


def generate_query(
    graph: UncertainGraph,
    mode: str,
    seed: int,
    d: int = 2,
    n_sources: int = 2,
    n_targets: int = 2,
    n_peers: int = 3,
    disjoint: bool = True,
    qid: int = 0,
) -> QuerySpec:
    if mode not in MODES:
        raise QueryError(f"unknown query mode {mode!r}; choose from {', '.join(MODES)}")
    n = graph.n_nodes
    if n == 0:
        raise QueryError("the graph has no nodes")
    rnd = rng.SplitMix64(rng.derive(seed, qid))
    if mode == "random-pair":
        if n < 2:
            raise QueryError("need at least two nodes")
        s = rnd.randbelow(n)
        t = rnd.randbelow(n - 1)
        return QuerySpec(qid, mode, (s,), (t + (t >= s),))
    if mode == "distance":
        if d < 1:
            raise QueryError("d must be at least 1")
        for _ in range(MAX_RETRIES):
            s = rnd.randbelow(n)
            near = within_hops(graph, s, d)
            if near:
                return QuerySpec(qid, mode, (s,), (rnd.choice(near),))
        raise QueryError(f"no source with a node within {d} hops after {MAX_RETRIES} draws")
    if mode == "multi":
        need = n_sources + n_targets if disjoint else max(n_sources, n_targets)
        if n_sources < 1 or n_targets < 1 or need > n:
            raise QueryError("not enough nodes for the requested source and target sets")
        if disjoint:
            picked = rnd.sample(range(n), need)
            return QuerySpec(qid, mode, tuple(sorted(picked[:n_sources])), tuple(sorted(picked[n_sources:])))
        return QuerySpec(qid, mode, tuple(sorted(rnd.sample(range(n), n_sources))),
                         tuple(sorted(rnd.sample(range(n), n_targets))))
    if not (2 <= n_peers <= n):
        raise QueryError("peer count must lie between 2 and the number of nodes")
    return QuerySpec(qid, mode, peers=tuple(sorted(rnd.sample(range(n), n_peers))))


def generate_queries(graph: UncertainGraph, mode: str, count: int, seed: int, **kw) -> list[QuerySpec]:
    return [generate_query(graph, mode, seed, qid=i, **kw) for i in range(count)]
