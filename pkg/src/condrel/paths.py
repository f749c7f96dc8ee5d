"""Most-reliable labeled paths.

Every edge is split into one parallel edge per catalyst in its table, weighted
``-log P(e|c)``.  The most reliable labeled paths are then the shortest paths
of that multigraph.  Simple paths are enumerated in order with Yen's deviation
method (Dijkstra as the subroutine, so weights must be non-negative, which
``-log p`` for ``p <= 1`` guarantees).
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Iterator, Sequence

from .errors import StructuralError
from .estimator import SamplerConfig, evaluate_reliability
from .graph import EdgeRecord, UncertainGraph, subgraph_from_choices

TIE_EPS = 1e-12


@dataclass(frozen=True)
class LabeledEdgeChoice:
    edge: int        # index in the original graph
    catalyst: int
    probability: float
    src: int
    dst: int

    @property
    def weight(self) -> float:
        return -math.log(self.probability)


@dataclass(frozen=True)
class RelPath:
    nodes: tuple[int, ...]
    choices: tuple[LabeledEdgeChoice, ...]

    @property
    def reliability(self) -> float:
        r = 1.0
        for ch in self.choices:
            r *= ch.probability
        return r

    @property
    def weight(self) -> float:
        return sum(ch.weight for ch in self.choices)

    @property
    def catalysts(self) -> frozenset[int]:
        return frozenset(ch.catalyst for ch in self.choices)

    @property
    def key(self) -> tuple[tuple[int, ...], tuple[int, ...]]:
        return self.nodes, tuple(ch.catalyst for ch in self.choices)

    @property
    def source(self) -> int:
        return self.nodes[0]

    @property
    def target(self) -> int:
        return self.nodes[-1]


def build_multigraph(graph: UncertainGraph) -> UncertainGraph:
    """One single-catalyst edge per (edge, catalyst) pair; ``edge_origin`` points back.

    The result is cached on ``graph`` (graphs are immutable).
    """
    cached = graph.__dict__.get("_multigraph")
    if cached is not None:
        return cached
    recs = []
    origin = []
    base = graph.edge_origin
    for i, e in enumerate(graph.edges):
        for c in sorted(e.table):
            recs.append(EdgeRecord(e.src, e.dst, {c: e.table[c]}))
            origin.append(base[i] if base is not None else i)
    mg = UncertainGraph(graph.node_labels, graph.catalyst_labels, tuple(recs), tuple(origin),
                        graph.node_origin)
    object.__setattr__(graph, "_multigraph", mg)
    return mg


def _choice(mg: UncertainGraph, j: int) -> LabeledEdgeChoice:
    e = mg.edges[j]
    if len(e.table) != 1:
        raise StructuralError(f"edge {j} carries {len(e.table)} catalysts; build the multigraph first")
    (c, p), = e.table.items()
    origin = mg.edge_origin[j] if mg.edge_origin is not None else j
    return LabeledEdgeChoice(origin, c, p, e.src, e.dst)


def _dijkstra(adj, source, target, banned_nodes, banned_edges):
    """Shortest simple path as a list of multigraph edge ids, or None.

    ``adj[u]`` lists ``(v, edge id, weight)`` for the out-edges of ``u``.
    """
    dist = {source: 0.0}
    pred: dict[int, tuple[int, int]] = {}
    heap = [(0.0, source)]
    done = set()
    while heap:
        d, u = heapq.heappop(heap)
        if u in done:
            continue
        done.add(u)
        if u == target:
            break
        for v, j, w in adj[u]:
            if v in done or v in banned_nodes or j in banned_edges:
                continue
            nd = d + w
            if v not in dist or nd < dist[v]:
                dist[v] = nd
                pred[v] = (j, u)
                heapq.heappush(heap, (nd, v))
    if target not in done:
        return None
    path = []
    v = target
    while v != source:
        j, v = pred[v]
        path.append(j)
    path.reverse()
    return path


def _nodes_of(mg, s, edge_path) -> tuple[int, ...]:
    return (s, *(mg.edges[j].dst for j in edge_path))


def _search_index(mg: UncertainGraph):
    """Per-edge weights and catalysts plus a flat adjacency list, cached on ``mg``."""
    idx = mg.__dict__.get("_search_index")
    if idx is None:
        weights = [-math.log(next(iter(e.table.values()))) for e in mg.edges]
        labels = [next(iter(e.table)) for e in mg.edges]
        adj = [[(mg.edges[j].dst, j, weights[j]) for j in mg.out_edges[u] if mg.edges[j].dst != u]
               for u in range(mg.n_nodes)]
        idx = (weights, labels, adj)
        object.__setattr__(mg, "_search_index", idx)
    return idx


def _yen(mg: UncertainGraph, s: int, t: int) -> Iterator[tuple[float, tuple[int, ...]]]:
    """Loopless s-t edge paths in non-decreasing weight order."""
    weights, labels, adj = _search_index(mg)

    def rank(p):
        return (sum(weights[j] for j in p), _nodes_of(mg, s, p), tuple(labels[j] for j in p), p)

    first = _dijkstra(adj, s, t, set(), set())
    if first is None:
        return
    accepted: list[tuple[int, ...]] = []
    seen = {tuple(first)}
    heap = [rank(tuple(first))]
    while heap:
        w, _, _, path = heapq.heappop(heap)
        accepted.append(path)
        yield w, path
        nodes = _nodes_of(mg, s, path)
        for i in range(len(path)):
            root = path[:i]
            banned_edges = {p[i] for p in accepted if len(p) > i and p[:i] == root}
            banned_nodes = set(nodes[:i])
            spur = _dijkstra(adj, nodes[i], t, banned_nodes, banned_edges)
            if spur is None:
                continue
            cand = root + tuple(spur)
            if cand not in seen:
                seen.add(cand)
                heapq.heappush(heap, rank(cand))


def _to_relpath(mg, s, edge_path) -> RelPath:
    return RelPath(_nodes_of(mg, s, edge_path), tuple(_choice(mg, j) for j in edge_path))


def top_r_paths(multigraph: UncertainGraph, s: int, t: int, r: int) -> list[RelPath]:
    """Up to ``r`` most reliable simple labeled s-t paths.

    Order is by total ``-log p`` weight; weights within 1e-12 count as ties and
    are ordered by node sequence, then catalyst sequence.
    """
    multigraph.check_node(s)
    multigraph.check_node(t)
    if r < 1:
        raise ValueError("r must be at least 1")
    for j, e in enumerate(multigraph.edges):
        if len(e.table) != 1:
            raise StructuralError(f"edge {j} carries {len(e.table)} catalysts; build the multigraph first")
    if s == t:
        return [RelPath((s,), ())]

    found: list[tuple[float, RelPath]] = []
    keys = set()
    gen = _yen(multigraph, s, t)
    cutoff = None
    for w, ep in gen:
        if cutoff is not None and w > cutoff + TIE_EPS:
            break
        p = _to_relpath(multigraph, s, ep)
        if p.key in keys:
            continue
        keys.add(p.key)
        found.append((w, p))
        if len(found) == r and cutoff is None:
            # keep pulling paths tied with the r-th so tie order is canonical
            cutoff = w
    found = _canonical_order(found)
    return [p for _, p in found[:r]]


def _canonical_order(items):
    """Stable tie grouping: consecutive weights within TIE_EPS of a group's first weight."""
    out = []
    group: list = []
    for w, p in items:
        if group and w - group[0][0] > TIE_EPS:
            out.extend(sorted(group, key=lambda x: x[1].key))
            group = []
        group.append((w, p))
    out.extend(sorted(group, key=lambda x: x[1].key))
    return out


def path_set_reliability(paths: Sequence[RelPath], s: int, t: int, cfg: SamplerConfig) -> float:
    """Reliability from ``s`` to ``t`` in the subgraph induced by ``paths``."""
    if s == t:
        return 1.0
    if not paths:
        return 0.0
    sub = subgraph_from_choices([ch for p in paths for ch in p.choices], (s, t))
    cats = frozenset(ch.catalyst for p in paths for ch in p.choices)
    return evaluate_reliability(sub, sub.local_id(s), sub.local_id(t), cats, cfg).value


def suggest_r(
    multigraph: UncertainGraph,
    s: int,
    t: int,
    epsilon: float,
    r_max: int = 100,
    cfg: SamplerConfig = SamplerConfig(),
) -> int:
    """Smallest r whose (r+1)-th path adds less than ``epsilon`` reliability."""
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    paths = top_r_paths(multigraph, s, t, r_max + 1)
    prev = path_set_reliability(paths[:1], s, t, cfg)
    for r in range(1, r_max + 1):
        if r >= len(paths):
            return r
        cur = path_set_reliability(paths[: r + 1], s, t, cfg)
        if cur - prev < epsilon:
            return r
        prev = cur
    return r_max
