"""Exact ground truth by exhaustive possible-world enumeration.

Exponential time; every entry point refuses inputs above a size guard.
Worlds are enumerated in fixed-size chunks with numpy: each world is one
lane, reachability is propagated as a node bitmask until a fixpoint.  The
per-chunk sums are accumulated in chunk order, so results are reproducible
bit for bit.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .errors import GuardExceeded
from .graph import UncertainGraph

MAX_EXACT_EDGES = 25
MAX_SUBSETS = 100_000
_CHUNK_BITS = 16


@dataclass(frozen=True)
class ExactResult:
    value: float
    worlds_enumerated: int


def _local_problem(graph: UncertainGraph, cats, anchors: Iterable[int], limit: int):
    probs = graph.edge_probabilities(cats)
    pos = [i for i, p in enumerate(probs) if p > 0.0]
    if len(pos) > limit:
        raise GuardExceeded(
            f"exact enumeration over {len(pos)} positive-probability edges exceeds the limit of {limit}"
        )
    nodes = set(anchors)
    for i in pos:
        nodes.add(graph.edges[i].src)
        nodes.add(graph.edges[i].dst)
    local = {v: j for j, v in enumerate(sorted(nodes))}
    if len(local) > 64:
        raise GuardExceeded(f"{len(local)} touched nodes do not fit a 64-bit reachability mask")
    edges = [(local[graph.edges[i].src], local[graph.edges[i].dst], probs[i]) for i in pos]
    return local, edges


def _enumerate(edges, start_mask: int, goal_mask: int, undirected: bool) -> float:
    """Total probability of worlds where propagation from ``start_mask`` covers ``goal_mask``."""
    m = len(edges)
    total_worlds = 1 << m
    chunk = min(total_worlds, 1 << _CHUNK_BITS)
    one = np.uint64(1)
    start = np.uint64(start_mask)
    goal = np.uint64(goal_mask)
    arcs = [(u, v) for u, v, _ in edges if u != v]
    arc_edge = [j for j, (u, v, _) in enumerate(edges) if u != v]
    total = 0.0
    for base in range(0, total_worlds, chunk):
        w = np.arange(base, base + chunk, dtype=np.uint64)
        prob = np.ones(chunk)
        bits = []
        for j, (_, _, p) in enumerate(edges):
            b = (w >> np.uint64(j)) & one
            prob *= np.where(b == one, p, 1.0 - p)
            bits.append(b)
        reach = np.full(chunk, start, dtype=np.uint64)
        while True:
            before = reach
            for (u, v), j in zip(arcs, arc_edge):
                b = bits[j]
                reach = reach | ((((reach >> np.uint64(u)) & one) & b) << np.uint64(v))
                if undirected:
                    reach = reach | ((((reach >> np.uint64(v)) & one) & b) << np.uint64(u))
            if np.array_equal(before, reach):
                break
        ok = (reach & goal) == goal
        total += float(prob[ok].sum())
    return total


def exact_reliability(
    graph: UncertainGraph, s: int, t: int, cats, limit: int = MAX_EXACT_EDGES
) -> ExactResult:
    """Probability that ``t`` is reachable from ``s`` (directed) under ``cats``."""
    graph.check_node(s)
    graph.check_node(t)
    cats = graph.check_catalysts(cats)
    local, edges = _local_problem(graph, cats, (s, t), limit)
    worlds = 1 << len(edges)
    if s == t:
        return ExactResult(1.0, worlds)
    value = _enumerate(edges, 1 << local[s], 1 << local[t], undirected=False)
    return ExactResult(min(1.0, value), worlds)


def exact_multi_reliability(
    graph: UncertainGraph, sources, t: int, cats, limit: int = MAX_EXACT_EDGES
) -> ExactResult:
    """Probability that ``t`` is reachable from at least one of ``sources``."""
    sources = [graph.check_node(v) for v in sources]
    graph.check_node(t)
    cats = graph.check_catalysts(cats)
    local, edges = _local_problem(graph, cats, (*sources, t), limit)
    worlds = 1 << len(edges)
    if t in sources:
        return ExactResult(1.0, worlds)
    start = 0
    for v in sources:
        start |= 1 << local[v]
    return ExactResult(min(1.0, _enumerate(edges, start, 1 << local[t], False)), worlds)


def exact_connectivity(graph: UncertainGraph, q, cats, limit: int = MAX_EXACT_EDGES) -> ExactResult:
    """Probability that all of ``q`` share one weakly connected component."""
    q = sorted({graph.check_node(v) for v in q})
    if len(q) < 2:
        raise ValueError("connectivity needs at least two query nodes")
    cats = graph.check_catalysts(cats)
    local, edges = _local_problem(graph, cats, q, limit)
    goal = 0
    for v in q:
        goal |= 1 << local[v]
    value = _enumerate(edges, 1 << local[q[0]], goal, undirected=True)
    return ExactResult(min(1.0, value), 1 << len(edges))


def exhaustive_topk(
    graph: UncertainGraph, s: int, t: int, k: int, limit: int = MAX_EXACT_EDGES
) -> tuple[frozenset[int], float]:
    """Best size-``k`` catalyst set by trying every subset.

    Ties keep the lexicographically smallest member list (the first one
    met in ``itertools.combinations`` order).
    """
    nc = graph.n_catalysts
    k = min(k, nc)
    if k < 0:
        raise ValueError("k must be non-negative")
    n_subsets = math.comb(nc, k)
    if n_subsets > MAX_SUBSETS:
        raise GuardExceeded(f"C({nc},{k}) = {n_subsets} subsets exceeds the limit of {MAX_SUBSETS}")
    best_set: tuple[int, ...] | None = None
    best = -1.0
    for combo in itertools.combinations(range(nc), k):
        val = exact_reliability(graph, s, t, combo, limit).value
        if val > best + 1e-12:
            best, best_set = val, combo
    return frozenset(best_set or ()), max(best, 0.0)
