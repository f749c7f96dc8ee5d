"""Slow, obviously-correct reference implementations used only by the tests."""

import itertools
import math

from hypothesis import strategies as st

from condrel.graph import UncertainGraph, world_probability


def reach(graph, present, sources, undirected=False):
    seen = set(sources)
    stack = list(sources)
    while stack:
        u = stack.pop()
        for i, e in enumerate(graph.edges):
            if not present[i]:
                continue
            for a, b in ((e.src, e.dst), (e.dst, e.src)) if undirected else ((e.src, e.dst),):
                if a == u and b not in seen:
                    seen.add(b)
                    stack.append(b)
    return seen


def brute_reliability(graph, s, t, cats):
    """Sum of world probabilities over all 2^|E| worlds, via world_probability."""
    total = 0.0
    for w in range(1 << graph.n_edges):
        present = [(w >> i) & 1 for i in range(graph.n_edges)]
        if t in reach(graph, present, [s]):
            total += world_probability(graph, w, cats)
    return total


def brute_connectivity(graph, q, cats):
    total = 0.0
    for w in range(1 << graph.n_edges):
        present = [(w >> i) & 1 for i in range(graph.n_edges)]
        if set(q) <= reach(graph, present, [q[0]], undirected=True):
            total += world_probability(graph, w, cats)
    return total


def all_simple_paths(mg, s, t):
    """Every simple s-t edge path of a multigraph, as tuples of edge ids."""
    out = []

    def go(u, visited, path):
        if u == t:
            out.append(tuple(path))
            return
        for j in mg.out_edges[u]:
            v = mg.edges[j].dst
            if v not in visited:
                go(v, visited | {v}, path + [j])

    go(s, {s}, [])
    return out


def edge_weight(mg, j):
    return -math.log(next(iter(mg.edges[j].table.values())))


def is_tree_spanning(mg, edge_ids, q):
    nodes = {v for j in edge_ids for v in (mg.edges[j].src, mg.edges[j].dst)}
    if not set(q) <= nodes or len(edge_ids) != len(nodes) - 1:
        return False
    parent = {v: v for v in nodes}

    def find(x):
        while parent[x] != x:
            x = parent[x]
        return x

    for j in edge_ids:
        a, b = find(mg.edges[j].src), find(mg.edges[j].dst)
        if a == b:
            return False
        parent[a] = b
    deg = {v: 0 for v in nodes}
    for j in edge_ids:
        deg[mg.edges[j].src] += 1
        deg[mg.edges[j].dst] += 1
    return all(v in q for v, d in deg.items() if d == 1)


def all_steiner_trees(mg, q, max_edges=None):
    m = mg.n_edges
    limit = max_edges if max_edges is not None else m
    out = []
    for size in range(1, limit + 1):
        for combo in itertools.combinations(range(m), size):
            if is_tree_spanning(mg, combo, q):
                out.append(combo)
    return out


@st.composite
def small_graphs(draw, max_nodes=6, max_edges=9, max_catalysts=4, max_table=3):
    n = draw(st.integers(2, max_nodes))
    nc = draw(st.integers(1, max_catalysts))
    m = draw(st.integers(0, max_edges))
    edges = []
    for _ in range(m):
        u = draw(st.integers(0, n - 1))
        v = draw(st.integers(0, n - 1))
        cats = draw(st.sets(st.integers(0, nc - 1), min_size=1, max_size=min(max_table, nc)))
        table = {c: draw(st.sampled_from([0.1, 0.25, 0.3, 0.5, 0.7, 0.9, 1.0])) for c in sorted(cats)}
        edges.append((u, v, table))
    return UncertainGraph.build(edges, n_nodes=n, n_catalysts=nc)


def subsets(nc):
    return st.sets(st.integers(0, nc - 1))
