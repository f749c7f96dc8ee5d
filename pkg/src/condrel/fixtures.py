"""Small hand-built graphs and seeded random generators.

The hand-built graphs have reliabilities that can be checked by hand; the
generators feed property tests and the benchmark harness.
"""

from __future__ import annotations

from .graph import UncertainGraph
from .rng import SplitMix64


def diamond_graph() -> UncertainGraph:
    """s->a->t and s->b->t with one catalyst per edge.

    Edges: s->a {c1: .5}, a->t {c2: .6}, s->b {c3: .5}, b->t {c1: .5}.
    R({c1,c2}) = 0.3, R({c1,c2,c3}) = 0.475, every single catalyst gives 0.
    """
    return UncertainGraph.build(
        [(0, 1, {0: 0.5}), (1, 3, {1: 0.6}), (0, 2, {2: 0.5}), (2, 3, {0: 0.5})],
        node_labels=["s", "a", "b", "t"],
        catalyst_labels=["c1", "c2", "c3"],
    )


def detour_graph() -> UncertainGraph:
    """Three s-t paths where marginal-gain greedy is misled.

    P1 = s->x->t    (c4 .5, c1 .5)        reliability 0.25
    P2 = s->a->t    (c2 .8, c3 .8)        reliability 0.64
    P3 = s->a->b->t (c2 .8, c1 .7, c2 .7) reliability 0.392

    The best 3-set is {c1,c2,c3} with 0.7184; greedy that opens with c4
    ends at {c4,c1,c2} with 0.544.
    """
    s, x, a, b, t = range(5)
    c1, c2, c3, c4 = range(4)
    return UncertainGraph.build(
        [
            (s, x, {c4: 0.5}),
            (x, t, {c1: 0.5}),
            (s, a, {c2: 0.8}),
            (a, t, {c3: 0.8}),
            (a, b, {c1: 0.7}),
            (b, t, {c2: 0.7}),
        ],
        node_labels=["s", "x", "a", "b", "t"],
        catalyst_labels=["c1", "c2", "c3", "c4"],
    )


# (source, target, [catalyst per hop]) for cover_graph; every hop has p = 0.5
_COVER_ROUTES = [
    ("s1", "t1", ["c3"]),
    ("s1", "t1", ["c2", "c2"]),
    ("s1", "t2", ["c1", "c1", "c1"]),
    ("s1", "t2", ["c1", "c2", "c4"]),
    ("s2", "t1", ["c4", "c3"]),
    ("s2", "t1", ["c1", "c1", "c3"]),
    ("s2", "t2", ["c2", "c1", "c2"]),
    ("s2", "t2", ["c2", "c4", "c2"]),
]


def cover_graph() -> UncertainGraph:
    """Two sources, two targets, two private routes per pair, all hops 0.5.

    Greedy cover picks c3, c4, c1, c2; dropping c4 keeps every pair
    connected, leaving {c1, c2, c3}.
    """
    labels = ["s1", "s2", "t1", "t2"]
    cats = ["c1", "c2", "c3", "c4"]
    edges = []
    for src, dst, hops in _COVER_ROUTES:
        prev = labels.index(src)
        for h, cat in enumerate(hops):
            if h == len(hops) - 1:
                nxt = labels.index(dst)
            else:
                nxt = len(labels)
                labels.append(f"m{nxt}")
            edges.append((prev, nxt, {cats.index(cat): 0.5}))
            prev = nxt
    return UncertainGraph.build(edges, node_labels=labels, catalyst_labels=cats)


def random_graph(
    seed: int,
    n_nodes: int = 8,
    edge_prob: float = 0.25,
    n_catalysts: int = 4,
    max_table: int = 3,
    p_range: tuple[float, float] = (0.2, 0.9),
    max_edges: int | None = None,
) -> UncertainGraph:
    """Directed Erdos-Renyi graph; each edge gets 1..max_table catalysts with p ~ U(p_range)."""
    rnd = SplitMix64(seed)
    pairs = [(u, v) for u in range(n_nodes) for v in range(n_nodes) if u != v]
    edges = []
    for u, v in pairs:
        if rnd.random() < edge_prob:
            size = 1 + rnd.randbelow(min(max_table, n_catalysts))
            table = {c: round(rnd.uniform(*p_range), 6) for c in rnd.sample(range(n_catalysts), size)}
            edges.append((u, v, table))
    if max_edges is not None and len(edges) > max_edges:
        keep = sorted(rnd.sample(range(len(edges)), max_edges))
        edges = [edges[i] for i in keep]
    return UncertainGraph.build(edges, n_nodes=n_nodes, n_catalysts=n_catalysts)


def disjoint_paths_graph(
    seed: int,
    n_paths: int = 3,
    max_len: int = 3,
    n_catalysts: int = 5,
    p_range: tuple[float, float] = (0.3, 0.95),
) -> UncertainGraph:
    """Node 0 = s, node 1 = t, and ``n_paths`` internally disjoint s-t paths.

    Each hop carries a single catalyst, so the multigraph paths are exactly
    the generated ones.  At most one path is a direct s-t edge, so no two
    edges share both endpoints.
    """
    rnd = SplitMix64(seed)
    edges = []
    nxt = 2
    direct = False
    for _ in range(n_paths):
        hops = 1 + rnd.randbelow(max_len)
        if hops == 1 and direct:
            hops = 2
        direct = direct or hops == 1
        prev = 0
        for h in range(hops):
            if h == hops - 1:
                node = 1
            else:
                node = nxt
                nxt += 1
            edges.append((prev, node, {rnd.randbelow(n_catalysts): round(rnd.uniform(*p_range), 6)}))
            prev = node
    return UncertainGraph.build(edges, n_nodes=nxt, n_catalysts=n_catalysts)


def planted_graph(seed: int, n_noise: int = 6, n_catalysts: int = 6) -> UncertainGraph:
    """Source 0, target 1, two planted s-t paths that need several catalysts, plus noise.

    Every planted path needs 2-3 distinct catalysts, so no single catalyst
    connects s to t on its own.  Noise edges touch only the extra nodes and
    ``s``, never ``t``.
    """
    rnd = SplitMix64(seed)
    edges = []
    n = 2
    for _ in range(2):
        hops = 2 + rnd.randbelow(2)
        cats = rnd.sample(range(n_catalysts), hops)
        prev = 0
        for h in range(hops):
            if h == hops - 1:
                node = 1
            else:
                node = n
                n += 1
            edges.append((prev, node, {cats[h]: round(rnd.uniform(0.6, 0.95), 6)}))
            prev = node
    first_noise = n
    n += 3
    for _ in range(n_noise):
        u = rnd.choice([0, *range(2, n)])
        v = rnd.choice([*range(first_noise, n)])
        if u == v:
            continue
        edges.append((u, v, {rnd.randbelow(n_catalysts): round(rnd.uniform(0.2, 0.9), 6)}))
    return UncertainGraph.build(edges, n_nodes=n, n_catalysts=n_catalysts)
