"""Top-r minimum Steiner trees on the undirected view of a weighted multigraph.

The single best tree comes from the Dreyfus-Wagner dynamic program over
terminal subsets (``O(3^|Q| n + 2^|Q| m log n)``).  Further trees are found
with Lawler's partitioning: a solved subspace (forced-in edges ``I``,
forbidden edges ``X``) is split on the free edges of its optimum.  Free edges
are ordered by BFS from the forced part, so ``I`` always stays one connected
piece containing the root terminal; contracting it yields a super-terminal
and the subproblem keeps at most ``|Q|`` terminals.
"""

from __future__ import annotations

import heapq
import math
from collections import defaultdict
from dataclasses import dataclass

from .errors import GuardExceeded, StructuralError
from .graph import UncertainGraph
from .paths import TIE_EPS, LabeledEdgeChoice, _choice

MAX_TERMINALS = 8


@dataclass(frozen=True)
class SteinerTree:
    choices: tuple[LabeledEdgeChoice, ...]
    weight: float
    edge_ids: tuple[int, ...]  # multigraph edge ids, sorted

    @property
    def catalysts(self) -> frozenset[int]:
        return frozenset(ch.catalyst for ch in self.choices)

    @property
    def nodes(self) -> frozenset[int]:
        return frozenset(v for ch in self.choices for v in (ch.src, ch.dst))

    @property
    def reliability(self) -> float:
        r = 1.0
        for ch in self.choices:
            r *= ch.probability
        return r


class _Solver:
    def __init__(self, mg: UncertainGraph, q: list[int]):
        self.mg = mg
        self.q = q
        self.root = q[0]
        self.w = [-math.log(next(iter(e.table.values()))) for e in mg.edges]
        self.ends = [(e.src, e.dst) for e in mg.edges]

    def solve(self, forced: tuple[int, ...], banned: frozenset[int]):
        """Cheapest tree containing ``forced`` and avoiding ``banned``; returns
        (weight, free edges in BFS order) or None."""
        fnodes = {self.root}
        for j in forced:
            fnodes.update(self.ends[j])
        forced_set = set(forced)
        # contracted ids: 0 is the forced super-node
        cid = {}
        nxt = 1
        for v in range(self.mg.n_nodes):
            if v in fnodes:
                cid[v] = 0
            else:
                cid[v] = nxt
                nxt += 1
        n = nxt
        terms = [0] + [cid[v] for v in self.q if v not in fnodes]
        adj: list[list[tuple[int, int]]] = [[] for _ in range(n)]
        for j, (a, b) in enumerate(self.ends):
            if j in banned or j in forced_set:
                continue
            ca, cb = cid[a], cid[b]
            if ca == cb:
                continue
            adj[ca].append((cb, j))
            adj[cb].append((ca, j))
        if len(terms) == 1:
            extra: list[int] = []
        else:
            extra = self._dreyfus_wagner(n, adj, terms)
            if extra is None:
                return None
            extra = self._tidy(extra, cid, set(terms))
        order = self._bfs_order(fnodes, extra)
        all_edges = sorted(forced_set | set(extra))
        return math.fsum(self.w[j] for j in all_edges), order, tuple(all_edges)

    def _dreyfus_wagner(self, n, adj, terms):
        t = len(terms)
        full = (1 << t) - 1
        inf = math.inf
        dp = [[inf] * n for _ in range(full + 1)]
        bp: list[list] = [[None] * n for _ in range(full + 1)]
        for i, v in enumerate(terms):
            dp[1 << i][v] = 0.0
        w = self.w
        for mask in range(1, full + 1):
            row = dp[mask]
            brow = bp[mask]
            low = mask & -mask
            if mask != low:
                sub = (mask - 1) & mask
                while sub:
                    if sub & low:
                        a, b = dp[sub], dp[mask ^ sub]
                        for v in range(n):
                            c = a[v] + b[v]
                            if c < row[v]:
                                row[v] = c
                                brow[v] = ("m", sub)
                    sub = (sub - 1) & mask
            heap = [(d, v) for v, d in enumerate(row) if d < inf]
            heapq.heapify(heap)
            done = [False] * n
            while heap:
                d, u = heapq.heappop(heap)
                if done[u] or d > row[u]:
                    continue
                done[u] = True
                for v, j in adj[u]:
                    nd = d + w[j]
                    if nd < row[v] and not done[v]:
                        row[v] = nd
                        brow[v] = ("e", j, u)
                        heapq.heappush(heap, (nd, v))
        if dp[full][terms[0]] == inf:
            return None
        edges: set[int] = set()
        stack = [(full, terms[0])]
        while stack:
            mask, v = stack.pop()
            b = bp[mask][v]
            if b is None:
                continue
            if b[0] == "m":
                stack.append((b[1], v))
                stack.append((mask ^ b[1], v))
            else:
                edges.add(b[1])
                stack.append((mask, b[2]))
        return sorted(edges)

    def _tidy(self, edges, cid, terms):
        """Spanning tree of the reconstructed edge union, minus non-terminal leaves.

        Zero-weight edges can make the union cyclic; neither step raises weight.
        """
        parent = {}

        def find(x):
            while parent.get(x, x) != x:
                parent[x] = parent.get(parent[x], parent[x])
                x = parent[x]
            return x

        kept = []
        for j in sorted(edges, key=lambda j: (self.w[j], j)):
            a, b = find(cid[self.ends[j][0]]), find(cid[self.ends[j][1]])
            if a != b:
                parent[a] = b
                kept.append(j)
        kept = set(kept)
        while True:
            deg: dict[int, int] = defaultdict(int)
            for j in kept:
                a, b = self.ends[j]
                deg[cid[a]] += 1
                deg[cid[b]] += 1
            leaves = {v for v, d in deg.items() if d == 1 and v not in terms}
            drop = {j for j in kept if cid[self.ends[j][0]] in leaves or cid[self.ends[j][1]] in leaves}
            if not drop:
                return sorted(kept)
            kept -= drop

    def _bfs_order(self, fnodes, extra):
        inc: dict[int, list[int]] = defaultdict(list)
        for j in extra:
            a, b = self.ends[j]
            inc[a].append(j)
            inc[b].append(j)
        reached = set(fnodes)
        frontier = sorted(fnodes)
        order = []
        used = set()
        while frontier:
            nxt = []
            for u in frontier:
                for j in sorted(inc[u]):
                    if j in used:
                        continue
                    used.add(j)
                    order.append(j)
                    a, b = self.ends[j]
                    v = b if a == u else a
                    if v not in reached:
                        reached.add(v)
                        nxt.append(v)
            frontier = sorted(nxt)
        return tuple(order)


def _leaves_ok(mg: UncertainGraph, edges, q) -> bool:
    deg: dict[int, int] = defaultdict(int)
    for j in edges:
        e = mg.edges[j]
        deg[e.src] += 1
        deg[e.dst] += 1
    return all(v in q for v, d in deg.items() if d == 1)


def top_r_steiner_trees(multigraph: UncertainGraph, q, r: int, max_expansions: int | None = None) -> list[SteinerTree]:
    """Up to ``r`` distinct minimum-weight Steiner trees for ``q``, lightest first.

    Only trees whose leaves all belong to ``q`` are reported.  Equal weights
    (within 1e-12) are ordered by their sorted edge-id tuple.
    """
    q = sorted({multigraph.check_node(v) for v in q})
    if not (2 <= len(q) <= MAX_TERMINALS):
        if len(q) > MAX_TERMINALS:
            raise GuardExceeded(f"{len(q)} terminals exceed the limit of {MAX_TERMINALS}")
        raise ValueError("a Steiner query needs at least two distinct nodes")
    if r < 1:
        raise ValueError("r must be at least 1")
    for j, e in enumerate(multigraph.edges):
        if len(e.table) != 1:
            raise StructuralError(f"edge {j} carries {len(e.table)} catalysts; build the multigraph first")
    if max_expansions is None:
        max_expansions = 50 * r + 500

    solver = _Solver(multigraph, q)
    qset = set(q)
    heap = []
    counter = 0
    first = solver.solve((), frozenset())
    if first is not None:
        w, order, key = first
        heap.append((w, key, counter, (), frozenset(), order))
    found: list[tuple[float, tuple[int, ...]]] = []
    seen = set()
    cutoff = None
    pops = 0
    while heap and pops < max_expansions:
        w, key, _, forced, banned, order = heapq.heappop(heap)
        pops += 1
        if cutoff is not None and w > cutoff + TIE_EPS:
            break
        if key not in seen and _leaves_ok(multigraph, key, qset):
            seen.add(key)
            found.append((w, key))
            if len(found) == r and cutoff is None:
                cutoff = w
        for i, j in enumerate(order):
            child_forced = forced + order[:i]
            child_banned = banned | {j}
            sol = solver.solve(child_forced, child_banned)
            if sol is None:
                continue
            cw, corder, ckey = sol
            counter += 1
            heapq.heappush(heap, (cw, ckey, counter, child_forced, child_banned, corder))
    found.sort(key=lambda x: x[0])
    out = []
    group: list = []
    for w, key in found:
        if group and w - group[0][0] > TIE_EPS:
            out.extend(sorted(group, key=lambda x: x[1]))
            group = []
        group.append((w, key))
    out.extend(sorted(group, key=lambda x: x[1]))
    return [
        SteinerTree(tuple(_choice(multigraph, j) for j in key), w, key) for w, key in out[:r]
    ]
