"""Monte Carlo reliability with lazily instantiated edges.

Each trial is a breadth-first search from the source set.  An edge's coin is
only flipped when the search asks for it, and the trial stops as soon as the
goal is reached.  The coin of edge ``e`` in trial ``i`` is the counter-based
uniform ``uniform(derive(seed, i), e)``: revisits within a trial always see
the same outcome, trials are independent of execution order, and two
estimates that share a seed are coupled edge by edge (so adding catalysts can
never lower an estimate).
"""

from __future__ import annotations

import math
from collections import deque
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from . import rng
from .graph import UncertainGraph
from .oracle import ExactResult, exact_connectivity, exact_multi_reliability


@dataclass(frozen=True)
class SamplerConfig:
    samples: int = 1000
    seed: int = 0
    workers: int = 1
    # Inner evaluations switch to the exact oracle at or below this many
    # positive-probability edges.
    exact_edge_limit: int = 20

    def __post_init__(self):
        if self.samples < 1:
            raise ValueError("samples must be at least 1")
        if self.workers < 1:
            raise ValueError("workers must be at least 1")

    def with_seed(self, seed: int) -> "SamplerConfig":
        return SamplerConfig(self.samples, seed & rng.MASK64, self.workers, self.exact_edge_limit)


@dataclass(frozen=True)
class ReliabilityEstimate:
    value: float
    samples: int
    seed: int
    successes: int

    def hoeffding_halfwidth(self, delta: float = 0.01) -> float:
        return math.sqrt(math.log(2.0 / delta) / (2.0 * self.samples))


def required_samples(epsilon: float, delta: float) -> int:
    """Trials needed for a Hoeffding (epsilon, delta) guarantee."""
    if not (0.0 < epsilon < 1.0 and 0.0 < delta < 1.0):
        raise ValueError("epsilon and delta must lie in (0, 1)")
    return math.ceil(math.log(2.0 / delta) / (2.0 * epsilon * epsilon))


def _arcs(graph: UncertainGraph, cats, undirected: bool):
    probs = graph.edge_probabilities(cats)
    adj: list[list[tuple[int, int, float]]] = [[] for _ in range(graph.n_nodes)]
    for i, e in enumerate(graph.edges):
        p = probs[i]
        if p <= 0.0 or e.src == e.dst:
            continue
        adj[e.src].append((e.dst, i, p))
        if undirected:
            adj[e.dst].append((e.src, i, p))
    return adj


def _run_trials(adj, starts, goal, seed: int, lo: int, hi: int, undirected: bool) -> int:
    """Count successful trials ``lo <= i < hi``.

    ``goal`` is a frozenset of nodes that must all be reached.
    """
    uniform = rng.uniform
    derive = rng.derive
    n_goal = len(goal)
    successes = 0
    for trial in range(lo, hi):
        key = derive(seed, trial)
        seen = set(starts)
        hit = len(goal & seen)
        if hit == n_goal:
            successes += 1
            continue
        coins: dict[int, bool] = {}
        queue = deque(starts)
        done = False
        while queue and not done:
            u = queue.popleft()
            for v, e, p in adj[u]:
                if v in seen:
                    continue
                if undirected:
                    ok = coins.get(e)
                    if ok is None:
                        ok = coins[e] = uniform(key, e) < p
                else:
                    # each directed edge is examined at most once per trial
                    ok = uniform(key, e) < p
                if not ok:
                    continue
                seen.add(v)
                if v in goal:
                    hit += 1
                    if hit == n_goal:
                        done = True
                        break
                queue.append(v)
        if done:
            successes += 1
    return successes


def _count(adj, starts, goal, cfg: SamplerConfig, undirected: bool) -> int:
    k = cfg.samples
    if cfg.workers == 1 or k < 2 * cfg.workers:
        return _run_trials(adj, starts, goal, cfg.seed, 0, k, undirected)
    bounds = [k * w // cfg.workers for w in range(cfg.workers + 1)]
    with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
        futs = [
            pool.submit(_run_trials, adj, starts, goal, cfg.seed, bounds[w], bounds[w + 1], undirected)
            for w in range(cfg.workers)
        ]
        return sum(f.result() for f in futs)


def mc_reliability(
    graph: UncertainGraph, sources, t: int, cats, cfg: SamplerConfig = SamplerConfig()
) -> ReliabilityEstimate:
    """Fraction of sampled worlds in which ``t`` is reachable from some source."""
    if isinstance(sources, int):
        sources = (sources,)
    starts = tuple(sorted({graph.check_node(v) for v in sources}))
    graph.check_node(t)
    cats = graph.check_catalysts(cats)
    if t in starts:
        return ReliabilityEstimate(1.0, cfg.samples, cfg.seed, cfg.samples)
    adj = _arcs(graph, cats, undirected=False)
    hits = _count(adj, starts, frozenset((t,)), cfg, undirected=False)
    return ReliabilityEstimate(hits / cfg.samples, cfg.samples, cfg.seed, hits)


def mc_connectivity(
    graph: UncertainGraph, q, cats, cfg: SamplerConfig = SamplerConfig()
) -> ReliabilityEstimate:
    """Fraction of sampled worlds in which all of ``q`` are weakly connected."""
    q = sorted({graph.check_node(v) for v in q})
    if len(q) < 2:
        raise ValueError("connectivity needs at least two query nodes")
    cats = graph.check_catalysts(cats)
    adj = _arcs(graph, cats, undirected=True)
    hits = _count(adj, (q[0],), frozenset(q), cfg, undirected=True)
    return ReliabilityEstimate(hits / cfg.samples, cfg.samples, cfg.seed, hits)


def naive_mc_reliability(graph: UncertainGraph, s: int, t: int, cats, cfg: SamplerConfig) -> float:
    """Reference sampler: flip every edge up front, then search.  Testing aid."""
    probs = graph.edge_probabilities(cats)
    hits = 0
    for trial in range(cfg.samples):
        key = rng.derive(cfg.seed, trial, 0x5EED)
        present = [rng.uniform(key, i) < p for i, p in enumerate(probs)]
        seen = {s}
        stack = [s]
        while stack:
            u = stack.pop()
            for e in graph.out_edges[u]:
                if present[e] and graph.edges[e].dst not in seen:
                    seen.add(graph.edges[e].dst)
                    stack.append(graph.edges[e].dst)
        hits += t in seen
    return hits / cfg.samples


Estimate = ExactResult | ReliabilityEstimate


def evaluate_reliability(graph: UncertainGraph, sources, t: int, cats, cfg: SamplerConfig) -> Estimate:
    """Exact value when the positive edge count is within ``cfg.exact_edge_limit``, else MC."""
    if isinstance(sources, int):
        sources = (sources,)
    cats = frozenset(cats)
    if len(graph.positive_edges(cats)) <= cfg.exact_edge_limit:
        return exact_multi_reliability(graph, sources, t, cats, limit=cfg.exact_edge_limit)
    return mc_reliability(graph, sources, t, cats, cfg)


def evaluate_connectivity(graph: UncertainGraph, q, cats, cfg: SamplerConfig) -> Estimate:
    cats = frozenset(cats)
    if len(graph.positive_edges(cats)) <= cfg.exact_edge_limit:
        return exact_connectivity(graph, q, cats, limit=cfg.exact_edge_limit)
    return mc_connectivity(graph, q, cats, cfg)
