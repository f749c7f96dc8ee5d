"""Catalyst selection for several source-target pairs and for peer connectivity."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from . import rng
from .estimator import Estimate, SamplerConfig, evaluate_connectivity, evaluate_reliability
from .graph import UncertainGraph, subgraph_from_choices
from .paths import RelPath, build_multigraph, top_r_paths
from .selection import SelectionResult, fill_by_frequency, greedy_inclusion, rel_path
from .steiner import top_r_steiner_trees

AGGREGATES = ("max", "avg", "min")

_TAG_AVG = 11
_TAG_MIN = 12
_TAG_CONN = 13
_TAG_FINAL = 14


@dataclass(frozen=True)
class AggregateQuery:
    sources: tuple[int, ...]
    targets: tuple[int, ...]
    k: int
    r: int
    aggregate: str = "avg"

    def __post_init__(self):
        if not self.sources or not self.targets:
            raise ValueError("sources and targets must be non-empty")
        if self.aggregate not in AGGREGATES:
            raise ValueError(f"aggregate must be one of {AGGREGATES}")
        if self.k < 0 or self.r < 1:
            raise ValueError("need k >= 0 and r >= 1")
        object.__setattr__(self, "sources", tuple(sorted(set(self.sources))))
        object.__setattr__(self, "targets", tuple(sorted(set(self.targets))))

    @property
    def pairs(self) -> list[tuple[int, int]]:
        return [(s, t) for s in self.sources for t in self.targets]


@dataclass(frozen=True)
class ConnectivityQuery:
    peers: tuple[int, ...]
    k: int
    r: int

    def __post_init__(self):
        object.__setattr__(self, "peers", tuple(sorted(set(self.peers))))
        if len(self.peers) < 2:
            raise ValueError("a connectivity query needs at least two peers")
        if self.k < 0 or self.r < 1:
            raise ValueError("need k >= 0 and r >= 1")


@dataclass(frozen=True)
class AggregateValue:
    """Aggregate of per-pair reliabilities, with the per-pair estimates kept."""

    value: float
    aggregate: str
    per_pair: tuple[tuple[tuple[int, int], Estimate], ...]


@dataclass
class CoverResult:
    catalysts: frozenset[int]
    order: list[int]                      # every catalyst added, in order (removed ones included)
    removed: list[int] = field(default_factory=list)
    unconnectable: list[int] = field(default_factory=list)  # pair indices without any path

    @property
    def feasible(self) -> bool:
        return not self.unconnectable


def _combine(values: Sequence[float], aggregate: str) -> float:
    if not values:
        return 0.0
    if aggregate == "max":
        return max(values)
    if aggregate == "min":
        return min(values)
    return sum(values) / len(values)


def aggregate_reliability(graph: UncertainGraph, pairs, cats, aggregate: str,
                          cfg: SamplerConfig) -> AggregateValue:
    """Per-pair reliability under ``cats`` on the full graph, combined by ``aggregate``."""
    per = []
    for i, (s, t) in enumerate(pairs):
        est = evaluate_reliability(graph, s, t, cats, cfg.with_seed(rng.derive(cfg.seed, _TAG_FINAL, i)))
        per.append(((s, t), est))
    return AggregateValue(_combine([e.value for _, e in per], aggregate), aggregate, tuple(per))


def _pair_values(paths: Sequence[RelPath], pairs, seed: int, cfg: SamplerConfig) -> list[float]:
    """Reliability of every pair on the one subgraph induced by ``paths``."""
    if not paths:
        return [1.0 if s == t else 0.0 for s, t in pairs]
    ends = {v for st in pairs for v in st}
    sub = subgraph_from_choices([ch for p in paths for ch in p.choices], ends)
    cats = frozenset(ch.catalyst for p in paths for ch in p.choices)
    out = []
    for i, (s, t) in enumerate(pairs):
        if s == t:
            out.append(1.0)
            continue
        est = evaluate_reliability(sub, sub.local_id(s), sub.local_id(t), cats,
                                   cfg.with_seed(rng.derive(seed, i)))
        out.append(est.value)
    return out


def _pair_paths(graph: UncertainGraph, pairs, r: int) -> list[list[RelPath]]:
    mg = build_multigraph(graph)
    return [top_r_paths(mg, s, t, r) for s, t in pairs]


def _result(graph, pairs, cats, aggregate, cfg, **kw) -> SelectionResult:
    return SelectionResult(cats, aggregate_reliability(graph, pairs, cats, aggregate, cfg), **kw)


def topk_max(graph: UncertainGraph, query: AggregateQuery, cfg: SamplerConfig = SamplerConfig()) -> SelectionResult:
    """Best single pair: run the path method per pair and keep the winner's catalysts.

    Nodes that are both a source and a target are dropped first.
    """
    overlap = set(query.sources) & set(query.targets)
    sources = [s for s in query.sources if s not in overlap]
    targets = [t for t in query.targets if t not in overlap]
    if not sources or not targets:
        raise ValueError("removing nodes shared by sources and targets leaves no pair")
    pairs = [(s, t) for s in sources for t in targets]
    best = None
    trace = []
    for i, (s, t) in enumerate(pairs):
        res = rel_path(graph, s, t, query.k, query.r, cfg)
        trace.append(((s, t), res.reliability, tuple(sorted(res.catalysts))))
        if best is None or res.reliability > best[0].reliability:
            best = (res, i)
    res = best[0]
    unconnected = [] if res.paths_used else pairs
    return _result(graph, pairs, res.catalysts, "max", cfg, paths_used=res.paths_used, trace=trace,
                   unconnected=unconnected)


def topk_avg(graph: UncertainGraph, query: AggregateQuery, cfg: SamplerConfig = SamplerConfig()) -> SelectionResult:
    """Greedy inclusion over the pooled top-r paths of all pairs, maximising the mean reliability."""
    pairs = query.pairs
    per_pair = _pair_paths(graph, pairs, query.r)
    pool = [p for ps in per_pair for p in ps if p.choices]

    def score(sel, seed):
        return _combine(_pair_values(sel, pairs, seed, cfg), "avg")

    selected, cats = greedy_inclusion(pool, query.k, score, rng.derive(cfg.seed, _TAG_AVG))
    keys = {p.key for p in selected}
    final = fill_by_frequency(cats, query.k, [p for p in pool if p.key not in keys])
    unconnected = [pairs[i] for i, ps in enumerate(per_pair) if not ps]
    trace = [(p.nodes, tuple(sorted(p.catalysts))) for p in selected]
    return _result(graph, pairs, final, "avg", cfg, paths_used=selected, trace=trace, unconnected=unconnected)


def _covers(path_lists, cats) -> list[bool]:
    return [any(p.catalysts <= cats for p in ps) for ps in path_lists]


def min_catalyst_set(paths_by_pair: Sequence[Sequence[RelPath]], k: int) -> CoverResult:
    """Small catalyst set giving every connectable pair at least one usable path.

    Greedy cover: repeatedly take the (pair, path) adding the fewest new
    catalysts, preferring more reliable paths and then lower pair indices.
    If the cover exceeds ``k``, each chosen catalyst is tried for removal once,
    latest first, and dropped when every pair stays covered.  The result may
    still exceed ``k``.
    """
    unconnectable = [i for i, ps in enumerate(paths_by_pair) if not ps]
    todo = {i for i, ps in enumerate(paths_by_pair) if ps}
    chosen: set[int] = set()
    order: list[int] = []
    while todo:
        best = None
        for i in sorted(todo):
            for j, p in enumerate(paths_by_pair[i]):
                cand = (len(p.catalysts - chosen), -p.reliability, i, j)
                if best is None or cand < best:
                    best = cand
        _, _, i, j = best
        for c in sorted(paths_by_pair[i][j].catalysts - chosen):
            chosen.add(c)
            order.append(c)
        todo.discard(i)
    removed = []
    if len(chosen) > k:
        connectable = [ps for ps in paths_by_pair if ps]
        for c in reversed(order):
            trial = frozenset(chosen - {c})
            if all(_covers(connectable, trial)):
                chosen = set(trial)
                removed.append(c)
    return CoverResult(frozenset(chosen), order, removed, unconnectable)


def _trim(cover: CoverResult, paths_by_pair, k: int) -> frozenset[int]:
    """Drop catalysts until ``k`` remain, each time the one whose loss uncovers the fewest pairs."""
    cats = set(cover.catalysts)
    order = [c for c in cover.order if c in cats]
    while len(cats) > k:
        def lost(c):
            return _covers(paths_by_pair, frozenset(cats - {c})).count(False)
        # latest-added first among equals
        victim = min(reversed(order), key=lost)
        cats.discard(victim)
        order.remove(victim)
    return frozenset(cats)


def topk_min(graph: UncertainGraph, query: AggregateQuery, cfg: SamplerConfig = SamplerConfig()) -> SelectionResult:
    """Cover every pair first, then keep feeding paths to the weakest pair.

    A single pair is exactly the single-pair path method.
    """
    pairs = query.pairs
    if len(pairs) == 1:
        s, t = pairs[0]
        res = rel_path(graph, s, t, query.k, query.r, cfg)
        return _result(graph, pairs, res.catalysts, "min", cfg, paths_used=res.paths_used,
                       trace=res.trace, unconnected=[] if res.paths_used else pairs)
    per_pair = _pair_paths(graph, pairs, query.r)
    cover = min_catalyst_set(per_pair, query.k)
    cats = cover.catalysts if len(cover.catalysts) <= query.k else _trim(cover, per_pair, query.k)

    selected: list[RelPath] = []
    owner: list[int] = []
    for i, ps in enumerate(per_pair):
        for p in ps:
            if p.choices and p.catalysts <= cats:
                selected.append(p)
                owner.append(i)
    trace: list[tuple] = [("cover", tuple(cover.order), tuple(cover.removed))]
    base_seed = rng.derive(cfg.seed, _TAG_MIN)
    it = 0
    while True:
        seed = rng.derive(base_seed, it)
        values = _pair_values(selected, pairs, seed, cfg)
        picked = None
        for i in sorted(range(len(pairs)), key=lambda i: (values[i], i)):
            keys = {p.key for p in selected}
            cands = [p for p in per_pair[i] if p.choices and p.key not in keys
                     and len(cats | p.catalysts) <= query.k]
            if not cands:
                continue
            s, t = pairs[i]
            best, best_val = None, -1.0
            for p in cands:
                val = _pair_values([*selected, p], [(s, t)], seed, cfg)[0]
                if val > best_val:
                    best, best_val = p, val
            picked = (i, best, best_val - values[i])
            break
        if picked is None:
            break
        i, p, gain = picked
        selected.append(p)
        owner.append(i)
        cats |= p.catalysts
        trace.append((pairs[i], p.nodes, tuple(sorted(p.catalysts)), gain))
        it += 1

    keys = {p.key for p in selected}
    leftovers = [p for ps in per_pair for p in ps if p.key not in keys]
    final = fill_by_frequency(cats, query.k, leftovers)
    covered = _covers(per_pair, final)
    unconnected = [pairs[i] for i in range(len(pairs)) if not covered[i] and pairs[i][0] != pairs[i][1]]
    return _result(graph, pairs, final, "min", cfg, paths_used=selected, trace=trace, unconnected=unconnected)


def run_aggregate(graph: UncertainGraph, query: AggregateQuery, cfg: SamplerConfig = SamplerConfig()) -> SelectionResult:
    fn = {"max": topk_max, "avg": topk_avg, "min": topk_min}[query.aggregate]
    return fn(graph, query, cfg)


def connectivity_topk(graph: UncertainGraph, query: ConnectivityQuery,
                      cfg: SamplerConfig = SamplerConfig()) -> SelectionResult:
    """Greedy inclusion of the top-r Steiner trees, maximising the probability that all peers connect."""
    q = [graph.check_node(v) for v in query.peers]
    trees = top_r_steiner_trees(build_multigraph(graph), q, query.r)

    def final_estimate(cats) -> Estimate:
        return evaluate_connectivity(graph, q, cats, cfg.with_seed(rng.derive(cfg.seed, _TAG_FINAL)))

    if not trees:
        return SelectionResult(frozenset(), final_estimate(frozenset()))

    def score(sel, seed):
        sub = subgraph_from_choices([ch for tr in sel for ch in tr.choices], q)
        cats = frozenset(ch.catalyst for tr in sel for ch in tr.choices)
        local = [sub.local_id(v) for v in q]
        return evaluate_connectivity(sub, local, cats, cfg.with_seed(seed)).value

    selected, cats = greedy_inclusion(trees, query.k, score, rng.derive(cfg.seed, _TAG_CONN))
    chosen = {tr.edge_ids for tr in selected}
    final = fill_by_frequency(cats, query.k, [tr for tr in trees if tr.edge_ids not in chosen])
    trace = [(tr.edge_ids, tuple(sorted(tr.catalysts))) for tr in selected]
    return SelectionResult(final, final_estimate(final), paths_used=selected, trace=trace)
