"""Single source-target catalyst selection.

Two baselines (per-catalyst ranking and marginal-gain greedy) and the
path-based method: extract the top-r most reliable labeled paths, then add
whole paths greedily while the union of their catalysts fits the budget.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Sequence

from . import rng
from .errors import GuardExceeded
from .estimator import Estimate, SamplerConfig, evaluate_reliability, mc_reliability
from .graph import UncertainGraph, subgraph_from_choices
from .oracle import MAX_EXACT_EDGES, exact_reliability
from .paths import RelPath, build_multigraph, path_set_reliability, top_r_paths

# seed-derivation tags
_TAG_INDIVIDUAL = 1
_TAG_GREEDY = 2
_TAG_INCLUSION = 3
_TAG_ACHIEVED = 4


@dataclass
class SelectionResult:
    catalysts: frozenset[int]
    achieved: Estimate
    paths_used: list = field(default_factory=list)
    trace: list[tuple] = field(default_factory=list)
    unconnected: list[tuple[int, int]] = field(default_factory=list)

    @property
    def reliability(self) -> float:
        return self.achieved.value

    def labels(self, graph: UncertainGraph) -> list[str]:
        return [graph.catalyst_labels[c] for c in sorted(self.catalysts)]


@dataclass(frozen=True)
class CurvatureReport:
    max_feasible: int      # K_C
    min_maximal: int       # k_C
    curvature: float       # k_Rel
    bound: float


def _achieved(graph, s, t, cats, cfg) -> Estimate:
    return evaluate_reliability(graph, s, t, cats, cfg.with_seed(rng.derive(cfg.seed, _TAG_ACHIEVED)))


def individual_topk(graph: UncertainGraph, s: int, t: int, k: int,
                    cfg: SamplerConfig = SamplerConfig()) -> SelectionResult:
    """Rank catalysts by the reliability each one achieves alone."""
    if k < 0:
        raise ValueError("k must be non-negative")
    # one shared seed: catalyst estimates are coupled, ties are exact
    sub = cfg.with_seed(rng.derive(cfg.seed, _TAG_INDIVIDUAL))
    scores = []
    for c in range(graph.n_catalysts):
        est = mc_reliability(graph, s, t, {c}, sub)
        scores.append((est.value, c))
    ranked = sorted(scores, key=lambda x: (-x[0], x[1]))
    chosen = frozenset(c for _, c in ranked[:k])
    return SelectionResult(chosen, _achieved(graph, s, t, chosen, cfg), trace=[(c, v) for v, c in ranked])


def greedy_topk(graph: UncertainGraph, s: int, t: int, k: int,
                cfg: SamplerConfig = SamplerConfig(), first_pick: int | None = None) -> SelectionResult:
    """Add, k times, the catalyst with the largest estimated marginal gain.

    All candidates of one round share a seed, so gains are never negative and
    a round where nothing helps is an exact tie, settled by the lowest id.
    ``first_pick`` forces the opening choice.
    """
    if k < 0:
        raise ValueError("k must be non-negative")
    chosen: list[int] = []
    trace = []
    for it in range(min(k, graph.n_catalysts)):
        remaining = [c for c in range(graph.n_catalysts) if c not in chosen]
        if it == 0 and first_pick is not None:
            chosen.append(first_pick)
            trace.append((first_pick, None))
            continue
        sub = cfg.with_seed(rng.derive(cfg.seed, _TAG_GREEDY, it))
        base = mc_reliability(graph, s, t, chosen, sub).value if chosen else (1.0 if s == t else 0.0)
        best, best_gain = None, -1.0
        for c in remaining:
            gain = mc_reliability(graph, s, t, [*chosen, c], sub).value - base
            if gain > best_gain:
                best, best_gain = c, gain
        chosen.append(best)
        trace.append((best, best_gain))
    cats = frozenset(chosen)
    return SelectionResult(cats, _achieved(graph, s, t, cats, cfg), trace=trace)


def _catalysts_of(paths) -> frozenset[int]:
    out: set[int] = set()
    for p in paths:
        out |= p.catalysts
    return frozenset(out)


def greedy_inclusion(items: Sequence, k: int, score, seed: int) -> tuple[list, frozenset[int]]:
    """Add items one at a time while their catalyst union stays within ``k``.

    ``score(selected, seed)`` rates a candidate selection; each round keeps the
    best-scoring feasible item, earlier items winning ties.  All candidates of a
    round are scored under the same seed.
    """
    selected: list = []
    cats: frozenset[int] = frozenset()
    pool = list(items)
    it = 0
    while pool:
        round_seed = rng.derive(seed, it)
        best, best_val = None, -1.0
        for i, p in enumerate(pool):
            if len(cats | p.catalysts) > k:
                continue
            val = score([*selected, p], round_seed)
            if val > best_val:
                best, best_val = i, val
        if best is None:
            break
        p = pool.pop(best)
        selected.append(p)
        cats |= p.catalysts
        it += 1
    return selected, cats


def iterative_path_inclusion(paths: Sequence[RelPath], k: int,
                             cfg: SamplerConfig = SamplerConfig()) -> tuple[list[RelPath], frozenset[int]]:
    """Greedy path inclusion under a catalyst budget.

    Each round adds the path that maximises the reliability of the subgraph
    induced by the chosen paths, among paths keeping the catalyst union within
    ``k``.  Ties go to the earlier (more reliable) path.
    """
    if not paths:
        return [], frozenset()
    s, t = paths[0].source, paths[0].target
    if any(p.source != s or p.target != t for p in paths):
        raise ValueError("all paths must share the same endpoints")

    def score(sel, seed):
        return path_set_reliability(sel, s, t, cfg.with_seed(seed))

    return greedy_inclusion(paths, k, score, rng.derive(cfg.seed, _TAG_INCLUSION))


def fill_by_frequency(cats: frozenset[int], k: int, leftovers: Sequence) -> frozenset[int]:
    """Top up ``cats`` to ``k`` with the catalysts most frequent on ``leftovers``."""
    if len(cats) >= k:
        return cats
    freq: Counter[int] = Counter()
    for p in leftovers:
        for ch in p.choices:
            if ch.catalyst not in cats:
                freq[ch.catalyst] += 1
    extra = sorted(freq, key=lambda c: (-freq[c], c))[: k - len(cats)]
    return cats | frozenset(extra)


def rel_path(graph: UncertainGraph, s: int, t: int, k: int, r: int,
             cfg: SamplerConfig = SamplerConfig()) -> SelectionResult:
    """Top-r paths, greedy path inclusion, frequency fill, final evaluation on ``graph``."""
    if k < 0 or r < 1:
        raise ValueError("need k >= 0 and r >= 1")
    mg = build_multigraph(graph)
    paths = top_r_paths(mg, s, t, r)
    if not paths:
        return SelectionResult(frozenset(), _achieved(graph, s, t, (), cfg))
    selected, cats = iterative_path_inclusion(paths, k, cfg)
    chosen_keys = {p.key for p in selected}
    leftovers = [p for p in paths if p.key not in chosen_keys]
    final = fill_by_frequency(cats, k, leftovers)
    trace = [(p.nodes, tuple(sorted(p.catalysts))) for p in selected]
    return SelectionResult(final, _achieved(graph, s, t, final, cfg), paths_used=selected, trace=trace)


def exact_path_set_reliability(paths: Sequence[RelPath], s: int, t: int) -> float:
    """Exact reliability of the subgraph induced by ``paths`` (oracle guard applies)."""
    if s == t:
        return 1.0
    if not paths:
        return 0.0
    sub = subgraph_from_choices([ch for p in paths for ch in p.choices], (s, t))
    return exact_reliability(sub, sub.local_id(s), sub.local_id(t), _catalysts_of(paths), MAX_EXACT_EDGES).value


def check_node_disjoint(paths: Sequence[RelPath]) -> None:
    owner: dict[int, int] = {}
    for i, p in enumerate(paths):
        for v in p.nodes[1:-1]:
            if v in owner and owner[v] != i:
                raise ValueError(f"paths {owner[v]} and {i} share internal node {v}")
            owner[v] = i


def curvature_report(paths: Sequence[RelPath], k: int, max_paths: int = 20) -> CurvatureReport:
    """Feasible-set sizes, curvature and the resulting greedy guarantee.

    Requires paths that meet only at their endpoints.  All reliabilities are
    exact, so the path union must stay within the oracle's edge guard.
    """
    paths = list(paths)
    if len(paths) > max_paths:
        raise GuardExceeded(f"{len(paths)} paths exceed the limit of {max_paths}")
    check_node_disjoint(paths)
    if not paths:
        return CurvatureReport(0, 0, 0.0, 0.0)
    s, t = paths[0].source, paths[0].target
    n = len(paths)
    cats = [p.catalysts for p in paths]
    feasible = []
    for mask in range(1 << n):
        union: set[int] = set()
        for i in range(n):
            if mask >> i & 1:
                union |= cats[i]
        if len(union) <= k:
            feasible.append((mask, frozenset(union)))
    max_feasible = max(bin(m).count("1") for m, _ in feasible)
    maximal_sizes = []
    for mask, union in feasible:
        if all(mask >> i & 1 or len(union | cats[i]) > k for i in range(n)):
            maximal_sizes.append(bin(mask).count("1"))
    min_maximal = min(maximal_sizes)

    whole = exact_path_set_reliability(paths, s, t)
    ratios = []
    for i, p in enumerate(paths):
        alone = exact_path_set_reliability([p], s, t)
        without = exact_path_set_reliability(paths[:i] + paths[i + 1:], s, t)
        ratios.append((whole - without) / alone)
    curvature = 1.0 - min(ratios)

    if max_feasible == 0:
        bound = 0.0
    elif curvature <= 1e-12:
        bound = min_maximal / max_feasible
    else:
        bound = (1.0 - ((max_feasible - curvature) / max_feasible) ** min_maximal) / curvature
    return CurvatureReport(max_feasible, min_maximal, curvature, min(1.0, max(0.0, bound)))

