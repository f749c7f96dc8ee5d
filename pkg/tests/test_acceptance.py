"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py`` (lines appear in the terminal
summary) or ``python tests/test_acceptance.py``.
"""

import os
import random
import re
import subprocess
import sys
import time

import pytest

from condrel.estimator import SamplerConfig, mc_reliability, required_samples
from condrel.fixtures import (
    cover_graph,
    detour_graph,
    diamond_graph,
    disjoint_paths_graph,
    planted_graph,
    random_graph,
)
from condrel.graph import UncertainGraph
from condrel.io import save_graph
from condrel.multi import min_catalyst_set
from condrel.oracle import exact_reliability, exhaustive_topk
from condrel.paths import build_multigraph, top_r_paths
from condrel.selection import (
    curvature_report,
    exact_path_set_reliability,
    greedy_topk,
    individual_topk,
    iterative_path_inclusion,
    rel_path,
)

RESULTS: list[str] = []


def record(n: int, ok: bool, detail: str) -> None:
    line = f"{'PASS' if ok else 'FAIL'} criterion {n:2d}: {detail}"
    RESULTS.append(line)
    print(line)
    assert ok, line


def exact(g, s, t, cats):
    return exact_reliability(g, s, t, cats).value


def test_criterion_01_diamond_goldens():
    start = time.perf_counter()
    g = diamond_graph()
    cases = [(("c2",), 0.0), (("c2", "c3"), 0.0), (("c1", "c2"), 0.3), (("c1", "c2", "c3"), 0.475)]
    got = [exact(g, 0, 3, g.catalyst_set(*labels)) for labels, _ in cases]
    elapsed = time.perf_counter() - start
    ok = all(abs(v - want) <= 1e-12 for v, (_, want) in zip(got, cases)) and elapsed < 1.0
    record(1, ok, f"reliabilities {[round(v, 12) for v in got]} in {elapsed:.3f}s")


def test_criterion_02_detour_goldens():
    start = time.perf_counter()
    g = detour_graph()
    best, value = exhaustive_topk(g, 0, 4, 3)
    res = greedy_topk(g, 0, 4, 3, SamplerConfig(samples=1000, seed=0), first_pick=g.catalyst("c4"))
    greedy_value = exact(g, 0, 4, res.catalysts)
    elapsed = time.perf_counter() - start
    ok = abs(value - 0.7184) <= 1e-4 and abs(greedy_value - 0.544) <= 1e-4 and elapsed < 5.0
    record(2, ok, f"optimum {value:.4f} {sorted(g.catalyst_labels[c] for c in best)}, "
                  f"forced greedy {greedy_value:.4f}, {elapsed:.2f}s")


def test_criterion_03_path_inclusion_picks_overlapping_pair():
    g = detour_graph()
    paths = top_r_paths(build_multigraph(g), 0, 4, 3)
    by_nodes = {"".join(g.node_labels[v] for v in p.nodes): p for p in paths}
    p1, p2, p3 = by_nodes["sxt"], by_nodes["sat"], by_nodes["sabt"]
    selected, _ = iterative_path_inclusion([p1, p2, p3], 3, SamplerConfig())
    ok = {p.key for p in selected} == {p2.key, p3.key} and len(selected) == 2
    names = ["".join(g.node_labels[v] for v in p.nodes) for p in selected]
    record(3, ok, f"selected paths {names}")


def test_criterion_04_cover_drops_redundant_catalyst():
    g = cover_graph()
    s = [g.node("s1"), g.node("s2")]
    t = [g.node("t1"), g.node("t2")]
    mg = build_multigraph(g)
    res = min_catalyst_set([top_r_paths(mg, a, b, 2) for a in s for b in t], 3)
    values = [exact(g, a, b, res.catalysts) for a in s for b in t]
    ok = res.catalysts == g.catalyst_set("c1", "c2", "c3") and all(v > 0 for v in values)
    record(4, ok, f"cover {sorted(g.catalyst_labels[c] for c in res.catalysts)}, "
                  f"pair reliabilities {[round(v, 4) for v in values]}")


def test_criterion_05_mc_against_oracle():
    start = time.perf_counter()
    k = required_samples(0.05, 0.01)
    rnd = random.Random(5)
    hits = 0
    for i in range(200):
        n = rnd.randint(3, 8)
        nc = rnd.randint(1, 5)
        g = random_graph(rnd.getrandbits(32), n_nodes=n, edge_prob=0.35, n_catalysts=nc, max_edges=12)
        s, t = rnd.sample(range(n), 2)
        cats = {c for c in range(nc) if rnd.random() < 0.6}
        assert len(g.positive_edges(cats)) <= 12
        est = mc_reliability(g, s, t, cats, SamplerConfig(samples=k, seed=i))
        hits += abs(est.value - exact(g, s, t, cats)) <= 0.05
    elapsed = time.perf_counter() - start
    record(5, hits >= 196 and elapsed < 60, f"{hits}/200 within 0.05 using K={k}, {elapsed:.1f}s")


def test_criterion_06_multigraph_equivalence():
    rnd = random.Random(6)
    worst = 0.0
    for _ in range(100):
        g = random_graph(rnd.getrandbits(32), n_nodes=6, edge_prob=0.3, n_catalysts=4, max_edges=8)
        s, t = rnd.sample(range(6), 2)
        cats = {c for c in range(4) if rnd.random() < 0.6}
        worst = max(worst, abs(exact(g, s, t, cats) - exact(build_multigraph(g), s, t, cats)))
    record(6, worst <= 1e-12, f"max difference {worst:.2e} over 100 instances")


def _triples(rnd, paths, count):
    idx = list(range(len(paths)))
    for _ in range(count):
        extra = rnd.choice(idx)
        rest = [i for i in idx if i != extra]
        big = {i for i in rest if rnd.random() < 0.5}
        small = {i for i in big if rnd.random() < 0.5}
        yield small, big, extra


def _union(paths, ids):
    out = set()
    for i in ids:
        out |= paths[i].catalysts
    return out


def test_criterion_07_catalyst_count_submodular():
    rnd = random.Random(7)
    checked = violations = 0
    while checked < 500:
        g = random_graph(rnd.getrandbits(32), n_nodes=7, edge_prob=0.35, n_catalysts=6)
        paths = top_r_paths(build_multigraph(g), 0, 6, 10)
        if len(paths) < 2:
            continue
        for small, big, p in _triples(rnd, paths, 10):
            gain1 = len(_union(paths, small | {p})) - len(_union(paths, small))
            gain2 = len(_union(paths, big | {p})) - len(_union(paths, big))
            violations += gain1 < gain2
            checked += 1
    record(7, violations == 0, f"{violations} violations in {checked} triples")


def test_criterion_08_reliability_submodular_on_disjoint_paths():
    rnd = random.Random(8)
    checked = violations = 0
    while checked < 200:
        g = disjoint_paths_graph(rnd.getrandbits(32), n_paths=rnd.randint(2, 5), max_len=3)
        paths = top_r_paths(build_multigraph(g), 0, 1, 10)
        rel = lambda ids: exact_path_set_reliability([paths[i] for i in sorted(ids)], 0, 1)
        for small, big, p in _triples(rnd, paths, 5):
            gain1 = rel(small | {p}) - rel(small)
            gain2 = rel(big | {p}) - rel(big)
            violations += gain1 < gain2 - 1e-9
            checked += 1

    # paths that share node z: adding B is worth more once A is present
    s, x, y, z, w, t = range(6)
    h = UncertainGraph.build([
        (s, x, {0: 1.0}), (x, z, {0: 1.0}), (z, t, {0: 0.1}),
        (s, y, {0: 0.5}), (y, z, {0: 0.2}), (z, w, {0: 1.0}), (w, t, {0: 1.0}),
    ])
    hp = top_r_paths(build_multigraph(h), s, t, 5)
    a = next(p for p in hp if p.nodes == (s, x, z, t))
    b = next(p for p in hp if p.nodes == (s, y, z, w, t))
    gain_alone = exact_path_set_reliability([b], s, t)
    gain_with_a = exact_path_set_reliability([a, b], s, t) - exact_path_set_reliability([a], s, t)
    counter = gain_with_a > gain_alone + 1e-9
    record(8, violations == 0 and counter,
           f"{violations} violations in {checked} disjoint triples; shared-node instance gains "
           f"{gain_alone:.3f} alone vs {gain_with_a:.3f} after the other path")


def test_criterion_09_approximation_bounds():
    rnd = random.Random(9)
    below_r = below_bound = bound_cases = 0
    for i in range(100):
        n_paths = rnd.randint(2, 5)
        g = disjoint_paths_graph(rnd.getrandbits(32), n_paths=n_paths, max_len=3, n_catalysts=6)
        k = rnd.randint(1, 5)
        paths = top_r_paths(build_multigraph(g), 0, 1, n_paths)
        r = len(paths)
        _, opt = exhaustive_topk(g, 0, 1, k)
        got = exact(g, 0, 1, rel_path(g, 0, 1, k, r, SamplerConfig(seed=i)).catalysts)
        below_r += got < opt / r - 1e-12
        if any(len(p.catalysts) <= k for p in paths):
            rep = curvature_report(paths, k)
            bound_cases += 1
            below_bound += got < rep.bound * opt - 1e-12
    record(9, below_r == 0 and below_bound == 0,
           f"{below_r}/100 below opt/r; {below_bound}/{bound_cases} below curvature bound x opt")


def test_criterion_10_monotonicity():
    rnd = random.Random(10)
    violations = 0
    for _ in range(500):
        n = rnd.randint(3, 8)
        nc = rnd.randint(1, 5)
        g = random_graph(rnd.getrandbits(32), n_nodes=n, edge_prob=0.3, n_catalysts=nc, max_edges=12)
        s, t = rnd.sample(range(n), 2)
        big = {c for c in range(nc) if rnd.random() < 0.7}
        small = {c for c in big if rnd.random() < 0.5}
        violations += exact(g, s, t, small) > exact(g, s, t, big) + 1e-12
    record(10, violations == 0, f"{violations} violations in 500 cases")


def test_criterion_11_baseline_ordering():
    sums = {"rel-path": 0.0, "greedy": 0.0, "ind-k": 0.0}
    inv_rg = inv_gi = 0
    for i in range(50):
        g = planted_graph(i)
        cfg = SamplerConfig(samples=1000, seed=i)
        a = exact(g, 0, 1, rel_path(g, 0, 1, 3, 5, cfg).catalysts)
        b = exact(g, 0, 1, greedy_topk(g, 0, 1, 3, cfg).catalysts)
        c = exact(g, 0, 1, individual_topk(g, 0, 1, 3, cfg).catalysts)
        sums["rel-path"] += a
        sums["greedy"] += b
        sums["ind-k"] += c
        inv_rg += a < b - 1e-12
        inv_gi += b < c - 1e-12
    m = {k: v / 50 for k, v in sums.items()}
    ok = m["rel-path"] >= m["greedy"] >= m["ind-k"] and inv_rg <= 5 and inv_gi <= 5
    record(11, ok, f"means rel-path {m['rel-path']:.3f} >= greedy {m['greedy']:.3f} >= ind-k {m['ind-k']:.3f}; "
                   f"inversions {inv_rg}, {inv_gi}")


def _cli(*argv) -> bytes:
    env = dict(os.environ, PYTHONHASHSEED="random")
    proc = subprocess.run([sys.executable, "-m", "condrel", *argv], capture_output=True, env=env, check=True)
    return proc.stdout


def test_criterion_12_cli_determinism(tmp_path):
    graph = tmp_path / "detour.graph"
    save_graph(detour_graph(), graph)
    synth = tmp_path / "synth.graph"
    synth.write_bytes(_cli("synth", "--nodes", "40", "--edge-prob", "0.08", "--seed", "3"))
    g = str(graph)
    queries = tmp_path / "q.jsonl"
    queries.write_bytes(_cli("gen-queries", "--graph", str(synth), "--mode", "distance", "--count", "5",
                             "--seed", "3", "--format", "json"))
    invocations = [
        ("synth", "--nodes", "40", "--seed", "3"),
        ("validate", "--graph", g),
        ("query", "--graph", g, "--source", "s", "--target", "t", "--k", "3", "--algo", "greedy", "--seed", "4"),
        ("query", "--graph", g, "--source", "s", "--target", "t", "--k", "3", "--seed", "4"),
        ("query", "--graph", g, "--sources", "s,a", "--targets", "t", "--aggregate", "min", "--seed", "4"),
        ("query", "--graph", g, "--peers", "s,b,t", "--k", "3", "--seed", "4", "--format", "json"),
        ("oracle", "--graph", g, "--source", "s", "--target", "t", "--topk", "3"),
        ("gen-queries", "--graph", str(synth), "--mode", "multi", "--count", "5", "--seed", "4"),
        ("bench", "--graph", str(synth), "--queries", str(queries), "--algos", "ind-k,greedy,rel-path,avg",
         "--samples", "300", "--seed", "4", "--timing", "off"),
    ]
    differing = [" ".join(argv[:1]) for argv in invocations if _cli(*argv) != _cli(*argv)]

    # with timing on, everything but the wall-time column must still agree
    timed = ("bench", "--graph", str(synth), "--queries", str(queries), "--algos", "rel-path", "--seed", "4")
    strip = lambda out: re.sub(rb",[0-9.]+\n", b",\n", out)
    if strip(_cli(*timed)) != strip(_cli(*timed)):
        differing.append("bench (timed, ms stripped)")
    record(12, not differing, f"{len(invocations) + 1} invocations run twice; differing: {differing or 'none'}")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
