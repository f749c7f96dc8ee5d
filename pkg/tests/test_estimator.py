import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from condrel.estimator import (
    SamplerConfig,
    evaluate_reliability,
    mc_connectivity,
    mc_reliability,
    naive_mc_reliability,
    required_samples,
)
from condrel.fixtures import random_graph
from condrel.graph import UncertainGraph
from condrel.oracle import ExactResult, exact_connectivity, exact_reliability

from helpers import small_graphs


def test_required_samples_closed_form():
    assert required_samples(0.05, 0.01) == 1060
    assert required_samples(0.5, 0.5) == 3


@pytest.mark.parametrize("eps, delta", [(1.0, 0.1), (0.0, 0.1), (0.1, 1.0), (0.1, 0.0)])
def test_required_samples_rejects_out_of_range(eps, delta):
    with pytest.raises(ValueError):
        required_samples(eps, delta)


def test_config_validation():
    with pytest.raises(ValueError):
        SamplerConfig(samples=0)
    with pytest.raises(ValueError):
        SamplerConfig(workers=0)


def test_diamond_estimate_close_to_exact(diamond):
    est = mc_reliability(diamond, 0, 3, {0, 1, 2}, SamplerConfig(samples=10000, seed=7))
    assert abs(est.value - 0.475) <= 0.02
    assert est.value * est.samples == est.successes


def test_target_in_sources_is_certain(diamond):
    est = mc_reliability(diamond, [0, 3], 3, (), SamplerConfig(samples=5))
    assert est.value == 1.0


def test_no_catalysts_gives_zero(diamond):
    assert mc_reliability(diamond, 0, 3, (), SamplerConfig(samples=200)).value == 0.0


def test_connectivity_estimate_close_to_exact(diamond):
    cats = {0, 1, 2}
    est = mc_connectivity(diamond, [0, 3], cats, SamplerConfig(samples=10000, seed=3))
    assert abs(est.value - exact_connectivity(diamond, [0, 3], cats).value) <= 0.02


def test_connectivity_certain_clique():
    g = UncertainGraph.build([(u, v, {0: 1.0}) for u in range(4) for v in range(4) if u != v])
    assert mc_connectivity(g, [0, 2, 3], {0}, SamplerConfig(samples=50)).value == 1.0


def test_connectivity_isolated_peer():
    g = UncertainGraph.build([(0, 1, {0: 1.0})], n_nodes=3)
    assert mc_connectivity(g, [0, 2], {0}, SamplerConfig(samples=50)).value == 0.0


def test_same_seed_same_estimate(diamond):
    cfg = SamplerConfig(samples=3000, seed=11)
    assert mc_reliability(diamond, 0, 3, {0, 1, 2}, cfg) == mc_reliability(diamond, 0, 3, {0, 1, 2}, cfg)


def test_parallel_equals_serial(diamond):
    serial = mc_reliability(diamond, 0, 3, {0, 1, 2}, SamplerConfig(samples=4000, seed=5))
    parallel = mc_reliability(diamond, 0, 3, {0, 1, 2}, SamplerConfig(samples=4000, seed=5, workers=3))
    assert serial == parallel


@given(small_graphs(max_edges=10), st.data())
def test_shared_seed_estimates_are_monotone(g, data):
    s = data.draw(st.integers(0, g.n_nodes - 1))
    t = data.draw(st.integers(0, g.n_nodes - 1))
    big = data.draw(st.sets(st.integers(0, g.n_catalysts - 1)))
    small = data.draw(st.sets(st.sampled_from(sorted(big)))) if big else set()
    cfg = SamplerConfig(samples=200, seed=data.draw(st.integers(0, 2**32)))
    assert mc_reliability(g, s, t, small, cfg).value <= mc_reliability(g, s, t, big, cfg).value


def test_halfwidth():
    est = mc_reliability(UncertainGraph.build([(0, 1, {0: 0.5})]), 0, 1, {0}, SamplerConfig(samples=10000))
    assert est.hoeffding_halfwidth(0.01) == pytest.approx(math.sqrt(math.log(200) / 20000))


def test_oracle_convergence_rate():
    """|mc - exact| <= Hoeffding half-width in at least 99% of 200 random cases."""
    misses = 0
    for i in range(200):
        g = random_graph(1000 + i, n_nodes=6, edge_prob=0.3, n_catalysts=4, max_edges=12)
        s, t = i % 6, (i * 7 + 1) % 6
        cats = {c for c in range(4) if (i >> c) & 1} or {0}
        exact = exact_reliability(g, s, t, cats).value
        est = mc_reliability(g, s, t, cats, SamplerConfig(samples=1000, seed=i))
        misses += abs(est.value - exact) > est.hoeffding_halfwidth(0.01)
    assert misses <= 2


def test_lazy_sampler_matches_flip_all_sampler():
    """Stopping early must not change the success distribution."""
    for i in range(20):
        g = random_graph(500 + i, n_nodes=6, edge_prob=0.35, n_catalysts=3, max_edges=12)
        cats = {0, 1, 2}
        exact = exact_reliability(g, 0, 5, cats).value
        cfg = SamplerConfig(samples=4000, seed=i)
        lazy = mc_reliability(g, 0, 5, cats, cfg).value
        naive = naive_mc_reliability(g, 0, 5, cats, cfg)
        tol = math.sqrt(math.log(2 / 0.001) / (2 * 4000))
        assert abs(lazy - exact) <= tol
        assert abs(naive - exact) <= tol


def test_evaluate_switches_to_exact_for_small_graphs(diamond):
    res = evaluate_reliability(diamond, 0, 3, {0, 1, 2}, SamplerConfig())
    assert isinstance(res, ExactResult)
    res = evaluate_reliability(diamond, 0, 3, {0, 1, 2}, SamplerConfig(exact_edge_limit=2, samples=100))
    assert not isinstance(res, ExactResult)
