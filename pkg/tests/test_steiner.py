import pytest
from hypothesis import given
from hypothesis import strategies as st

from condrel.errors import GuardExceeded, StructuralError
from condrel.graph import UncertainGraph
from condrel.paths import build_multigraph, top_r_paths
from condrel.steiner import top_r_steiner_trees

from helpers import all_steiner_trees, edge_weight, is_tree_spanning, small_graphs


def test_two_terminals_match_paths(diamond):
    mg = build_multigraph(diamond)
    trees = top_r_steiner_trees(mg, [0, 3], 5)
    paths = top_r_paths(mg, 0, 3, 5)
    assert sorted(t.weight for t in trees) == pytest.approx(sorted(p.weight for p in paths), abs=1e-12)


def test_three_terminals_on_diamond(diamond):
    trees = top_r_steiner_trees(build_multigraph(diamond), [0, 1, 3], 5)
    assert [round(t.reliability, 12) for t in trees] == [0.3, 0.15, 0.125]
    for t in trees:
        assert {0, 1, 3} <= t.nodes


def test_single_certain_edge():
    g = UncertainGraph.build([(0, 1, {0: 1.0}), (1, 2, {0: 0.5})])
    (t,) = top_r_steiner_trees(build_multigraph(g), [0, 1], 1)
    assert t.weight == 0.0 and t.edge_ids == (0,)


def test_fewer_trees_than_asked():
    g = UncertainGraph.build([(0, 1, {0: 0.5})])
    assert len(top_r_steiner_trees(build_multigraph(g), [0, 1], 10)) == 1


def test_disconnected_terminals():
    g = UncertainGraph.build([(0, 1, {0: 0.5})], n_nodes=3)
    assert top_r_steiner_trees(build_multigraph(g), [0, 2], 3) == []


def test_terminal_guard():
    g = UncertainGraph.build([(i, i + 1, {0: 0.5}) for i in range(10)])
    with pytest.raises(GuardExceeded):
        top_r_steiner_trees(build_multigraph(g), range(9), 1)
    with pytest.raises(ValueError):
        top_r_steiner_trees(build_multigraph(g), [3], 1)


def test_requires_multigraph():
    g = UncertainGraph.build([(0, 1, {0: 0.5, 1: 0.5})])
    with pytest.raises(StructuralError):
        top_r_steiner_trees(g, [0, 1], 1)


@given(small_graphs(max_nodes=5, max_edges=7, max_table=2), st.data())
def test_matches_exhaustive_tree_enumeration(g, data):
    mg = build_multigraph(g)
    if mg.n_edges > 10:
        return
    q = sorted(data.draw(st.sets(st.integers(0, g.n_nodes - 1), min_size=2, max_size=3)))
    r = data.draw(st.integers(1, 5))
    every = all_steiner_trees(mg, q)
    weights = sorted(sum(edge_weight(mg, j) for j in tr) for tr in every)
    got = top_r_steiner_trees(mg, q, r)
    assert len(got) == min(r, len(every))
    for tr, w in zip(got, weights):
        assert tr.weight == pytest.approx(w, abs=1e-9)
        assert is_tree_spanning(mg, tr.edge_ids, q)
    assert len({tr.edge_ids for tr in got}) == len(got)
