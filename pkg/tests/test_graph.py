import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from schreier import graph as gr


def test_build_parallel_pair():
    g = gr.build([(0, 1), (1, 0)], 2)
    assert g.m == 2
    assert g.degree(0) == 2 and g.degree(1) == 2


def test_build_loop_counts_twice():
    g = gr.build([(0, 0)], 1)
    assert g.degree(0) == 2


def test_build_out_of_range():
    with pytest.raises(ValueError):
        gr.build([(0, 3)], 2)


@pytest.mark.parametrize("edges,n,v,expect", [
    ([(0, 1), (1, 2), (2, 3), (3, 0)], 4, 1, 2),          # C4
    ([(0, 0)], 1, 0, 2),                                   # loop
    ([(i, j) for i in range(5) for j in range(i + 1, 5)], 5, 2, 4),  # K5
])
def test_degree_examples(edges, n, v, expect):
    assert gr.degree(gr.build(edges, n), v) == expect


def test_components_two_triangles():
    g = gr.build([(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)], 6)
    assert gr.components(g) == [[0, 1, 2], [3, 4, 5]]


def test_components_connected_and_isolated():
    assert len(gr.components(gr.build([(0, 1), (1, 2)], 3))) == 1
    assert gr.components(gr.build([], 5)) == [[0], [1], [2], [3], [4]]


def test_components_parts_connected_and_disconnected():
    g = gr.generate(gr.GraphSpec("configuration_model_regular", 42, {"degree": 2, "n": 18}))
    parts = gr.components(g)
    assert sorted(v for p in parts for v in p) == list(range(18))
    for part in parts:
        reach = set(gr.ball(g, part[0], -1)[0].tolist())
        assert reach == set(part)  # internally connected, pairwise unreachable


def test_configuration_model_regular():
    spec = gr.GraphSpec("configuration_model_regular", 7, {"degree": 4, "n": 100})
    g = gr.generate(spec)
    assert g.m == 200
    assert (g.degrees() == 4).all()


def test_generate_deterministic():
    spec = gr.GraphSpec("configuration_model_regular", 7, {"degree": 4, "n": 100})
    a, b = gr.generate(spec), gr.generate(spec)
    assert (a.eu == b.eu).all() and (a.ev == b.ev).all()


def test_configuration_model_odd_product_rejected():
    with pytest.raises(ValueError):
        gr.GraphSpec("configuration_model_regular", 1, {"degree": 3, "n": 5})


def test_bipartite_regular_degrees():
    g = gr.generate(gr.GraphSpec("bipartite_regular", 1, {"d": 3, "n_per_side": 5}))
    assert g.n == 10
    assert (g.degrees() == 3).all()


def test_sparse_chord_cycle_spacing():
    g = gr.generate(gr.GraphSpec("sparse_chord_cycle", 0,
                                 {"cycle_len": 60, "chord_gap": 10}))
    degs = g.degrees()
    assert set(np.unique(degs)) <= {2, 3}
    deg3 = [v for v in range(g.n) if degs[v] == 3]
    assert len(deg3) >= 2
    # all-pairs BFS: degree-3 vertices pairwise at distance >= 10
    for v in deg3:
        verts, dists = gr.ball(g, v, -1)
        for u, dd in zip(verts.tolist(), dists.tolist()):
            if u != v and u in deg3:
                assert dd >= 10


def test_even_tree_window_is_tree():
    g = gr.generate(gr.GraphSpec("even_tree_window", 3, {"depth": 3, "half_degree_cap": 2}))
    assert g.m == g.n - 1
    assert len(gr.components(g)) == 1
    internal = [v for v in range(g.n) if g.degree(v) >= 2]
    assert all(g.degree(v) % 2 == 0 for v in internal)


def test_edge_list_roundtrip():
    g = gr.generate(gr.GraphSpec("configuration_model_regular", 5, {"degree": 2, "n": 6}))
    text = gr.to_edge_list_text(g)
    assert text.splitlines()[0] == "6 6"
    h = gr.from_edge_list_text(text)
    assert (h.eu == g.eu).all() and (h.ev == g.ev).all()


def test_edge_list_format_errors():
    with pytest.raises(ValueError):
        gr.from_edge_list_text("3 2\n0 1\n")


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 10).flatmap(
    lambda n: st.tuples(st.just(n),
                        st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)),
                                 max_size=25))))
def test_degree_sum_is_twice_edges(args):
    n, edges = args
    g = gr.build(edges, n)
    assert int(g.degrees().sum()) == 2 * g.m


def test_relabel_preserves_degree_multiset():
    g = gr.generate(gr.GraphSpec("configuration_model_regular", 9, {"degree": 4, "n": 10}))
    perm = gr.rng_for(3).permutation(10)
    h = gr.relabel_vertices(g, perm)
    assert sorted(g.degrees().tolist()) == sorted(h.degrees().tolist())
