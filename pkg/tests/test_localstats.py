from collections import Counter
from fractions import Fraction

import numpy as np
import pytest

from schreier import decorate as dec
from schreier import graph as gr
from schreier import localstats as ls
from schreier import orientation as ori


def c6():
    return gr.build([(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0)], 6)


def test_c6_vertex_transitive_codes_match():
    g = c6()
    codes = {ls.ball_code(g, v, 2).code for v in range(6)}
    assert len(codes) == 1


def test_path_end_vs_center_differ():
    g = gr.build([(0, 1), (1, 2), (2, 3), (3, 4)], 5)
    assert ls.ball_code(g, 0, 1).code != ls.ball_code(g, 2, 1).code


def test_oriented_cycle_flip_isomorphism():
    """Clockwise and counterclockwise C6 are isomorphic as rooted oriented
    graphs (the reflection through the root reverses every edge), so the
    decorated codes agree; a genuinely chiral pair must differ."""
    g = c6()
    cw = ori.Orientation(g, np.array([2 * e + 1 for e in range(6)]))
    ccw = ori.Orientation(g, np.array([2 * e for e in range(6)]))
    assert ls.ball_code(g, 0, 1, cw).code == ls.ball_code(g, 0, 1, ccw).code
    assert ls.ball_code(g, 0, 1).code == ls.ball_code(g, 0, 1).code
    p3 = gr.build([(0, 1), (1, 2)], 3)
    oa = ori.Orientation(p3, np.array([1, 3]))  # 0->1->2
    ob = ori.Orientation(p3, np.array([1, 2]))  # 0->1<-2
    assert ls.ball_code(p3, 1, 1, oa).code != ls.ball_code(p3, 1, 1, ob).code


def test_decorated_vs_plain_codes_disjoint():
    g = c6()
    o = ori.eulerian_orientation(g)
    assert ls.ball_code(g, 0, 1, o).code != ls.ball_code(g, 0, 1).code


def test_relabeling_invariance():
    """Codes are invariant under vertex relabeling, marks included."""
    rng = np.random.default_rng(1234)
    for t in range(1000):
        n = 6 + t % 5
        deg = 2 + 2 * (t % 2)
        g = gr.generate(gr.GraphSpec("configuration_model_regular", 3000 + t,
                                     {"degree": deg, "n": n}))
        perm = rng.permutation(n)
        h = gr.relabel_vertices(g, perm)
        root = int(rng.integers(0, n))
        r = 1 + t % 2
        if t % 3 == 0:
            o_g = ori.eulerian_orientation(g)
            o_h = ori.Orientation(h, o_g.heads)  # same head sides, renamed ends
            a = ls.ball_code(g, root, r, o_g).code
            b = ls.ball_code(h, int(perm[root]), r, o_h).code
        else:
            a = ls.ball_code(g, root, r).code
            b = ls.ball_code(h, int(perm[root]), r).code
        assert a == b, f"relabeling changed the code at trial {t}"


def test_rigid_decorated_codes_relabel_invariant():
    """Full decorations take the rigid fast path; its codes must also be
    invariant under vertex renaming."""
    from schreier.localstats import _is_rigid
    rng = np.random.default_rng(7)
    for t in range(50):
        n = 6 + t % 5
        d = dec.schreier_decorate(
            gr.generate(gr.GraphSpec("configuration_model_regular", 5000 + t,
                                     {"degree": 2 * (1 + t % 3), "n": n})), seed=t)
        assert _is_rigid(d.base, d.orientation.heads, d.coloring.colors)
        perm = rng.permutation(n)
        h = gr.relabel_vertices(d.base, perm)
        oh = ori.Orientation(h, d.orientation.heads)
        root = int(rng.integers(0, n))
        a = ls.ball_code(d.base, root, 2, d.orientation, d.coloring).code
        b = ls.ball_code(h, int(perm[root]), 2, oh, d.coloring).code
        assert a == b


def _brute_rooted_iso(g1, r1, g2, r2, marks1=None, marks2=None):
    """Permutation-search oracle for rooted decorated isomorphism of small
    connected multigraphs; loop orientation is not part of the type."""
    from itertools import permutations

    if g1.n != g2.n or g1.m != g2.m:
        return False

    def signature(g, marks, mapping):
        o, c = marks if marks else (None, None)
        out = []
        for e in range(g.m):
            u, v = g.endpoints(e)
            col = int(c.colors[e]) if c is not None else 0
            if u == v:
                out.append((mapping[u], mapping[u], col, 0))
            elif o is not None:
                out.append((mapping[o.source_vertex(e)], mapping[o.head_vertex(e)], col, 1))
            else:
                a, b = sorted((mapping[u], mapping[v]))
                out.append((a, b, col, 0))
        return sorted(out)

    ident = list(range(g2.n))
    target = signature(g2, marks2, ident)
    rest = [v for v in range(g1.n) if v != r1]
    slots = [v for v in range(g2.n) if v != r2]
    for perm in permutations(slots):
        mapping = {r1: r2}
        mapping.update(zip(rest, perm))
        if signature(g1, marks1, mapping) == target:
            return True
    return False


def test_codes_match_brute_force_isomorphism():
    """Equal codes iff rooted-isomorphic, against a permutation-search oracle,
    for plain and decorated small graphs."""
    pool = []
    for seed in range(8):
        g = gr.generate(gr.GraphSpec("configuration_model_regular", 7000 + seed,
                                     {"degree": 2, "n": 5}))
        if len(gr.components(g)) == 1:
            pool.append((g, None))
    pool.append((gr.build([(0, 1), (1, 0), (2, 2), (1, 2)], 3), None))
    pool.append((gr.build([(0, 1), (1, 2), (2, 0)], 3), None))
    pool.append((gr.build([(0, 1), (1, 2), (2, 3), (3, 0)], 4), None))
    for seed in range(4):
        g = gr.generate(gr.GraphSpec("configuration_model_regular", 7100 + seed,
                                     {"degree": 2, "n": 4}))
        if len(gr.components(g)) == 1:
            d = dec.schreier_decorate(g, seed=seed)
            pool.append((g, (d.orientation, d.coloring)))
    cases = [(g, root, marks) for g, marks in pool for root in (0, g.n - 1)]
    r = 6  # covers every graph in the pool
    codes = []
    for g, root, marks in cases:
        o, c = marks if marks else (None, None)
        codes.append(ls.ball_code(g, root, r, o, c).code)
    checked = 0
    for i in range(len(cases)):
        for j in range(i + 1, len(cases)):
            g1, r1, m1 = cases[i]
            g2, r2, m2 = cases[j]
            if (m1 is None) != (m2 is None):
                continue  # different mark kinds never share codes by header
            same_code = codes[i] == codes[j]
            same_iso = _brute_rooted_iso(g1, r1, g2, r2, m1, m2)
            assert same_code == same_iso, (i, j)
            checked += 1
    assert checked > 50


def test_distribution_c6_single_code():
    nd = ls.neighborhood_distribution(c6(), 1)
    assert len(nd.counts) == 1
    assert nd.mass(next(iter(nd.counts))) == 1.0


def test_distribution_disjoint_cycles():
    g = gr.build([(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 6), (6, 3)], 7)
    nd = ls.neighborhood_distribution(g, 2)
    assert sorted(nd.counts.values()) == [3, 4]
    assert abs(sum(nd.masses().values()) - 1.0) < 1e-12


def test_distribution_sampled_vertex_transitive():
    k4 = gr.build([(i, j) for i in range(4) for j in range(i + 1, 4)], 4)
    nd = ls.neighborhood_distribution(k4, 1, sample=(1000, 9))
    assert len(nd.counts) == 1
    assert nd.sample_count == 1000


def test_exact_masses_have_denominator_n():
    g = gr.build([(0, 1), (1, 2), (2, 3), (3, 4)], 5)
    nd = ls.neighborhood_distribution(g, 1)
    assert nd.total == 5
    for c in nd.counts.values():
        assert Fraction(c, 5).denominator in (1, 5)


def test_sampled_converges_to_exact():
    g = gr.generate(gr.GraphSpec("configuration_model_regular", 21, {"degree": 4, "n": 30}))
    exact = ls.neighborhood_distribution(g, 1)
    tv_small = ls.tv_distance(exact, ls.neighborhood_distribution(g, 1, sample=(40, 3)))
    tv_big = ls.tv_distance(exact, ls.neighborhood_distribution(g, 1, sample=(4000, 3)))
    assert tv_big < 0.1
    assert tv_big <= tv_small + 0.02


def test_tv_examples():
    p = ls.NeighborhoodDistribution(1, {b"a": 1, b"b": 1}, 2)
    q = ls.NeighborhoodDistribution(1, {b"a": 2}, 2)
    r = ls.NeighborhoodDistribution(1, {b"c": 2}, 2)
    assert ls.tv_distance(p, p) == 0.0
    assert ls.tv_distance(p, q) == 0.5
    assert ls.tv_distance(q, r) == 1.0
    with pytest.raises(ValueError):
        ls.tv_distance(p, ls.NeighborhoodDistribution(2, {b"a": 1}, 1))


def test_involution_exact_zero():
    assert ls.involution_invariance_check(gr.build([(0, 1), (1, 2), (2, 3), (3, 0)], 4), 1)[0] == 0.0
    # star K_{1,3}: all 6 darts enumerate into two birooted types, 3 + 3
    star = gr.build([(0, 1), (0, 2), (0, 3)], 4)
    tv, rep = ls.involution_invariance_check(star, 1)
    assert tv == 0.0
    assert rep["support"] == 2
    assert sorted(cnt for _, cnt in rep["top_codes"]) == [3, 3]
    g = gr.generate(gr.GraphSpec("configuration_model_regular", 31, {"degree": 4, "n": 12}))
    assert ls.involution_invariance_check(g, 2)[0] == 0.0


def test_involution_rejects_edgeless():
    with pytest.raises(ValueError):
        ls.involution_invariance_check(gr.build([], 3), 1)


def test_involution_sampled_mode_flags_irregularity():
    """Uniform-root sampling on the star puts mass 1/4 on center->leaf and
    3/4 on leaf->center, so the swap TV sits near 1/2; the sampled mode is
    the diagnostic the exact dart measure deliberately is not."""
    star = gr.build([(0, 1), (0, 2), (0, 3)], 4)
    tv, rep = ls.involution_invariance_check(star, 1, sample=(2000, 17))
    assert rep["mode"] == "sampled"
    assert abs(tv - 0.5) < 0.1


def test_generator_shift_zero_on_rotation():
    sigma = [[1, 2, 3, 4, 5, 0]]
    d = dec.from_permutations(sigma)
    assert ls.generator_shift_check(d, 1, 2) == 0.0


def test_generator_shift_detects_corruption():
    g = gr.generate(gr.GraphSpec("configuration_model_regular", 55, {"degree": 4, "n": 8}))
    good = dec.schreier_decorate(g, seed=2)
    assert ls.generator_shift_check(good, 1, 2) == 0.0
    from schreier.coloring import EdgeColoring
    cols = good.coloring.colors.copy()
    cols[0] = 2 if cols[0] == 1 else 1
    bad = dec.SchreierDecoration(good.base, good.orientation,
                                 EdgeColoring(cols, good.d), good.d)
    assert ls.generator_shift_check(bad, 1, 2) > 0.0


def test_generator_shift_rejects_bad_color():
    d = dec.from_permutations([[1, 0]])
    with pytest.raises(ValueError):
        ls.generator_shift_check(d, 2, 1)


def test_work_budget_is_loud(monkeypatch):
    monkeypatch.setenv("SCHREIER_WORK_BUDGET", "3")
    g = gr.generate(gr.GraphSpec("configuration_model_regular", 77, {"degree": 4, "n": 12}))
    with pytest.raises(ls.WorkBudgetExceeded):
        ls.ball_code(g, 0, 3)


def test_dump_format_sorted():
    nd = ls.neighborhood_distribution(gr.build([(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 6), (6, 3)], 7), 2)
    lines = ls.dump_distribution(nd).splitlines()
    assert len(lines) == 2
    hexes = [ln.split()[0] for ln in lines]
    assert hexes == sorted(hexes)
    counts = [int(ln.split()[1]) for ln in lines]
    assert sorted(counts) == [3, 4]


def test_canonical_form_transfers_across_copies():
    g1 = gr.build([(0, 1), (1, 2), (2, 3), (3, 0)], 4)
    g2 = gr.relabel_vertices(g1, [2, 0, 3, 1])
    code1, order1 = ls.canonical_form(g1)
    code2, order2 = ls.canonical_form(g2)
    assert code1 == code2
    assert len(order1) == 4 and len(order2) == 4
