import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from genuslab import tentacles as tt
from genuslab.enumeration import brute_force_census
from genuslab.errors import DegenerateTotalCollapse, InvalidEdge, MalformedWalk, OddChildCount
from genuslab.maps import canonical_key, tetrahedron, torus_grid, torus_one_vertex

from helpers import random_triangulation

CATALAN_3 = [1, 1, 3, 12, 55, 273, 1428]  # number of even trees with 2m edges, m = 0..6


@st.composite
def even_trees(draw, max_m=8):
    m = draw(st.integers(0, max_m))
    return tt.random_even_tree(m, np.random.default_rng(draw(st.integers(0, 2**32 - 1))))


def own_core_hosts(count, sizes=(4, 5, 6, 7)):
    out = []
    seed = 0
    while len(out) < count:
        m = random_triangulation(sizes[seed % len(sizes)], seed)
        dec = tt.core_decomposition(m)
        if not dec.degenerate and dec.nontrivial == 0:
            out.append(m)
        seed += 1
    return out


def test_tree_counts_agree():
    for m in range(7):
        direct = tt.count_even_trees_direct(m)
        assert direct == tt.count_even_trees_walks(m) == tt.count_even_trees_cycle_lemma(m)
        assert direct == CATALAN_3[m]
    for m in range(5):
        trees = tt.even_trees(m)
        assert len(trees) == len(set(trees)) == CATALAN_3[m]
        assert all(tt.tree_edges(t) == 2 * m for t in trees)


def test_even_tree_type():
    assert tt.EvenPlaneTree(((), ())).n_edges == 2
    with pytest.raises(OddChildCount):
        tt.EvenPlaneTree(((),))
    with pytest.raises(OddChildCount):
        tt.check_even(((), (), ((),)))
    t = tt.EvenPlaneTree((((), ()), ()))
    assert t.mirror().children == ((), ((), ()))
    assert t.mirror().mirror() == t


def test_walk_of_cherry():
    w = tt.lukasiewicz_encode([((), ())])
    assert w.steps == (2, -1, -1, -1) and w.length == 4 and w.terminal == -1


@settings(max_examples=100, deadline=None)
@given(st.lists(even_trees(), min_size=1, max_size=5))
def test_walk_round_trip_and_shape(forest):
    w = tt.lukasiewicz_encode(forest)
    assert tt.lukasiewicz_decode(w) == forest
    edges = sum(tt.tree_edges(t) for t in forest)
    # a forest of a trees with 2b edges: length a + 3b, terminal -a, strictly above -a before the end
    assert w.length == len(forest) + 3 * edges // 2
    assert w.terminal == -len(forest)
    assert w.stays_above_terminal()
    assert all(s in (2, -1) for s in w.steps)


def test_malformed_walks():
    for bad in ([2], [3, -1], [2, -1], [-1, -1, 2], [-1, 2, -1, -1, -1, 2]):
        with pytest.raises(MalformedWalk):
            tt.lukasiewicz_decode(bad)


def test_ladder_words():
    for ell in range(1, 12):
        w = tt.ladder_word(ell)
        assert len(w) == 3 * ell - 2
        assert w.count(2) == ell - 1
        tree = tt.ladder_tree(ell)
        assert tt.tree_edges(tree) == 2 * (ell - 1)
        if ell >= 2:
            assert tt.ladder_height(tree) == ell
    assert tt.B4 == (((), ()), (), (), ())
    with pytest.raises(ValueError):
        tt.ladder_word(0)


def test_one_insertion_on_tetrahedron():
    t = tetrahedron()
    m = tt.k_insert(t, 0, 1)
    assert (m.n_faces, m.genus) == (6, 0) and m.is_triangulation
    dec = tt.core_decomposition(m)
    assert canonical_key(dec.core) == canonical_key(t)
    assert dec.M_n == 2 and dec.T_n == 6 and dec.nontrivial == 1
    with pytest.raises(InvalidEdge):
        tt.k_insert(t, 99, 1)
    with pytest.raises(ValueError):
        tt.k_insert(t, 0, 0)
    with pytest.raises(ValueError):
        tt.k_insert(t, 0, 2, plan=[()])


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 4), st.integers(0, 2**32 - 1))
def test_insertion_keeps_genus(k, seed):
    rng = np.random.default_rng(seed)
    m = random_triangulation(int(rng.integers(1, 6)), seed)
    plan = [tt.random_even_tree(int(rng.integers(0, 3)), rng) for _ in range(2 * k)]
    out = tt.k_insert(m, int(rng.integers(m.n_darts)), k, plan)
    added = 2 * k + sum(tt.tree_edges(p) for p in plan)
    assert out.is_triangulation and out.genus == m.genus
    assert out.n_faces == m.n_faces + added


def test_tetrahedron_decomposition():
    t = tetrahedron()
    dec = tt.core_decomposition(t)
    assert dec.core == t and dec.T_n == 6 and dec.M_n == 0 and dec.nontrivial == 0
    assert tt.max_ladder_height(t) == (0, None)
    assert set(dec.heights()) == {0}


def test_total_collapse():
    dec = tt.core_decomposition(torus_one_vertex())
    assert dec.core is not None
    m = tt.tree_to_tentacle(((), ()))
    assert tt.core_decomposition(m).core.n_edges == 1
    # two triangles glued along all three sides collapse completely
    sphere = tt.k_insert(tt.single_edge(), 0, 1)
    assert sphere.n_faces == 3  # the lone edge keeps its outer 2-gon
    sphere = next(m for m in brute_force_census(1).representatives[0] if m.n_vertices == 3
                  and all(len(v) == 2 for v in m.vertices))
    dec = tt.core_decomposition(sphere)
    assert dec.degenerate and dec.core is None and dec.T_n == 0
    with pytest.raises(DegenerateTotalCollapse):
        tt.core_decomposition(sphere, strict=True)


def test_tentacle_bijection_small():
    assert tt.tree_to_tentacle(((), ())).n_faces == 2 + 1  # two triangles plus the outer 2-gon
    for m in range(4):
        for tree in tt.even_trees(m):
            assert tt.tentacle_to_tree(tt.tree_to_tentacle(tree)).children == tree


@settings(max_examples=200, deadline=None)
@given(even_trees(max_m=20))
def test_tentacle_round_trip(tree):
    assert tt.tentacle_to_tree(tt.tree_to_tentacle(tree)).children == tree


def test_planned_insertions_round_trip():
    rng = np.random.default_rng(5)
    for host in own_core_hosts(8):
        darts = rng.permutation(host.n_darts)
        plan = {}
        used = set()
        for d in darts[:6].tolist():
            e = min(d, host.alpha[d])
            if e not in used:
                used.add(e)
                plan[d] = tt.random_even_tree(int(rng.integers(1, 4)), rng)
        big = tt.insert_trees(host, plan)
        dec = tt.core_decomposition(big)
        assert canonical_key(dec.core) == canonical_key(host)
        expected = {min(d, host.alpha[d]): (t if d < host.alpha[d] else tt.mirror(t)) for d, t in plan.items()}
        assert tt.oriented_payloads(dec) == expected
        assert dec.M_n == sum(tt.tree_edges(t) for t in plan.values())
        assert canonical_key(tt.reinsert(dec)) == canonical_key(big)
        assert dec.core.genus == big.genus


def test_confluence():
    rng = np.random.default_rng(9)
    big = tetrahedron()
    for _ in range(5):
        big = tt.insert_tree(big, int(rng.integers(big.n_darts)), tt.random_even_tree(3, rng))
    ref = tt.core_decomposition(big)
    for i in range(1000):
        other = tt.core_decomposition(big, rng=np.random.default_rng(i))
        assert other.core_darts == ref.core_darts
        assert tt.oriented_payloads(other) == tt.oriented_payloads(ref)


def test_confluence_on_census(censuses):
    for c in censuses.values():
        for reps in c.representatives.values():
            for m in reps[::7]:
                ref = tt.core_decomposition(m)
                for i in range(20):
                    other = tt.core_decomposition(m, rng=np.random.default_rng(i))
                    assert other.degenerate == ref.degenerate
                    assert other.core_darts == ref.core_darts


def test_pattern_a_contains_maximal_b4():
    a, spoke = tt.pattern_a()
    assert a.n_faces == 11 and a.genus == 0
    dec = tt.core_decomposition(a)
    assert dec.core.n_faces == 5
    assert [t.tree for t in dec.tentacles] in ([tt.B4], [tt.mirror(tt.B4)])
    assert tt.max_ladder_height(a)[0] == 4
    host, spoke = tt.glue_pattern_a(torus_grid(3, 3), 0)
    assert tt.max_ladder_height(host)[0] == 4
    assert host.genus == 1


def test_heights():
    t = tetrahedron()
    # the third insertion lands on the edge between the first two new vertices
    m = tt.insert_tree(t, 0, (((), ((), ())), ()))
    dec = tt.core_decomposition(m)
    h = dec.heights()
    assert len(h) == m.n_darts
    assert all(h[d] == 0 for d in dec.core_darts)
    assert max(h) == 2
    prof = tt.tentacle_height_profile(m, dec)
    assert sum(prof.values()) == m.n_darts


def test_root_inside_tentacle_is_moved_to_base():
    t = tetrahedron()
    m = tt.insert_tree(t, 0, tt.ladder_tree(5))
    inner = next(d for d in range(m.n_darts) if d not in tt.core_decomposition(m).core_darts)
    dec = tt.core_decomposition(tt.RootedMap(m.sigma, m.alpha, inner))
    assert tt.unrooted_key(dec.core) == tt.unrooted_key(t)
    assert dec.core_darts[dec.core.root] == dec.base_of[inner]
    assert dec.root_displacement in (0, 1)


def test_stats_record():
    s = tt.tentacle_stats(tt.pattern_a()[0])
    assert s.ell_max == 4 and s.M_n == 6 and s.nontrivial == 1
    assert s.max_height >= 1
