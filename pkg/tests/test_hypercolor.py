import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import brute_degree, brute_neighborhood, random_explicit
from hedgehog_ramsey.hypercolor import (
    BitGraph,
    Color,
    DegreeOracle,
    ExplicitColoring,
    GnpGraph,
    all_blue,
    all_red,
    color_of,
    make_random_coloring,
    make_simple_coloring,
    neighborhood,
    pair_degree,
    pair_degree_at_most,
    parse_descriptor,
    read_coloring_file,
    read_graph,
    restrict,
    u_set,
    write_coloring_file,
    write_graph,
)
from hedgehog_ramsey.vertexset import VertexSet


def test_color_flip_is_involution():
    for c in Color:
        assert c.flip().flip() is c
    assert len(set(Color)) == 2


def test_color_of_examples(edge01):
    assert color_of(all_red(5), 0, 1, 2) is Color.RED
    assert color_of(edge01, 0, 1, 4) is Color.BLUE
    assert color_of(edge01, 2, 3, 4) is Color.RED


@pytest.mark.parametrize("args", [(0, 0, 1), (0, 1, 5), (-1, 1, 2)])
def test_color_of_rejects_bad_vertices(args):
    with pytest.raises(ValueError):
        color_of(all_red(5), *args)


def test_color_of_symmetric_and_stable():
    H = make_random_coloring(40, 0.5, 11)
    for a, b, c in itertools.combinations(range(0, 40, 3), 3):
        ref = H.color_of(a, b, c)
        assert all(H.color_of(*p) is ref for p in itertools.permutations((a, b, c)))
        assert H.color_of(a, b, c) is ref


def test_pair_degree_examples(edge01):
    assert pair_degree(DegreeOracle(all_red(5)), 0, 1, Color.RED) == 3
    # w ranges over {1, 3, 4}; only w = 1 puts an edge of G in the triple
    assert pair_degree(DegreeOracle(edge01), 0, 2, Color.BLUE) == 1
    with pytest.raises(ValueError):
        pair_degree(DegreeOracle(edge01), 2, 2, Color.BLUE)


@pytest.mark.parametrize(
    "coloring",
    [
        make_random_coloring(20, 0.5, 5),
        make_random_coloring(131, 0.3, 2),
        make_simple_coloring(GnpGraph(70, 0.2, 4)),
        make_simple_coloring(GnpGraph(9000, 0.001, 4)),
        random_explicit(17, 3),
    ],
)
def test_pair_degree_matches_enumeration(coloring):
    D = DegreeOracle(coloring)
    rng = np.random.default_rng(0)
    n = coloring.n
    for _ in range(15):
        u, v = rng.choice(n, 2, replace=False).tolist()
        b, r = D.pair_degrees(u, v)
        assert b + r == n - 2
        assert r == brute_degree(coloring, u, v, Color.RED)
        assert D.pair_degrees(u, v) == (b, r)


def test_pair_degree_at_most_examples_and_agreement():
    D = DegreeOracle(all_red(100))
    assert pair_degree_at_most(D, 0, 1, Color.BLUE, 0)
    assert not pair_degree_at_most(D, 0, 1, Color.RED, 50)
    H = make_random_coloring(60, 0.5, 9)
    D = DegreeOracle(H)
    rng = np.random.default_rng(1)
    for _ in range(10_000):
        u, v = rng.choice(60, 2, replace=False).tolist()
        c = Color.RED if rng.random() < 0.5 else Color.BLUE
        m = int(rng.integers(0, 60))
        assert D.pair_degree_at_most(u, v, c, m) == (D.pair_degree(u, v, c) <= m)


def test_u_set_examples(edge01):
    D = DegreeOracle(all_red(50))
    for v in range(50):
        assert len(u_set(D, Color.RED, 0, v)) == 49
        assert len(u_set(D, Color.BLUE, 47, v)) == 0
    # brute force: members u != 0 with d^r(0, u) <= 0
    D = DegreeOracle(edge01)
    expected = {u for u in range(1, 5) if brute_degree(edge01, 0, u, Color.RED) == 0}
    assert expected == {1}
    assert set(u_set(D, Color.BLUE, 0, 0, VertexSet.full(5))) == expected


def test_u_set_uses_global_degrees():
    H = make_random_coloring(80, 0.5, 3)
    D = DegreeOracle(H)
    X = VertexSet.from_iterable(80, range(0, 80, 2))
    full = u_set(D, Color.BLUE, 45, 1)
    assert set(u_set(D, Color.BLUE, 45, 1, X)) == set(full) & set(X)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32), m1=st.integers(0, 40), m2=st.integers(0, 40), v=st.integers(0, 39))
def test_u_set_monotone(seed, m1, m2, v):
    H = make_random_coloring(40, 0.5, seed)
    D = DegreeOracle(H)
    lo, hi = min(m1, m2), max(m1, m2)
    X = VertexSet.from_iterable(40, range(0, 40, 3))
    for c in Color:
        assert u_set(D, c, lo, v) <= u_set(D, c, hi, v)
        assert u_set(D, c, lo, v, X) <= u_set(D, c, lo, v)


def test_color_swap_duality():
    H = make_random_coloring(30, 0.4, 8)
    F = H.flipped()
    D, DF = DegreeOracle(H), DegreeOracle(F)
    for v in range(0, 30, 7):
        for c in Color:
            for m in (5, 12, 20):
                assert u_set(DF, c, m, v) == u_set(D, c.flip(), m, v)
    pairs = [(0, 1), (4, 9)]
    for c in Color:
        assert neighborhood(F, c, pairs) == neighborhood(H, c.flip(), pairs)


def test_neighborhood_examples(edge01):
    assert set(neighborhood(all_blue(6), Color.BLUE, [(0, 1)])) == {2, 3, 4, 5}
    assert len(neighborhood(all_blue(6), Color.RED, [(0, 1)])) == 0
    F = [(0, 2), (3, 4)]
    for c in Color:
        assert set(neighborhood(edge01, c, F)) == brute_neighborhood(edge01, c, F)
    with pytest.raises(ValueError):
        neighborhood(edge01, Color.RED, [])


def test_neighborhood_monotone():
    H = random_explicit(15, 2)
    small = [(0, 1)]
    big = [(0, 1), (2, 7), (5, 6)]
    for c in Color:
        assert neighborhood(H, c, small) <= neighborhood(H, c, big)


def test_restrict():
    X = [3, 5, 8, 13, 21, 22, 30, 31, 40, 41]
    R = restrict(all_red(50), X)
    assert R.n == 10 and all(R.color_of(*t) is Color.RED for t in itertools.combinations(range(10), 3))
    H = make_random_coloring(60, 0.5, 4)
    R = restrict(H, X)
    for a, b, c in itertools.combinations(range(10), 3):
        assert R.color_of(a, b, c) is H.color_of(X[a], X[b], X[c])
    inner = [1, 4, 6, 9]
    RR = restrict(R, inner)
    direct = restrict(H, [X[i] for i in inner])
    for tri in itertools.combinations(range(4), 3):
        assert RR.color_of(*tri) is direct.color_of(*tri)
    assert [RR.to_parent(i) for i in range(4)] == [X[i] for i in inner]
    with pytest.raises(ValueError):
        restrict(H, [1, 2])


def test_simple_coloring_invariants():
    assert all(make_simple_coloring(BitGraph(7)).color_of(*t) is Color.RED for t in itertools.combinations(range(7), 3))
    assert all(
        make_simple_coloring(BitGraph.complete(7)).color_of(*t) is Color.BLUE for t in itertools.combinations(range(7), 3)
    )
    assert DegreeOracle(make_simple_coloring(BitGraph.from_edges(5, [(0, 1)]))).pair_degree(3, 4, Color.BLUE) == 0
    G = GnpGraph(90, 0.1, 6).to_bitgraph()
    H = make_simple_coloring(G)
    D = DegreeOracle(H)
    adj = G.adjacency()
    for u, v in [(0, 1), (2, 50), (10, 89), (33, 34)]:
        nb = (adj[u] | adj[v]).copy()
        nb[[u, v]] = False
        expected = 88 if adj[u, v] else int(nb.sum())
        assert D.pair_degree(u, v, Color.BLUE) == expected


def test_gnp_implicit_matches_materialized():
    G = GnpGraph(200, 0.3, 12)
    B = G.to_bitgraph()
    for u, v in itertools.combinations(range(0, 200, 9), 2):
        assert G.has_edge(u, v) == B.has_edge(u, v)


def test_random_coloring_contract():
    H1, H2 = make_random_coloring(100, 0.5, 42), make_random_coloring(100, 0.5, 42)
    ones = make_random_coloring(100, 1.0, 3)
    rng = np.random.default_rng(5)
    tri = np.array([rng.choice(100, 3, replace=False) for _ in range(100_000)])
    reds = 0
    for a, b, c in tri.tolist():
        col = H1.color_of(a, b, c)
        reds += col is Color.RED
    for a, b, c in tri[:2000].tolist():
        assert H1.color_of(a, b, c) is H2.color_of(a, b, c)
        assert ones.color_of(a, b, c) is Color.RED
    assert abs(reds / len(tri) - 0.5) <= 0.01


def test_explicit_guard():
    with pytest.raises(ValueError):
        ExplicitColoring(301, np.zeros(0, dtype=np.uint8))


def test_file_round_trips(tmp_path):
    H = random_explicit(9, 4)
    write_coloring_file(H, tmp_path / "c.txt")
    back = read_coloring_file(tmp_path / "c.txt")
    assert np.array_equal(back.bits, H.bits)
    (tmp_path / "inv.txt").write_text("4 default=r\n0 1 2 b\n")
    inv = read_coloring_file(tmp_path / "inv.txt")
    assert inv.color_of(0, 1, 2) is Color.BLUE and inv.color_of(0, 1, 3) is Color.RED
    G = BitGraph.from_edges(6, [(0, 1), (2, 5)])
    write_graph(G, tmp_path / "g.txt")
    assert read_graph(tmp_path / "g.txt").edges() == [(0, 1), (2, 5)]
    S = parse_descriptor(f"simple:{tmp_path / 'g.txt'}")
    assert S.color_of(0, 1, 3) is Color.BLUE and S.color_of(1, 3, 4) is Color.RED


def test_descriptors():
    assert parse_descriptor("allred", 5).color_of(0, 1, 2) is Color.RED
    H = parse_descriptor("random:p=0.5:seed=7", 50)
    assert H.color_of(1, 2, 3) is make_random_coloring(50, 0.5, 7).color_of(1, 2, 3)
    for bad in ("nonsense", "random:p=0.5", "gnp:seed=1"):
        with pytest.raises(ValueError):
            parse_descriptor(bad, 10)


def test_concurrent_readers_agree():
    from concurrent.futures import ThreadPoolExecutor

    D = DegreeOracle(make_random_coloring(500, 0.5, 1), cache_size=64)
    pairs = [(i, (i * 7 + 3) % 500) for i in range(200) if i != (i * 7 + 3) % 500]
    serial = [D.pair_degrees(u, v) for u, v in pairs]
    with ThreadPoolExecutor(4) as pool:
        parallel = list(pool.map(lambda p: D.pair_degrees(*p), pairs))
    assert serial == parallel


def test_vertexset_ops():
    A = VertexSet.from_iterable(70, [0, 5, 64, 69])
    B = VertexSet.from_iterable(70, [5, 6])
    assert len(A) == 4 and 64 in A and 63 not in A
    assert list(A | B) == [0, 5, 6, 64, 69]
    assert list(A & B) == [5]
    assert list(A - B) == [0, 64, 69]
    assert len(A.complement()) == 66 and not (A.complement() & A)._words.any()
    assert VertexSet.from_iterable(70, [5]) <= A
