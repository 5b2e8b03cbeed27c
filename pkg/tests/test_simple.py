import pytest

from hedgehog_ramsey.hedgehog import verify_embedding
from hedgehog_ramsey.hypercolor import BitGraph, Color, GnpGraph, all_red, make_simple_coloring
from hedgehog_ramsey.simple import find_hedgehog_simple, greedy_spine_assign


def check(G, t):
    emb, info = find_hedgehog_simple(G, t, with_info=True)
    assert verify_embedding(make_simple_coloring(G), emb, t) == []
    return emb, info


def test_complete_graph_blue_branch():
    emb, info = check(BitGraph.complete(110), 10)
    assert info.branch == "blue" and emb.color is Color.BLUE


def test_empty_graph_red_branch():
    emb, info = check(BitGraph(110), 10)
    assert info.branch == "red" and info.fail_index == 9 and emb.color is Color.RED
    assert info.pool_size >= 55 + 55


@pytest.mark.parametrize("seed", range(10))
def test_gnp_t30(seed):
    check(GnpGraph(930, 0.5, seed), 30)


@pytest.mark.parametrize("maker", [BitGraph.star, BitGraph.path])
def test_stars_and_paths(maker):
    for t in (3, 5, 8):
        check(maker(t * t + t), t)


def test_sparse_graph_falls_to_red():
    _, info = check(GnpGraph(110, 0.02, 1), 10)
    assert info.branch == "red"


def test_blue_reserves_disjoint():
    G = GnpGraph(110, 0.5, 3).to_bitgraph()
    emb = find_hedgehog_simple(G, 10)
    spines = list(emb.spine.values())
    assert len(set(spines)) == len(spines) and not set(spines) & set(emb.body)


def test_too_small():
    with pytest.raises(ValueError):
        find_hedgehog_simple(BitGraph(109), 10)


def test_greedy_assign_examples():
    H = make_simple_coloring(BitGraph.complete(6))
    spine = greedy_spine_assign(H, (0, 1, 2), Color.BLUE, reserved={0: [], 1: [3], 2: [4, 5]})
    assert spine == {(0, 1): 3, (0, 2): 4, (1, 2): 5}
    R = all_red(12)
    spine = greedy_spine_assign(R, (0, 1, 2, 3), Color.RED, pool=range(4, 12))
    assert sorted(spine.values()) == list(range(4, 10))
    with pytest.raises(RuntimeError):
        greedy_spine_assign(H, (0, 1, 2), Color.BLUE, reserved={1: [3], 2: [4]})
    with pytest.raises(RuntimeError):
        greedy_spine_assign(R, (0, 1, 2, 3), Color.RED, pool=range(4, 8))
