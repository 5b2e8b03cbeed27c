import itertools
from math import comb

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import brute_neighborhood, random_explicit
from hedgehog_ramsey.hedgehog import (
    DeficiencyWitness,
    HedgehogEmbedding,
    dumps_certificate,
    find_hedgehog,
    from_certificate,
    hall_margin,
    hopcroft_karp,
    to_certificate,
    verify_embedding,
)
from hedgehog_ramsey.hypercolor import BitGraph, Color, all_blue, all_red, make_random_coloring, make_simple_coloring


def brute_embeddable(H, color, body):
    pairs = list(itertools.combinations(sorted(body), 2))
    outside = [w for w in range(H.n) if w not in body]
    for spines in itertools.permutations(outside, len(pairs)):
        if all(H.color_of(a, b, w) is color for (a, b), w in zip(pairs, spines)):
            return True
    return False


def test_all_blue_embeds():
    H = all_blue(20)
    e = find_hedgehog(H, Color.BLUE, [0, 1, 2, 3])
    assert isinstance(e, HedgehogEmbedding)
    assert verify_embedding(H, e) == []
    assert e.t == 4 and len(e.vertices()) == 4 + 6


def test_zero_degree_pair_gives_witness():
    H = make_simple_coloring(BitGraph.from_edges(8, [(0, 1)]))
    w = find_hedgehog(H, Color.BLUE, [0, 3, 4])
    assert isinstance(w, DeficiencyWitness)
    assert w.pairs == ((3, 4),) and w.witness_count == 0


def test_witness_recount_and_margin():
    for seed in range(30):
        H = random_explicit(10, seed, p=0.8)
        for color in Color:
            body = (0, 1, 2, 3)
            res = find_hedgehog(H, color, body)
            if isinstance(res, DeficiencyWitness):
                outside = brute_neighborhood(H, color, res.pairs) - set(body)
                assert len(outside) == res.witness_count < len(res.pairs)
                assert hall_margin(H, color, body, res.pairs) < 0
            else:
                assert verify_embedding(H, res, 4) == []


def test_exact_fit_agrees_with_brute_force():
    for seed in range(40):
        H = random_explicit(6, seed, p=0.7)
        for color in Color:
            res = find_hedgehog(H, color, (0, 2, 4))
            assert isinstance(res, HedgehogEmbedding) == brute_embeddable(H, color, (0, 2, 4))


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 10_000), n=st.integers(6, 9), p=st.sampled_from([0.3, 0.5, 0.7, 0.9]))
def test_completeness_t3(seed, n, p):
    H = random_explicit(n, seed, p)
    for body in itertools.combinations(range(n), 3):
        for color in Color:
            res = find_hedgehog(H, color, body)
            assert isinstance(res, HedgehogEmbedding) == brute_embeddable(H, color, body)


def test_argument_errors():
    H = all_red(10)
    with pytest.raises(ValueError):
        find_hedgehog(H, Color.RED, [0])
    with pytest.raises(ValueError):
        find_hedgehog(H, Color.RED, [0, 0, 1])
    with pytest.raises(ValueError):
        find_hedgehog(H, Color.RED, [0, 1, 2, 3, 4])  # 5 + 10 > 10


def test_verifier_flags_tampering():
    H = all_blue(20)
    e = find_hedgehog(H, Color.BLUE, [0, 1, 2, 3])
    spine = dict(e.spine)
    spine[(0, 2)] = spine[(0, 1)]
    assert "spine not injective" in verify_embedding(H, HedgehogEmbedding(e.color, e.body, spine))
    spine = dict(e.spine)
    spine[(0, 1)] = 3
    assert "spine meets body" in verify_embedding(H, HedgehogEmbedding(e.color, e.body, spine))
    assert any(p.startswith("wrong color") for p in verify_embedding(H, HedgehogEmbedding(Color.RED, e.body, e.spine)))
    spine = dict(e.spine)
    del spine[(2, 3)]
    assert any(p.startswith("spine missing") for p in verify_embedding(H, HedgehogEmbedding(e.color, e.body, spine)))


def test_hall_margin_examples():
    H = all_blue(10)
    assert hall_margin(H, Color.BLUE, [0, 1, 2], [(0, 1)]) == 8 - (1 + 3)
    assert hall_margin(H, Color.RED, [0, 1, 2], [(0, 1)]) == -(1 + 3)
    with pytest.raises(ValueError):
        hall_margin(H, Color.BLUE, [0, 1, 2], [])
    R = make_random_coloring(40, 0.5, 3)
    F = [(0, 1), (1, 5), (0, 5)]
    assert hall_margin(R, Color.RED, [0, 1, 5], F) == len(brute_neighborhood(R, Color.RED, F)) - 6


def test_hopcroft_karp_small():
    adj = [[0, 1], [0], [1, 2]]
    m = hopcroft_karp(adj)
    assert len(m) == 3 and len(set(m.values())) == 3
    assert len(hopcroft_karp([[0], [0], [0]])) == 1


def test_certificate_round_trip():
    H = make_random_coloring(60, 0.5, 2)
    e = find_hedgehog(H, Color.RED, [0, 1, 2])
    cert = to_certificate(e, 60, "random:p=0.5:seed=2", 2)
    text = dumps_certificate(cert)
    assert text == dumps_certificate(to_certificate(e, 60, "random:p=0.5:seed=2", 2))
    back = from_certificate(cert)
    assert back.body == e.body and back.spine == e.spine and back.color is e.color
    with pytest.raises(ValueError):
        from_certificate({"color": "r"})


def test_truncation_keeps_perfect_matchings():
    # pairs with plenty of options are capped at C(t, 2) candidates
    t = 5
    H = all_red(t + comb(t, 2) + 40)
    e = find_hedgehog(H, Color.RED, range(t))
    assert verify_embedding(H, e, t) == []
