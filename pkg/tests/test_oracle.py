import itertools

import pytest

from conftest import random_explicit
from hedgehog_ramsey.hedgehog import find_hedgehog, verify_embedding
from hedgehog_ramsey.hypercolor import Color, all_red, make_random_coloring
from hedgehog_ramsey.oracle import (
    BudgetExceeded,
    backtrack_embeddable,
    backtrack_find,
    exhaustive_find,
    min_coloring_search,
    pipeline_vs_oracle,
)


def test_all_red():
    e = exhaustive_find(all_red(10), 3, Color.RED)
    assert e.body == (0, 1, 2) and verify_embedding(all_red(10), e) == []
    assert exhaustive_find(all_red(10), 3, Color.BLUE) is None


def test_budget():
    with pytest.raises(BudgetExceeded):
        exhaustive_find(all_red(40), 6, Color.RED, budget=1000)
    with pytest.raises(BudgetExceeded):
        min_coloring_search(7, 3, budget=10)


def test_cross_oracle_on_random():
    for seed in range(4):
        H = make_random_coloring(20, 0.5, seed)
        for c in Color:
            a = exhaustive_find(H, 3, c)
            b = backtrack_find(H, 3, c)
            assert (a is None) == (b is None)
            if a is not None:
                assert a.body == b.body


def test_find_hedgehog_vs_backtracking_every_body():
    for n in (6, 7, 8, 9):
        for seed in range(3):
            H = random_explicit(n, 100 * n + seed, p=0.6)
            table = {tri: H.color_of(*tri) for tri in itertools.combinations(range(n), 3)}
            for body in itertools.combinations(range(n), 3):
                for c in Color:
                    got = find_hedgehog(H, c, body)
                    assert (backtrack_embeddable(table, n, c, body) is None) == (not hasattr(got, "spine"))


def test_tiny_ramsey():
    assert min_coloring_search(3, 2) is None
    w = min_coloring_search(2, 2)
    assert w is not None and w.n == 2


def test_n6_t3_witness_is_genuine():
    w = min_coloring_search(6, 3)
    # result recorded, not assumed: when a witness exists, both exhaustive searches must confirm it
    if w is not None:
        assert exhaustive_find(w, 3, Color.RED) is None
        assert exhaustive_find(w, 3, Color.BLUE) is None
        assert backtrack_find(w, 3, Color.RED) is None and backtrack_find(w, 3, Color.BLUE) is None


def test_pipeline_vs_oracle():
    rec = pipeline_vs_oracle(all_red(12), 3)
    assert rec.sound and rec.oracle_red and rec.pipeline_color is Color.RED
    rec = pipeline_vs_oracle(all_red(5), 3)
    assert rec.pipeline_color is None and not rec.oracle_red and not rec.oracle_blue
    for seed in range(5):
        assert pipeline_vs_oracle(make_random_coloring(14, 0.5, seed), 3, seed).sound
