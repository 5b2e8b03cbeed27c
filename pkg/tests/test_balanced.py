import numpy as np
import pytest

from hedgehog_ramsey.balanced import (
    SampleReport,
    check_balanced,
    find_red_hedgehog_balanced,
    prune_body,
    report_for,
    sample_body,
)
from hedgehog_ramsey.hedgehog import find_hedgehog, verify_embedding
from hedgehog_ramsey.hypercolor import Color, DegreeOracle, ExplicitColoring, all_blue, all_red, make_random_coloring
from hedgehog_ramsey.peel import m_max


def test_small_sample_rejected():
    H = make_random_coloring(4000, 0.5, 1)
    rep = report_for(H, 10, range(30))
    assert not rep.accepted and rep.reason == "small sample"
    assert report_for(H, 10, range(0, 3100, 100)).accepted


def test_random_sample_counts_zero():
    H = make_random_coloring(4000, 0.5, 3)
    for seed in range(5):
        rep = sample_body(H, 10, seed)
        assert set(rep.counts) == {20, 30, 40, 50, 60}
        assert all(k == 0 for k in rep.counts.values())
        assert rep.accepted == (rep.size >= 31)


def test_all_blue_sample_rejected():
    rep = sample_body(all_blue(4000), 10, 0)
    assert not rep.accepted
    if rep.size > 30:
        assert rep.counts[20] == rep.size * (rep.size - 1) // 2


def test_counts_monotone():
    H = make_random_coloring(400, 0.9, 2)
    rep = sample_body(H, 4, 7)
    ms = sorted(rep.counts)
    assert all(rep.counts[a] <= rep.counts[b] for a, b in zip(ms, ms[1:]))


def test_sampling_is_seeded():
    H = make_random_coloring(4000, 0.5, 3)
    assert sample_body(H, 10, 5, 2) == sample_body(H, 10, 5, 2)
    assert sample_body(H, 10, 5, 2).sample != sample_body(H, 10, 5, 3).sample


def test_prune_default_rule_and_bound():
    H = make_random_coloring(4000, 0.5, 3)
    rep = next(r for r in (sample_body(H, 10, s) for s in range(20)) if r.accepted)
    body = prune_body(H, rep, 10)
    assert len(body) == 10 and set(body) <= set(rep.sample)
    # no small red degrees: the pair cover removes the lower endpoint of the first 2t pairs
    D = DegreeOracle(H)
    for m in range(20, m_max(10) - 10 + 1):
        cnt = sum(1 for i, a in enumerate(body) for b in body[i + 1 :] if D.pair_degree(a, b, Color.RED) <= m)
        assert cnt <= max(0, m - 20)


def test_prune_single_cover_vertex():
    # pairs through vertex 0 have red degree ~23, all others 38: the 2t smallest share vertex 0
    n, t = 40, 2
    H = ExplicitColoring.from_function(n, lambda a, b, c: not (a == 0 and c >= 25))
    S = [0, 3, 5, 9, 11, 20, 30]
    rep = report_for(H, t, S)
    assert rep.accepted
    assert prune_body(H, rep, t) == (3, 5)


def test_prune_rejects_unaccepted():
    with pytest.raises(ValueError):
        prune_body(all_blue(400), range(0, 400, 10), 4)


def test_find_all_red_and_all_blue():
    emb, stats = find_red_hedgehog_balanced(all_red(4000), 10, 10, 1)
    assert emb is not None and verify_embedding(all_red(4000), emb, 10) == []
    assert stats.samples[-1].accepted
    emb, stats = find_red_hedgehog_balanced(all_blue(4000), 10, 10, 1)
    assert emb is None and stats.retries == 10 and stats.outcome == "retries exhausted"


def test_find_random_and_stats_json():
    H = make_random_coloring(4000, 0.5, 9)
    emb, stats = find_red_hedgehog_balanced(H, 10, 10, 4)
    assert emb is not None and emb.color is Color.RED
    js = stats.to_json()
    assert js["retries"] == len(js["samples"]) >= 1
    assert set(js["samples"][0]) == {"size", "accepted", "reason"}
    again = find_red_hedgehog_balanced(H, 10, 10, 4)
    assert again[0] == emb and again[1].to_json() == js


def test_pruned_bodies_always_match():
    for seed in range(8):
        H = make_random_coloring(600, 0.8, seed)
        for retry in range(4):
            rep = sample_body(H, 4, seed, retry)
            if rep.accepted:
                body = prune_body(H, rep, 4)
                assert verify_embedding(H, find_hedgehog(H, Color.RED, body), 4) == []


def test_check_balanced():
    assert check_balanced(all_red(300), 1, 5, range(0, 300, 50)) == []
    viol = check_balanced(all_blue(300), 3, 5, [0, 7])
    assert len(viol) == 2 * (m_max(5) - 10 + 1)
    assert check_balanced(make_random_coloring(4000, 0.5, 2), 1, 10, range(0, 4000, 97)) == []
    with pytest.raises(ValueError):
        check_balanced(all_red(300), 0.5, 5, [0])
