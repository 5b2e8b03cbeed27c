import itertools

import numpy as np
import pytest

from hedgehog_ramsey.hypercolor import BitGraph, Color, ExplicitColoring, make_simple_coloring


def brute_degree(coloring, u, v, color):
    return sum(1 for w in range(coloring.n) if w not in (u, v) and coloring.color_of(u, v, w) is color)


def brute_neighborhood(coloring, color, pairs):
    out = set()
    for u, v in pairs:
        out |= {w for w in range(coloring.n) if w not in (u, v) and coloring.color_of(u, v, w) is color}
    return out


def random_explicit(n, seed, p=0.5):
    rng = np.random.default_rng(seed)
    bits = (rng.random(len(list(itertools.combinations(range(n), 3)))) < p).astype(np.uint8)
    return ExplicitColoring(n, bits, descriptor=None)


@pytest.fixture
def edge01():
    """Simple coloring on 5 vertices induced by the single edge 01."""
    return make_simple_coloring(BitGraph.from_edges(5, [(0, 1)]))


@pytest.fixture
def colors():
    return (Color.BLUE, Color.RED)


ACCEPTANCE_LINES: list[str] = []


def report_criterion(number: int, passed: bool, detail: str) -> str:
    line = f"ACCEPTANCE {number}: {'PASS' if passed else 'FAIL'} | {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return line


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
