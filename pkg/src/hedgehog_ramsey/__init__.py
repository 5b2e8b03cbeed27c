"""Monochromatic hedgehogs in 2-colorings of complete 3-uniform hypergraphs."""

from .balanced import check_balanced, find_red_hedgehog_balanced, prune_body, sample_body
from .hedgehog import DeficiencyWitness, HedgehogEmbedding, find_hedgehog, hall_margin, verify_embedding
from .hypercolor import (
    BitGraph,
    Color,
    DegreeOracle,
    GnpGraph,
    TripleColoring,
    all_blue,
    all_red,
    color_of,
    make_random_coloring,
    make_simple_coloring,
    neighborhood,
    pair_degree,
    pair_degree_at_most,
    parse_descriptor,
    restrict,
    u_set,
)
from .oracle import BudgetExceeded, exhaustive_find, min_coloring_search, pipeline_vs_oracle
from .peel import PeelOutcome, PeelTrace, audit_trace, classify_pairs, m_max, peel_step, run_peeling
from .pipeline import solve, sweep
from .simple import find_hedgehog_simple, greedy_spine_assign
from .vertexset import VertexSet

__version__ = "0.1.0"
