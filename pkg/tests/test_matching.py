import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from instances import FOUR_NODE_LINKS, four_node_graph
from mmsched.errors import TooLarge
from mmsched.matching import WeightedGraph, enumerate_matchings, is_matching, max_weight_matching

LINK_INDEX = {name: k for k, name in enumerate(FOUR_NODE_LINKS)}


def brute_force(g: WeightedGraph) -> float:
    return max(g.matching_weight(m) for m in enumerate_matchings(g))


def random_graph(rng: random.Random, max_vertices: int = 10, lo: float = -5, hi: float = 5) -> WeightedGraph:
    n = rng.randint(1, max_vertices)
    edges = []
    for u, v in itertools.combinations(range(n), 2):
        if rng.random() < 0.4:
            edges.append((u, v) if rng.random() < 0.5 else (v, u))
    return WeightedGraph(n, tuple(edges), tuple(rng.uniform(lo, hi) for _ in edges))


class TestMaxWeight:
    def test_triangle(self):
        g = WeightedGraph(3, ((0, 1), (1, 2), (2, 0)), (5.0, 4.0, 3.0))
        assert max_weight_matching(g) == (frozenset({0}), 5.0)

    def test_path(self):
        g = WeightedGraph(4, ((0, 1), (1, 2), (2, 3)), (3.0, 4.0, 3.0))
        assert max_weight_matching(g) == (frozenset({0, 2}), 6.0)

    def test_four_node_capacities(self):
        m, w = max_weight_matching(WeightedGraph.from_network(four_node_graph()))
        assert m == {LINK_INDEX["alpha"], LINK_INDEX["epsilon"]}
        assert w == 12.0

    def test_empty_and_negative(self):
        assert max_weight_matching(WeightedGraph(3, (), ())) == (frozenset(), 0.0)
        g = WeightedGraph(2, ((0, 1),), (-1.0,))
        assert max_weight_matching(g) == (frozenset(), 0.0)

    def test_parallel_edges_keep_heaviest(self):
        g = WeightedGraph(2, ((0, 1), (1, 0), (0, 1)), (2.0, 5.0, 5.0))
        assert max_weight_matching(g) == (frozenset({1}), 5.0)

    def test_blossom_needed(self):
        # a 5-cycle with a pendant: greedy picks wrongly, blossoms fix it
        edges = ((0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (4, 5))
        g = WeightedGraph(6, edges, (6.0, 6.0, 6.0, 6.0, 6.0, 7.0))
        m, w = max_weight_matching(g)
        assert w == 19.0
        assert is_matching(edges, m)

    def test_exact_against_enumeration(self):
        rng = random.Random(500)
        for _ in range(500):
            g = random_graph(rng)
            m, w = max_weight_matching(g)
            assert is_matching(g.edges, m)
            assert w == brute_force(g)

    def test_deterministic(self):
        rng = random.Random(3)
        for _ in range(50):
            g = random_graph(rng)
            assert max_weight_matching(g) == max_weight_matching(g)

    @settings(max_examples=100)
    @given(st.integers(0, 10**6), st.floats(0.01, 100))
    def test_scaling(self, seed, lam):
        g = random_graph(random.Random(seed), max_vertices=8)
        m, w = max_weight_matching(g)
        scaled = WeightedGraph(g.n, g.edges, tuple(lam * x for x in g.weights))
        ms, ws = max_weight_matching(scaled)
        assert ws == pytest.approx(lam * w, rel=1e-12, abs=1e-12)
        # the matching found after scaling is optimal before scaling too
        assert g.matching_weight(ms) == pytest.approx(w, rel=1e-12, abs=1e-12)


class TestEnumerate:
    def test_single_edge(self):
        assert enumerate_matchings(WeightedGraph(2, ((0, 1),), (1.0,))) == [frozenset(), frozenset({0})]

    def test_four_node_graph(self):
        names = {frozenset(LINK_INDEX[n] for n in group) for group in
                 [(), ("alpha",), ("theta",), ("gamma",), ("delta",), ("epsilon",), ("alpha", "epsilon")]}
        got = enumerate_matchings(four_node_graph())
        assert len(got) == 7
        assert set(got) == names

    def test_two_disjoint_edges(self):
        assert len(enumerate_matchings(WeightedGraph(4, ((0, 1), (2, 3)), (1.0, 1.0)))) == 4

    def test_all_valid_and_distinct(self):
        g = random_graph(random.Random(1), max_vertices=9)
        ms = enumerate_matchings(g)
        assert len(set(ms)) == len(ms)
        assert all(is_matching(g.edges, m) for m in ms)

    def test_vertex_guard(self):
        with pytest.raises(TooLarge):
            enumerate_matchings(WeightedGraph(17, (), ()))

    def test_count_guard(self):
        edges = tuple(itertools.combinations(range(10), 2))
        with pytest.raises(TooLarge):
            enumerate_matchings(WeightedGraph(10, edges, (1.0,) * len(edges)), limit=100)
