import random

import networkx as nx
import numpy as np
import pytest

from famfft import oracle
from famfft.graphs import Graph, WeightedDigraph
from famfft.solvers.tsp import (
    closed_walk_circuit,
    max_degree_system,
    tsp_avg_degree,
    tsp_bounded_max_degree,
    tsp_fft,
)

from conftest import complete, cycle, from_nx, petersen, random_digraph, random_graph, random_regular

SOLVERS = (tsp_fft, tsp_bounded_max_degree, tsp_avg_degree)


def point(values):
    return [np.array([[v]], dtype=np.int64) for v in values]


class TestCircuit:
    def test_triangle_at_ones(self):
        circ = closed_walk_circuit(WeightedDigraph.symmetric(complete(3)))
        assert int(circ.evaluate(point([1, 1, 1]), np.array([[1]]), 101)[0, 0]) == 2
        assert circ.coef_sum == 2

    def test_edgeless_is_zero(self):
        circ = closed_walk_circuit(WeightedDigraph(4, {}))
        assert int(np.asarray(circ.evaluate(point([3, 5, 7, 9]), np.array([[2]]), 101)).sum()) == 0

    def test_matches_walk_enumeration(self, rng):
        p = 1_000_003
        for _ in range(10):
            G = random_digraph(rng, 5, 4)
            forbidden = set(rng.sample(sorted(G.arcs), 2))
            xs = [rng.randrange(p) for _ in range(5)]
            z = rng.randrange(p)
            want = 0
            for heads, w in oracle.closed_walks(G, forbidden):
                term = pow(z, w, p)
                for v in heads:
                    term = term * xs[v - 1] % p
                want = (want + term) % p
            got = closed_walk_circuit(G, forbidden).evaluate(point(xs), np.array([[z]]), p)
            assert int(np.asarray(got).reshape(-1)[0]) == want


class TestPlain:
    def test_k4(self):
        assert tsp_fft(WeightedDigraph.symmetric(complete(4))).optimum == 4

    def test_asymmetric_triangle(self):
        arcs = {(1, 2): 1, (2, 3): 1, (3, 1): 1, (2, 1): 2, (3, 2): 2, (1, 3): 2}
        res = tsp_fft(WeightedDigraph(3, arcs))
        assert res.optimum == 3 and res.cycle_multiplicity == 1

    def test_random_against_held_karp(self, rng):
        for _ in range(10):
            G = random_digraph(rng, rng.randint(3, 7), 6)
            assert tsp_fft(G).optimum == oracle.held_karp(G)

    def test_infeasible(self):
        G = WeightedDigraph.symmetric(Graph(4, frozenset({(1, 2), (2, 3), (3, 4)})))
        res = tsp_fft(G)
        assert res.optimum is None and not res.feasible


class TestMaxDegree:
    def test_cube(self):
        Q3 = from_nx(nx.hypercube_graph(3))
        res = tsp_bounded_max_degree(WeightedDigraph.symmetric(Q3))
        assert res.optimum == 8 and res.tier == "infants-max" and not res.fallbacks

    def test_c6(self):
        assert tsp_bounded_max_degree(WeightedDigraph.symmetric(cycle(6))).optimum == 6

    def test_system_shape(self):
        S = max_degree_system(random_regular(3, 10, 1))
        assert S.q == 4 and 1 <= S.p <= 2
        assert all(len(f) == 4 for f in S.families)

    def test_cap_fallback(self):
        res = tsp_bounded_max_degree(WeightedDigraph.symmetric(complete(5)), max_degree_cap=3)
        assert res.optimum == 5 and res.tier == "fft2n" and res.fallbacks

    def test_cubic_random(self):
        rng = random.Random(2)
        G = random_regular(3, 10, 7)
        D = WeightedDigraph.symmetric(G, {e: rng.randint(1, 3) for e in G.edges}, M=3)
        assert tsp_bounded_max_degree(D).optimum == oracle.held_karp(D)


class TestAverageDegree:
    def test_c6_every_guess_is_sound(self):
        res = tsp_avg_degree(WeightedDigraph.symmetric(cycle(6)), d=2)
        assert res.optimum == 6
        assert all(k is None or k >= 6 for _, k in res.guesses)

    def test_petersen_infeasible(self):
        res = tsp_avg_degree(WeightedDigraph.symmetric(petersen()))
        assert res.optimum is None

    def test_dense_falls_back(self):
        res = tsp_avg_degree(WeightedDigraph.symmetric(complete(4)), d=3)
        assert res.optimum == 4 and res.fallbacks

    @pytest.mark.slow
    def test_hub_guesses(self):
        # the wheel's hub exceeds T = 8, so guesses range over subsets of A
        G = from_nx(nx.wheel_graph(10))
        rng = random.Random(4)
        D = WeightedDigraph.symmetric(G, {e: rng.randint(1, 2) for e in G.edges}, M=2)
        res = tsp_avg_degree(D, config={"T": 8})
        assert res.details["Y"] == 1 and res.guess_count > 1
        assert res.optimum == oracle.held_karp(D)
        assert all(k is None or k >= res.optimum for _, k in res.guesses)

    def test_sparse_random(self):
        rng = random.Random(8)
        for _ in range(2):
            G = random_graph(rng, 8, 0.45)
            D = WeightedDigraph.symmetric(G, {e: rng.randint(1, 5) for e in G.edges}, M=5)
            assert tsp_avg_degree(D).optimum == oracle.held_karp(D)


class TestProperties:
    def test_weight_scaling(self, rng):
        for _ in range(4):
            G = random_digraph(rng, 6, 3)
            base = tsp_fft(G).optimum
            for fn in SOLVERS:
                assert fn(G.scaled(3)).optimum == 3 * base

    def test_adding_an_arc_never_hurts(self, rng):
        for _ in range(4):
            G = random_digraph(rng, 6, 5, extra=2)
            missing = [(u, v) for u in range(1, 7) for v in range(1, 7) if u != v and (u, v) not in G.arcs]
            arc = rng.choice(missing)
            H = WeightedDigraph(6, G.arcs | {arc: rng.randint(1, 5)}, 5)
            assert tsp_fft(H).optimum <= tsp_fft(G).optimum

    def test_tiers_agree(self, rng):
        for _ in range(6):
            G = random_digraph(rng, rng.randint(3, 7), 4)
            want = oracle.held_karp(G)
            assert [fn(G).optimum for fn in SOLVERS] == [want] * 3
