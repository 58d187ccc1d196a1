import math

import networkx as nx
import pytest
from hypothesis import given, settings, strategies as st

from famfft.errors import ParseError, StructuralError
from famfft.graphs import (
    Graph,
    LabeledMultigraph,
    WeightedDigraph,
    check_decomposition,
    complement_matching,
    decompose_avg_degree,
    greedy_independent_in_square,
    parse_dimacs,
    square,
    write_dimacs,
)

from conftest import complete, cycle, random_graph, random_regular


class TestParse:
    def test_triangle(self):
        G = parse_dimacs("c a comment\np edge 3 3\ne 1 2\ne 2 3\ne 1 3\n")
        assert G == complete(3)

    def test_edgeless(self):
        G = parse_dimacs("p edge 4 0\n")
        assert isinstance(G, Graph) and G.n == 4 and G.m == 0

    def test_weighted(self):
        G = parse_dimacs("p edge 3 2\ne 1 2 5\ne 2 3\n")
        assert isinstance(G, WeightedDigraph)
        assert G.arcs == {(1, 2): 5, (2, 1): 5, (2, 3): 1, (3, 2): 1}

    def test_arcs(self):
        G = parse_dimacs("p edge 2 2\na 1 2 3\na 2 1 4\n")
        assert G.arcs == {(1, 2): 3, (2, 1): 4}

    @pytest.mark.parametrize(
        "text,line",
        [
            ("p edge 3 1\ne 1 4\n", 2),
            ("e 1 2\n", 1),
            ("p edge x 1\n", 1),
            ("p edge 3 1\n\ne 1\n", 3),
            ("p edge 3 1\ne 1 1\n", 2),
            ("p edge 3 1\nq 1 2\n", 2),
            ("p edge 3 1\ne 1 2 0\n", 2),
        ],
    )
    def test_errors_carry_line(self, text, line):
        with pytest.raises(ParseError) as err:
            parse_dimacs(text)
        assert err.value.line == line

    def test_missing_header(self):
        with pytest.raises(ParseError):
            parse_dimacs("c nothing here\n")

    @settings(max_examples=300, deadline=None)
    @given(st.text(alphabet="pec a0123456789-\n edgx", max_size=80))
    def test_fuzz_never_crashes(self, text):
        try:
            parse_dimacs(text)
        except ParseError:
            pass

    def test_write_roundtrip(self, rng):
        for _ in range(20):
            G = random_graph(rng, rng.randint(1, 8))
            assert parse_dimacs(write_dimacs(G)) == G
            D = WeightedDigraph.symmetric(G, {e: rng.randint(1, 5) for e in G.edges})
            if G.m:
                assert parse_dimacs(write_dimacs(D)).arcs == D.arcs


class TestSquare:
    def test_path(self):
        assert square(Graph(3, frozenset({(1, 2), (2, 3)}))).edges == {(1, 2), (2, 3), (1, 3)}

    @pytest.mark.parametrize("n", [1, 3, 5])
    def test_complete_fixed(self, n):
        assert square(complete(n)) == complete(n)

    def test_against_networkx(self, rng):
        for _ in range(30):
            G = random_graph(rng, rng.randint(1, 10), 0.3)
            S = square(G)
            assert S.max_degree <= G.max_degree**2
            dist = dict(nx.all_pairs_shortest_path_length(G.to_networkx(), cutoff=2))
            want = {(u, v) for u in G.vertices for v in G.vertices if u < v and v in dist[u]}
            assert set(S.edges) == want


class TestGreedy:
    def test_cycle(self):
        assert len(greedy_independent_in_square(cycle(6))) >= 1

    def test_edgeless(self):
        assert len(greedy_independent_in_square(Graph(5, frozenset()), target=5)) == 5

    def test_cubic(self):
        for seed in range(10):
            G = random_regular(3, 30, seed)
            I = greedy_independent_in_square(G)
            assert len(I) >= 3 and not I.shortfall
            assert square(G).is_independent(I)

    def test_shortfall(self):
        I = greedy_independent_in_square(complete(4), target=2)
        assert len(I) == 1 and I.shortfall


class TestComplementMatching:
    def test_c4(self):
        assert sorted(complement_matching(cycle(4))) == [(1, 3), (2, 4)]

    def test_k4(self):
        assert complement_matching(complete(4)) == []

    def test_sparse_random(self, rng):
        for _ in range(30):
            n = 2 * rng.randint(2, 8)
            G = random_graph(rng, n, 0.25)
            M = complement_matching(G)
            used = [v for e in M for v in e]
            assert len(used) == len(set(used))
            assert not any(G.has_edge(u, v) for u, v in M)
            assert len(M) >= n // 2 - 3 * G.average_degree

    def test_declared_degree_too_small(self):
        with pytest.raises(StructuralError):
            complement_matching(complete(8), d=0.5)


class TestDecomposition:
    def test_cycle(self):
        dec = decompose_avg_degree(cycle(6), 2)
        assert dec.ok and not dec.Y and len(dec.A) >= 2
        assert check_decomposition(cycle(6), dec) == []

    def test_k4_gives_single_vertex(self):
        dec = decompose_avg_degree(complete(4), 3)
        assert len(dec.A) == 1

    def test_too_dense(self):
        assert not decompose_avg_degree(complete(5), 2).ok

    def test_bad_threshold(self):
        assert not decompose_avg_degree(cycle(6), 2, {"T": 3}).ok

    def test_cubic_contract(self):
        for seed in range(10):
            G = random_regular(3, 12, seed)
            dec = decompose_avg_degree(G, 3)
            assert dec.ok
            assert check_decomposition(G, dec) == []

    def test_high_degree_hub(self):
        # a star plus a long path: the centre lands in Y
        edges = {(1, v) for v in range(2, 12)} | {(v, v + 1) for v in range(12, 40)}
        G = Graph(40, frozenset(edges))
        d = math.ceil(G.average_degree)
        dec = decompose_avg_degree(G, d)
        assert 1 in dec.Y
        assert dec.ok and check_decomposition(G, dec) == []


class TestMultigraph:
    def test_parallel_limit(self):
        LabeledMultigraph(2, [(1, 2, (1, 2))] * 4)
        with pytest.raises(StructuralError):
            LabeledMultigraph(2, [(1, 2, (1, 2))] * 5)

    def test_loops(self):
        H = LabeledMultigraph(2, [(1, 1, (1, 3)), (1, 2, (1, 2))])
        assert H.loops == [0] and H.labels == {1, 2, 3}
