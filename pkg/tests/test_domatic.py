import networkx as nx
import pytest

from famfft import oracle
from famfft.graphs import Graph
from famfft.solvers.domatic import domatic_number, domatic_number_info, domatic_system, dominating_sets

from conftest import complete, cycle, from_nx, random_graph


@pytest.mark.parametrize(
    "G,value",
    [(cycle(4), 2), (complete(4), 4), (from_nx(nx.star_graph(3)), 2), (Graph(3, frozenset({(1, 2)})), 1), (Graph(1, frozenset()), 1)],
)
def test_examples(G, value):
    assert domatic_number(G) == value
    assert domatic_number(G, tier="fft2n") == value


def test_dominating_sets_c4():
    sets = dominating_sets(cycle(4))
    assert all(oracle.is_dominating(cycle(4), s) for s in sets)
    assert len(sets) == 2**4 - 1 - 4 - 0  # every pair dominates C4, singletons do not


def test_system_is_valid_for_every_dominating_set(rng):
    for _ in range(20):
        G = random_graph(rng, rng.randint(4, 8), 0.4)
        S = domatic_system(G)
        assert S.q == G.max_degree + 2 or S.p == 0
        for D in dominating_sets(G):
            assert S.admits(D)


def test_random_against_oracle(rng):
    for _ in range(15):
        G = random_graph(rng, rng.randint(2, 7))
        res = domatic_number_info(G)
        assert res.value == oracle.brute_domatic(G)
        assert res.tier == "infants"
