
import networkx as nx
import pytest

from famfft import oracle
from famfft.errors import StructuralError
from famfft.graphs import Graph
from famfft.solvers.matchings import contract_for_matchings, count_perfect_matchings

from conftest import complete, cycle, from_nx, petersen, random_graph


@pytest.mark.parametrize(
    "G,count",
    [
        (cycle(6), 2),
        (complete(4), 3),
        (from_nx(nx.complete_bipartite_graph(3, 3)), 6),
        (petersen(), 6),
        (complete(6), 15),
        (Graph(4, frozenset()), 0),
        (Graph(0, frozenset()), 1),
    ],
)
def test_fixed_points(G, count):
    assert count_perfect_matchings(G).total == count


def test_odd_order():
    assert count_perfect_matchings(cycle(5)).total == 0
    with pytest.raises(StructuralError):
        contract_for_matchings(cycle(5))


def test_contract_c4():
    H = contract_for_matchings(cycle(4))
    assert H.n == 2 and not H.loops
    assert H.labels == {1, 2, 3, 4}
    assert sorted(H.pairs) == [(1, 3), (2, 4)]


def test_contract_k4_has_loops():
    H = contract_for_matchings(complete(4))
    assert H.n == 2 and len(H.loops) <= 2


def test_random_against_oracle(rng):
    for _ in range(30):
        n = 2 * rng.randint(1, 5)
        G = random_graph(rng, n, rng.uniform(0.2, 0.7))
        res = count_perfect_matchings(G)
        assert res.total == oracle.brute_count_matchings(G)
        assert res.total == sum(res.per_t.values())
        assert all(t <= n // 2 for t in res.per_t)


def test_cycle_counts_against_covers(rng):
    for _ in range(25):
        n = 2 * rng.randint(1, 5)
        G = random_graph(rng, n, rng.uniform(0.2, 0.8))
        H = contract_for_matchings(G)
        res = count_perfect_matchings(G)
        for t in range(1, H.n + 1):
            assert res.per_t.get(t, 0) == oracle.brute_cycle_covers(H, t)
        assert res.selfloop_cases == 2 ** len(H.loops)
