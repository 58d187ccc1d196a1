import random

import networkx as nx
import pytest

from famfft.graphs import Graph, WeightedDigraph


def from_nx(g) -> Graph:
    index = {v: i for i, v in enumerate(sorted(g.nodes()), start=1)}
    return Graph(len(index), frozenset((index[u], index[v]) for u, v in g.edges()))


def cycle(n):
    return from_nx(nx.cycle_graph(n))


def complete(n):
    return from_nx(nx.complete_graph(n))


def petersen():
    return from_nx(nx.petersen_graph())


def random_graph(rng: random.Random, n: int, p: float | None = None) -> Graph:
    p = rng.random() if p is None else p
    return Graph(n, frozenset((u, v) for u in range(1, n + 1) for v in range(u + 1, n + 1) if rng.random() < p))


def random_regular(d: int, n: int, seed: int) -> Graph:
    return from_nx(nx.random_regular_graph(d, n, seed=seed))


def random_digraph(rng: random.Random, n: int, M: int, extra: int | None = None) -> WeightedDigraph:
    """Strongly connected: a planted Hamiltonian cycle plus random arcs."""
    perm = list(range(1, n + 1))
    rng.shuffle(perm)
    arcs = {}
    for a, b in zip(perm, perm[1:] + perm[:1]):
        arcs[(a, b)] = rng.randint(1, M)
    for _ in range(n if extra is None else extra):
        a, b = rng.sample(range(1, n + 1), 2)
        arcs[(a, b)] = rng.randint(1, M)
    return WeightedDigraph(n, arcs, M)


@pytest.fixture
def rng():
    return random.Random(20240601)


def random_preference_instance(rng: random.Random, G: Graph, k: int, pairs: int):
    """Random lists plus up to ``pairs`` preference pairs that satisfy the validity rules."""
    from famfft.graphs import square

    lists = {v: frozenset(c for c in range(1, k + 1) if rng.random() < 0.7) or frozenset({1}) for v in G.vertices}
    S = square(G)
    prefs, used = [], set()
    for _ in range(pairs):
        cands = [
            (u, v)
            for u in G.vertices
            for v in G.vertices
            if u != v and not {u, v} & used and S.is_independent(used | {u, v})
        ]
        if not cands:
            break
        u, v = rng.choice(cands)
        used |= {u, v}
        lists[v] = lists[u]
        prefs.append((u, v))
    return lists, tuple(prefs)
