"""Brute-force reference answers.

Nothing here touches the algebraic machinery; only the graph containers are
shared.  Each routine refuses inputs above its budget instead of running for
an unbounded time.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

from .errors import BudgetExceeded
from .graphs import Graph, LabeledMultigraph, WeightedDigraph


@dataclass(frozen=True)
class OracleBudget:
    permutation_tsp: int = 10
    held_karp: int = 18
    coloring: int = 12
    domatic: int = 12
    matchings: int = 14
    cycle_covers: int = 5
    list_coloring: int = 12


BUDGET = OracleBudget()


def _guard(n: int, limit: int, what: str) -> None:
    if n > limit:
        raise BudgetExceeded(f"{what}: n={n} exceeds oracle budget {limit}")


def held_karp(G: WeightedDigraph, budget: OracleBudget = BUDGET) -> int | None:
    """Minimum Hamiltonian cycle weight by subset DP, or None if there is none."""
    n = G.n
    _guard(n, budget.held_karp, "held_karp")
    if n < 2:
        return None
    INF = math.inf
    w = [[INF] * n for _ in range(n)]
    for (u, v), c in G.arcs.items():
        w[u - 1][v - 1] = c
    full = 1 << (n - 1)
    # dp[S][j]: cheapest path 0 -> j visiting exactly S (bits for vertices 1..n-1)
    dp = [[INF] * n for _ in range(full)]
    for j in range(1, n):
        dp[1 << (j - 1)][j] = w[0][j]
    for S in range(1, full):
        row = dp[S]
        for j in range(1, n):
            cur = row[j]
            if cur == INF or not S >> (j - 1) & 1:
                continue
            for k in range(1, n):
                if S >> (k - 1) & 1:
                    continue
                c = cur + w[j][k]
                T = S | 1 << (k - 1)
                if c < dp[T][k]:
                    dp[T][k] = c
    best = min(dp[full - 1][j] + w[j][0] for j in range(1, n))
    return None if best == INF else int(best)


def brute_tsp(G: WeightedDigraph, budget: OracleBudget = BUDGET) -> int | None:
    n = G.n
    _guard(n, budget.permutation_tsp, "brute_tsp")
    if n < 2:
        return None
    best = None
    for perm in itertools.permutations(range(2, n + 1)):
        tour = (1,) + perm + (1,)
        total = 0
        for a, b in zip(tour, tour[1:]):
            c = G.arcs.get((a, b))
            if c is None:
                break
            total += c
        else:
            if best is None or total < best:
                best = total
    return best


def is_proper_coloring(G: Graph, colors: dict) -> bool:
    return all(colors[u] != colors[v] for u, v in G.edges)


def brute_chromatic(G: Graph, budget: OracleBudget = BUDGET) -> int:
    """Backtracking over colour assignments; new colours are opened in order."""
    n = G.n
    _guard(n, budget.coloring, "brute_chromatic")
    if n == 0:
        return 0
    order = sorted(G.vertices, key=lambda v: -G.degree(v))

    def colorable(k):
        col = {}

        def go(i, used):
            if i == n:
                return True
            v = order[i]
            taken = {col[u] for u in G.neighbors(v) if u in col}
            for c in range(min(used + 1, k)):
                if c not in taken:
                    col[v] = c
                    if go(i + 1, max(used, c + 1)):
                        return True
                    del col[v]
            return False

        return go(0, 0)

    k = 1
    while not colorable(k):
        k += 1
    return k


def brute_list_coloring(G: Graph, lists: dict, preferences: Sequence[tuple[int, int]] = (), budget: OracleBudget = BUDGET) -> bool:
    """Is there a proper colouring with colour(v) in lists[v] for all v?

    With ``preferences`` each pair (u, v) also needs some w in N[u] with the
    colour of v.
    """
    _guard(G.n, budget.list_coloring, "brute_list_coloring")
    verts = list(G.vertices)
    col: dict = {}

    def ok_prefs():
        return all(any(col[w] == col[v] for w in G.closed_neighborhood(u)) for u, v in preferences)

    def go(i):
        if i == len(verts):
            return ok_prefs()
        v = verts[i]
        for c in sorted(lists[v]):
            if all(col.get(u) != c for u in G.neighbors(v)):
                col[v] = c
                if go(i + 1):
                    return True
                del col[v]
        return False

    return go(0)


def is_dominating(G: Graph, S) -> bool:
    S = set(S)
    return all(v in S or G.neighbors(v) & S for v in G.vertices)


def brute_domatic(G: Graph, budget: OracleBudget = BUDGET) -> int:
    """Largest k such that V splits into k dominating sets (exhaustive)."""
    n = G.n
    _guard(n, budget.domatic, "brute_domatic")
    if n == 0:
        return 0
    best = 1
    for k in range(2, G.min_degree + 2):
        found = False
        # symmetry: vertex i may only open class <= max used + 1
        assign = [0] * (n + 1)

        def go(v, used):
            nonlocal found
            if v > n:
                if used == k and all(is_dominating(G, [u for u in G.vertices if assign[u] == c]) for c in range(k)):
                    found = True
                return
            for c in range(min(used + 1, k)):
                assign[v] = c
                go(v + 1, max(used, c + 1))
                if found:
                    return

        go(1, 0)
        if not found:
            break
        best = k
    return best


def brute_count_matchings(G: Graph, budget: OracleBudget = BUDGET) -> int:
    """Perfect matchings, pairing the lowest unmatched vertex each time."""
    _guard(G.n, budget.matchings, "brute_count_matchings")

    def count(rest: frozenset) -> int:
        if not rest:
            return 1
        v = min(rest)
        others = rest - {v}
        return sum(count(others - {u}) for u in G.neighbors(v) if u in others)

    return count(frozenset(G.vertices))


def brute_cycle_covers(H: LabeledMultigraph, t: int, budget: OracleBudget = BUDGET) -> int:
    """Edge subsets forming a cycle cover with t cycles and disjoint labels.

    Every vertex must have degree 2 (a self-loop counts twice).
    """
    _guard(H.n, budget.cycle_covers, "brute_cycle_covers")
    E = H.edges
    total = 0
    # a cycle cover of n vertices has exactly n edges
    for sub in itertools.combinations(range(len(E)), H.n):
        deg = [0] * (H.n + 1)
        seen = set()
        clash = False
        for i in sub:
            u, v, lab = E[i]
            deg[u] += 1
            deg[v] += 1
            if seen & lab:
                clash = True
                break
            seen |= lab
        if clash or any(deg[v] != 2 for v in range(1, H.n + 1)):
            continue
        # count components
        parent = list(range(H.n + 1))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for i in sub:
            u, v, _ = E[i]
            parent[find(u)] = find(v)
        comps = len({find(v) for v in range(1, H.n + 1)})
        if comps == t:
            total += 1
    return total


def schoolbook_multiply(p: Sequence[int], r: Sequence[int]) -> list[int]:
    if not p or not r:
        return []
    out = [0] * (len(p) + len(r) - 1)
    for i, a in enumerate(p):
        if a:
            for j, b in enumerate(r):
                out[i + j] += a * b
    return out


def closed_walks(G: WeightedDigraph, forbidden=frozenset()) -> list[tuple[tuple[int, ...], int]]:
    """All closed walks 1 -> i_2 -> ... -> i_n -> 1 as (visited heads, weight)."""
    n = G.n
    _guard(n, BUDGET.permutation_tsp, "closed_walks")
    out = []

    def go(path, weight):
        if len(path) == n:
            c = G.arcs.get((path[-1], 1))
            if c is not None and (path[-1], 1) not in forbidden:
                out.append((tuple(path[1:]) + (1,), weight + c))
            return
        for (a, b), c in G.arcs.items():
            if a == path[-1] and (a, b) not in forbidden:
                go(path + [b], weight + c)

    go([1], 0)
    return out
