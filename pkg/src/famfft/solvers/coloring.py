"""Chromatic number and list colouring with preferences.

Colourings are partitions of the vertex set into independent sets, one per
colour.  In sparse graphs a preference pair (u, v) asks that some vertex of
N[u] shares the colour of v; an exchange argument shows that such pairs never
change list-colourability, and they turn v into an infant whose relatives are
N[u].
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field

from ..errors import FamilySystemError
from ..graphs import Graph, decompose_avg_degree, square
from ..infants import FamilySystem, pad_families, partition_solve_infants
from ..kronecker import PartitionProblem, partition_solve


def independent_sets(G: Graph, allowed=None) -> list[tuple[int, ...]]:
    """All independent sets (the empty set included) inside ``allowed``."""
    verts = [v for v in G.vertices if allowed is None or v in allowed]
    out: list[tuple[int, ...]] = []

    def grow(i, current, banned):
        out.append(tuple(current))
        for j in range(i, len(verts)):
            v = verts[j]
            if v not in banned:
                current.append(v)
                grow(j + 1, current, banned | G.neighbors(v))
                current.pop()

    grow(0, [], frozenset())
    return out


def k_colorable(G: Graph, k: int) -> bool:
    if G.n == 0:
        return True
    if k <= 0:
        return False
    if k >= G.n:
        return True
    fam = independent_sets(G)
    return partition_solve(PartitionProblem(G.n, k, (fam,) * k))


def chromatic_number(G: Graph) -> int:
    """Least k for which [n] splits into k independent sets."""
    if G.n == 0:
        return 0
    fam = independent_sets(G)
    k = 1
    while not partition_solve(PartitionProblem(G.n, k, (fam,) * k)):
        k += 1
    return k


@dataclass(frozen=True)
class ColoringInstance:
    graph: Graph
    k: int
    lists: dict = field(default_factory=dict)
    preferences: tuple = ()

    def __post_init__(self):
        lists = {v: frozenset(self.lists.get(v, range(1, self.k + 1))) for v in self.graph.vertices}
        object.__setattr__(self, "lists", lists)
        object.__setattr__(self, "preferences", tuple(tuple(p) for p in self.preferences))
        for v, L in lists.items():
            if not L <= set(range(1, self.k + 1)):
                raise ValueError(f"list of {v} uses colours outside 1..{self.k}")
        problems = self.violations()
        if problems:
            raise ValueError("; ".join(problems))

    def violations(self) -> list[str]:
        out = []
        flat = [x for pr in self.preferences for x in pr]
        if len(set(flat)) != len(flat):
            out.append("preference vertices are not distinct")
        elif flat and not square(self.graph).is_independent(flat):
            out.append("preference vertices are not independent in G^2")
        for u, v in self.preferences:
            if self.lists[u] != self.lists[v]:
                out.append(f"lists of {u} and {v} differ")
        return out


def preference_families(inst: ColoringInstance) -> dict[int, list[tuple[int, ...]]]:
    """Per colour c: independent sets inside {v : c in L_v} meeting every preference."""
    G = inst.graph
    out = {}
    for c in range(1, inst.k + 1):
        allowed = {v for v in G.vertices if c in inst.lists[v]}
        fams = []
        for I in independent_sets(G, allowed):
            S = set(I)
            if all(v not in S or G.closed_neighborhood(u) & S for u, v in inst.preferences):
                fams.append(I)
        out[c] = fams
    return out


def preference_system(inst: ColoringInstance) -> FamilySystem:
    """Infant v_i with relatives N[u_i]; trailing pairs are dropped until p*q <= n."""
    G = inst.graph
    raw = [(v,) + tuple(sorted(G.closed_neighborhood(u))) for u, v in inst.preferences]
    while raw:
        q = max(len(f) for f in raw)
        if len(raw) * q <= G.n:
            return pad_families(raw, G.n, q)
        raw.pop()
    return FamilySystem(G.n, ())


def _disjoint_unions(F1, F2) -> list[tuple[int, ...]]:
    """One family standing for two colours; only needed when k > n."""
    out = {tuple(sorted(a + b)) for a in F1 for b in F2 if not set(a) & set(b)}
    return sorted(out)


def preference_colorable(inst: ColoringInstance) -> bool:
    """List colourability with preferences, decided in the infants tier."""
    G = inst.graph
    if G.n == 0:
        return True
    fams = [preference_families(inst)[c] for c in range(1, inst.k + 1)]
    while len(fams) > G.n:
        fams = [_disjoint_unions(fams[0], fams[1])] + fams[2:]
    problem = PartitionProblem(G.n, len(fams), tuple(fams))
    return partition_solve_infants(problem, preference_system(inst))


def _colorings(G: Graph, verts: list[int], k: int):
    """Proper k-colourings of G[verts] by backtracking."""
    col: dict[int, int] = {}

    def go(i):
        if i == len(verts):
            yield dict(col)
            return
        v = verts[i]
        taken = {col[u] for u in G.neighbors(v) if u in col}
        for c in range(1, k + 1):
            if c not in taken:
                col[v] = c
                yield from go(i + 1)
                del col[v]

    yield from go(0)


def chromatic_avg_degree_info(G: Graph, k: int, d: int | None = None, config: dict | None = None) -> tuple[bool, dict]:
    """Decide chi(G) <= k for bounded average degree; returns (answer, diagnostics)."""
    if d is None:
        d = max(1, math.ceil(G.average_degree))
    info: dict = {"d": d, "fallbacks": []}
    if G.n == 0:
        return True, info
    if k >= 2 * d:
        high = [v for v in G.vertices if G.degree(v) >= k]
        sub, _ = G.relabel(high)
        info["branch"] = "high-k"
        info["high"] = len(high)
        # every other vertex has fewer than k neighbours, so it always finds a free colour
        return k_colorable(sub, k), info
    dec = decompose_avg_degree(G, d, config)
    if not dec.ok:
        info["fallbacks"].append(f"decomposition failed: {dec.reason}")
        return k_colorable(G, k), info
    info["branch"] = "preferences"
    Y = sorted(dec.Y)
    rest = [v for v in G.vertices if v not in dec.Y]
    H, idx = G.relabel(rest)
    A = [idx[a] for a in sorted(dec.A)]
    info["Y"], info["A"], info["runs"], info["p"] = len(Y), len(A), 0, 0
    for colY in _colorings(G, Y, k):
        lists = {}
        for v in rest:
            taken = {colY[u] for u in G.neighbors(v) if u in colY}
            lists[idx[v]] = frozenset(range(1, k + 1)) - taken
        if any(not L for L in lists.values()):
            continue
        if not A:
            prefs = ()
        else:
            freq = Counter(lists[a] for a in A)
            top = max(freq.values())
            L = min((lst for lst, c in freq.items() if c == top), key=sorted)
            C = [a for a in A if lists[a] == L]
            if len(C) % 2:
                C = C[:-1]
            prefs = tuple(zip(C[0::2], C[1::2]))
        inst = ColoringInstance(H, k, lists, prefs)
        info["runs"] += 1
        info["p"] = max(info["p"], len(prefs))
        try:
            ok = preference_colorable(inst)
        except FamilySystemError as exc:  # pragma: no cover - system built above is valid
            info["fallbacks"].append(str(exc))
            ok = k_colorable(G, k)
        if ok:
            return True, info
    return False, info


def chromatic_avg_degree(G: Graph, k: int, d: int | None = None, config: dict | None = None) -> bool:
    return chromatic_avg_degree_info(G, k, d, config)[0]
