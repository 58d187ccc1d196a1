"""Domatic number as a partition problem over dominating sets.

Every dominating set meets N[i], so for an independent set I of G^2 the
neighbourhoods N[i] are disjoint and any extra vertex placed in front of N[i]
is an infant: whenever a dominating set contains it, a relative from N[i] is
there too.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from ..errors import FamilySystemError, InfantViolationError
from ..graphs import Graph, greedy_independent_in_square
from ..infants import FamilySystem, pad_families, partition_solve_infants
from ..kronecker import PartitionProblem, partition_solve


def dominating_sets(G: Graph) -> list[tuple[int, ...]]:
    n = G.n
    closed = [0] * (n + 1)
    for v in G.vertices:
        closed[v] = sum(1 << (u - 1) for u in G.closed_neighborhood(v))
    full = (1 << n) - 1
    out = []
    for mask in range(1, full + 1):
        cover = 0
        m = mask
        while m:
            low = m & -m
            cover |= closed[low.bit_length()]
            m ^= low
        if cover == full:
            out.append(tuple(v for v in G.vertices if mask >> (v - 1) & 1))
    return out


def domatic_system(G: Graph) -> FamilySystem:
    """Families (extra, N[i]) over a greedy independent set of G^2."""
    n, delta = G.n, G.max_degree
    if n == 0:
        return FamilySystem(0, ())
    q = delta + 2
    centres = list(greedy_independent_in_square(G, target=math.ceil(n / (delta * delta + 2))))
    centres = centres[: n // q]
    used = set().union(*(G.closed_neighborhood(i) for i in centres)) if centres else set()
    spare = [v for v in G.vertices if v not in used]
    raw = []
    for i, extra in zip(centres, spare):
        raw.append((extra,) + tuple(sorted(G.closed_neighborhood(i))))
    if not raw:
        return FamilySystem(n, ())
    return pad_families(raw, n, q)


@dataclass
class DomaticResult:
    value: int
    tier: str
    fallbacks: list = field(default_factory=list)
    system: FamilySystem | None = None


def domatic_number_info(G: Graph, tier: str = "infants") -> DomaticResult:
    if G.n == 0:
        return DomaticResult(0, tier)
    fam = dominating_sets(G)
    fallbacks = []
    system = None
    if tier == "infants":
        try:
            system = domatic_system(G)
        except FamilySystemError as exc:
            fallbacks.append(f"system rejected: {exc}")
            tier = "fft2n"
        else:
            if not system.p:
                fallbacks.append("no family fits; ran with an empty system")

    def feasible(k):
        nonlocal tier
        problem = PartitionProblem(G.n, k, (fam,) * k)
        if tier == "infants":
            try:
                return partition_solve_infants(problem, system)
            except (FamilySystemError, InfantViolationError) as exc:
                fallbacks.append(f"system rejected: {exc}")
                tier = "fft2n"
        return partition_solve(problem)

    best = 1
    for k in range(2, G.min_degree + 2):
        if not feasible(k):
            break
        best = k
    return DomaticResult(best, tier, fallbacks, system)


def domatic_number(G: Graph, tier: str = "infants") -> int:
    """Largest k with V split into k dominating sets."""
    return domatic_number_info(G, tier).value
