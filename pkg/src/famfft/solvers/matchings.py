"""Perfect matchings through label-disjoint cycle covers.

Pair up the 2n vertices along non-edges (a matching of the complement) and
contract each pair.  An edge {a, b} of G becomes an edge between the pairs of
a and b labelled {a, b}.  Perfect matchings of G are exactly the edge sets of
the contracted multigraph that form a cycle cover whose labels partition V.

Cycles are generated once each: a walk starts at its smallest vertex, never
visits a smaller one, and its first edge must have a smaller identifier than
its last, which removes the reversed copy.  With a variable per original
vertex, the coefficient of the full monomial in P^t is t! times the number of
covers by t cycles.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .. import domain
from ..domain import CyclicLayout
from ..errors import StructuralError
from ..graphs import Graph, LabeledMultigraph, complement_matching
from ..kronecker import MultiCircuit, circuit_evaluator


@dataclass
class MatchingCount:
    total: int
    per_t: dict = field(default_factory=dict)
    selfloop_cases: int = 0
    domain_size: int = 0
    moduli: tuple = ()


def contract_for_matchings(G: Graph, d: float | None = None) -> LabeledMultigraph:
    """Contract pairs of a complement matching; leftover vertices pair up in order."""
    if G.n % 2:
        raise StructuralError("odd number of vertices")
    matched = complement_matching(G, d)
    used = {v for e in matched for v in e}
    rest = [v for v in G.vertices if v not in used]
    pairs = list(matched) + [(rest[i], rest[i + 1]) for i in range(0, len(rest), 2)]
    where = {}
    for i, (a, b) in enumerate(pairs, start=1):
        where[a] = i
        where[b] = i
    edges = tuple((where[a], where[b], (a, b)) for a, b in sorted(G.edges))
    return LabeledMultigraph(len(pairs), edges, tuple(pairs))


def _subcase(H: LabeledMultigraph, chosen_loops: set[int]):
    """Drop the vertices covered by chosen loops and every other loop."""
    gone = {H.edges[i][0] for i in chosen_loops}
    keep = [v for v in range(1, H.n + 1) if v not in gone]
    vid = {v: i for i, v in enumerate(keep, start=1)}
    labels = sorted({x for v in keep for x in H.pairs[v - 1]}) if H.pairs else sorted(
        {x for u, w, lab in H.edges if u in vid and w in vid for x in lab}
    )
    lid = {x: i for i, x in enumerate(labels, start=1)}
    edges = []
    for u, w, lab in H.edges:
        if u != w and u in vid and w in vid:
            a, b = sorted(lab)
            edges.append((vid[u], vid[w], lid[a], lid[b]))
    return len(keep), len(labels), edges


def cycle_circuit(nv: int, nlab: int, edges: list[tuple[int, int, int, int]]) -> MultiCircuit:
    """Sum over canonical closed walks of length <= nv of the product of edge labels."""
    # directed copies: (tail, head, edge id, label a, label b)
    arcs = []
    for eid, (u, w, a, b) in enumerate(edges):
        arcs.append((u, w, eid, a, b))
        arcs.append((w, u, eid, a, b))
    out_of = {v: [arc for arc in arcs if arc[0] == v] for v in range(1, nv + 1)}

    def run(val, zero, add, mul):
        total = zero
        for s in range(1, nv + 1):
            # state: (current vertex, first edge id) -> accumulated value
            state = {}
            for _, h, eid, a, b in out_of[s]:
                if h > s:
                    key = (h, eid)
                    v = val(a, b)
                    state[key] = v if key not in state else add(state[key], v)
            for _ in range(1, nv):
                if not state:
                    break
                nxt = {}
                for (cur, first), acc in state.items():
                    for _, h, eid, a, b in out_of[cur]:
                        if h == s:
                            if eid > first:
                                total = add(total, mul(acc, val(a, b)))
                        elif h > s:
                            key = (h, first)
                            term = mul(acc, val(a, b))
                            nxt[key] = term if key not in nxt else add(nxt[key], term)
                state = nxt
        return total

    walks = run(lambda a, b: 1, 0, lambda x, y: x + y, lambda x, y: x * y)

    def evaluate(xs, z, p):
        zero = np.zeros((1, 1), dtype=np.int64)
        return run(
            lambda a, b: xs[a - 1] * xs[b - 1] % p,
            zero,
            lambda x, y: (x + y) % p,
            lambda x, y: x * y % p,
        )

    return MultiCircuit(nlab, evaluate, (4, 2 * nv), (0, 0), walks)


def count_perfect_matchings(G: Graph, d: float | None = None) -> MatchingCount:
    if G.n % 2:
        return MatchingCount(0)
    if G.n == 0:
        return MatchingCount(1, {0: 1}, 1)
    H = contract_for_matchings(G, d)
    loops = H.loops
    per_t: dict[int, int] = {}
    cases = 0
    size = 0
    moduli: set = set()
    for r in range(len(loops) + 1):
        for chosen in itertools.combinations(loops, r):
            cases += 1
            nv, nlab, edges = _subcase(H, set(chosen))
            if nv == 0:
                per_t[r] = per_t.get(r, 0) + 1
                continue
            circ = cycle_circuit(nv, nlab, edges)
            if circ.coef_sum == 0:
                continue
            # every cycle has length >= 2 and so carries >= 4 labels
            for t in range(1, nv // 2 + 1):
                factors = [circ] * t
                layout = CyclicLayout.build(nlab, (), [c.profile() for c in factors])
                bound = circ.coef_sum**t
                coeffs = domain.all_z_coefficients(layout, circuit_evaluator(factors, nlab), bound)
                size = max(size, layout.size)
                moduli.update(pr.q for pr in domain.choose_primes(layout, bound))
                c = coeffs[0]
                f = math.factorial(t)
                if c % f:
                    raise ArithmeticError(f"coefficient {c} for t={t} is not divisible by {t}!")
                if c:
                    per_t[t + r] = per_t.get(t + r, 0) + c // f
    per_t = {t: v for t, v in sorted(per_t.items()) if v}
    return MatchingCount(sum(per_t.values()), per_t, cases, size, tuple(sorted(moduli)))
