"""Travelling salesman through closed-walk polynomials.

The walk polynomial has one monomial x_{i_2} ... x_{i_n} x_1 z^{weight} per
closed walk 1 -> i_2 -> ... -> i_n -> 1.  A walk's monomial is x_1 ... x_n
exactly when the walk is a Hamiltonian cycle, so the optimum is the smallest
z-degree carried by that monomial.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import FamilySystemError, InfantViolationError
from ..graphs import (
    Graph,
    WeightedDigraph,
    decompose_avg_degree,
    greedy_independent_in_square,
)
from ..infants import FamilySystem, detect_min_k_infants, pad_families
from ..kronecker import MultiCircuit, StandardEncoding, detect_min_k_stream


@dataclass
class TspResult:
    optimum: int | None
    tier: str
    guess_count: int = 1
    cycle_multiplicity: int = 0
    fallbacks: list = field(default_factory=list)
    domain_size: int = 0
    moduli: tuple = ()
    guesses: list = field(default_factory=list)
    details: dict = field(default_factory=dict)

    @property
    def feasible(self) -> bool:
        return self.optimum is not None


def _walk_summary(G: WeightedDigraph, forbidden) -> tuple[int, int, int]:
    """(number of walks, lightest, heaviest) over anchored closed walks."""
    n = G.n
    arcs = [(u, v, w) for (u, v), w in G.arcs.items() if (u, v) not in forbidden]
    count = {1: 1}
    lo = {1: 0}
    hi = {1: 0}
    for _ in range(n):
        c2, l2, h2 = {}, {}, {}
        for u, v, w in arcs:
            if u in count:
                c2[v] = c2.get(v, 0) + count[u]
                l2[v] = min(l2.get(v, math.inf), lo[u] + w)
                h2[v] = max(h2.get(v, -1), hi[u] + w)
        count, lo, hi = c2, l2, h2
    if 1 not in count:
        return 0, 0, 0
    return count[1], lo[1], hi[1]


def closed_walk_circuit(G: WeightedDigraph, forbidden=frozenset(), hints: dict | None = None) -> MultiCircuit:
    """Circuit for the closed-walk polynomial, skipping ``forbidden`` transitions."""
    n = G.n
    forbidden = frozenset(forbidden)
    heads: dict[int, list[tuple[int, int]]] = {v: [] for v in range(1, n + 1)}
    for (u, v), w in sorted(G.arcs.items()):
        if (u, v) not in forbidden:
            heads[v].append((u, w))
    weights = sorted({w for lst in heads.values() for _, w in lst})
    walks, lo, hi = _walk_summary(G, forbidden)

    def evaluate(xs, z, p):
        z = np.asarray(z, dtype=np.int64) % p
        zw = {}
        for w in weights:
            acc, base, e = np.ones_like(z), z, w
            while e:
                if e & 1:
                    acc = acc * base % p
                base = base * base % p
                e >>= 1
            zw[w] = acc
        Q = {1: np.ones((1, 1), dtype=np.int64)}
        for step in range(n):
            targets = (1,) if step == n - 1 else range(1, n + 1)
            nxt = {}
            for v in targets:
                acc = None
                for u, w in heads[v]:
                    if u in Q:
                        term = Q[u] * zw[w] % p
                        acc = term if acc is None else (acc + term) % p
                if acc is not None:
                    nxt[v] = acc * xs[v - 1] % p
            Q = nxt
            if not Q:
                break
        out = Q.get(1)
        if out is None:
            return np.zeros((1, 1), dtype=np.int64)
        return out

    return MultiCircuit(n, evaluate, (n, n), (lo, hi), walks, dict(hints or {}))


def _result(det, tier, M, **kw) -> TspResult:
    return TspResult(det.k, tier, cycle_multiplicity=det.coefficient, domain_size=det.domain_size, moduli=det.moduli, **kw)


def tsp_fft(G: WeightedDigraph) -> TspResult:
    """Plain tier: one streaming detection over the 2^n-sized domain."""
    if G.n < 2:
        return TspResult(None, "fft2n")
    circ = closed_walk_circuit(G)
    if circ.coef_sum == 0:
        return TspResult(None, "fft2n", cycle_multiplicity=0)
    det = detect_min_k_stream([circ], StandardEncoding(G.n, G.M))
    return _result(det, "fft2n", G.M)


def max_degree_system(H: Graph) -> FamilySystem | None:
    """Families N[i] around an independent set of H^2, infant i first."""
    n, delta = H.n, H.max_degree
    if n == 0 or delta == 0:
        return None
    q = delta + 1
    target = math.ceil(n / (delta * delta + 1))
    chosen = list(greedy_independent_in_square(H, target=target))
    chosen = chosen[: n // q]
    if not chosen:
        return None
    raw = [(i,) + tuple(sorted(H.neighbors(i))) for i in chosen]
    return pad_families(raw, n, q)


def _walk_hints(n: int) -> dict:
    # each infant visit is preceded by a distinct relative visit
    return {"max_col0": n // 2}


def tsp_bounded_max_degree(G: WeightedDigraph, max_degree_cap: int | None = None) -> TspResult:
    """Infants tier with families N[i] around an independent set of G^2."""
    if G.n < 2:
        return TspResult(None, "infants-max")
    H = G.underlying()
    if max_degree_cap is not None and H.max_degree > max_degree_cap:
        res = tsp_fft(G)
        res.fallbacks.append(f"max degree {H.max_degree} above cap {max_degree_cap}")
        return res
    system = max_degree_system(H)
    if system is None:
        res = tsp_fft(G)
        res.fallbacks.append("no family fits")
        return res
    circ = closed_walk_circuit(G, hints=_walk_hints(G.n))
    if circ.coef_sum == 0:
        return TspResult(None, "infants-max", details={"p": system.p, "q": system.q})
    try:
        det = detect_min_k_infants([circ], system, d=G.M)
    except (FamilySystemError, InfantViolationError) as exc:
        res = tsp_fft(G)
        res.fallbacks.append(f"system rejected: {exc}")
        return res
    return _result(det, "infants-max", G.M, details={"p": system.p, "q": system.q, "free": len(system.leftover)})


def tsp_avg_degree(G: WeightedDigraph, d: int | None = None, config: dict | None = None) -> TspResult:
    """Infants tier for bounded average degree, minimising over guesses of A cap Y'.

    Y holds the high-degree vertices and A an independent set of (G - Y)^2.
    A guess S lists the vertices of A entered from Y on the optimal cycle;
    the remaining A' = A - S become infants with families N_{G-Y}[i], and
    transitions Y -> A' are deleted so every surviving walk respects them.
    Families are padded to the largest of them (at most 2d + 1) and at most
    floor(c * n) of them are kept.
    """
    if G.n < 2:
        return TspResult(None, "infants-avg")
    H = G.underlying()
    if d is None:
        d = max(1, math.ceil(H.average_degree))
    dec = decompose_avg_degree(H, d, config)
    if not dec.ok:
        res = tsp_fft(G)
        res.fallbacks.append(f"decomposition failed: {dec.reason}")
        return res
    Hy = H.without(dec.Y)
    A = sorted(dec.A)
    # families are padded to the largest neighbourhood, never above 2d + 1
    q = max((Hy.degree(a) + 1 for a in A), default=2 * d + 1)
    # at most c * n families, so p * q <= n
    cap = math.floor(dec.config["c"] * G.n)
    lower = G.n * G.min_weight
    best: TspResult | None = None
    guesses = []
    stop = False
    for size in range(len(dec.Y) + 1):
        for S in itertools.combinations(A, size):
            A1 = [a for a in A if a not in S]
            # dropping families keeps the system valid
            A1 = A1[:cap]
            raw = [(a,) + tuple(sorted(Hy.neighbors(a))) for a in A1]
            system = pad_families(raw, G.n, q if raw else None)
            forbidden = {(y, a) for y in dec.Y for a in A if a not in S and (y, a) in G.arcs}
            circ = closed_walk_circuit(G, forbidden, _walk_hints(G.n))
            if circ.coef_sum == 0:
                guesses.append((S, None))
                continue
            det = detect_min_k_infants([circ], system, d=G.M)
            guesses.append((S, det.k))
            if det.found and (best is None or det.k < best.optimum):
                best = _result(det, "infants-avg", G.M)
                best.details = {"p": system.p, "q": system.q, "free": len(system.leftover)}
            if best is not None and best.optimum == lower:
                stop = True
                break
        if stop:
            break
    if best is None:
        best = TspResult(None, "infants-avg")
    if cap == 0:
        best.fallbacks.append(f"c * n = {dec.config['c'] * G.n:.2f} admits no family; ran with an empty system")
    best.guess_count = len(guesses)
    best.guesses = guesses
    best.details.update({"A": len(A), "Y": len(dec.Y), "d": d})
    return best
