"""Graph types, DIMACS I/O and the structural helpers used by the solvers.

Vertices are numbered 1..n throughout.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable

import networkx as nx

from .errors import ParseError, StructuralError


def _edge(u: int, v: int) -> tuple[int, int]:
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class Graph:
    n: int
    edges: frozenset = frozenset()

    def __post_init__(self):
        es = frozenset(_edge(u, v) for u, v in self.edges)
        for u, v in es:
            if u == v:
                raise ValueError(f"self-loop at {u}")
            if not (1 <= u <= self.n and 1 <= v <= self.n):
                raise ValueError(f"edge ({u}, {v}) outside [1, {self.n}]")
        object.__setattr__(self, "edges", es)
        adj = {v: set() for v in range(1, self.n + 1)}
        for u, v in es:
            adj[u].add(v)
            adj[v].add(u)
        object.__setattr__(self, "_adj", {v: frozenset(s) for v, s in adj.items()})

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "Graph":
        return cls(n, frozenset(edges))

    @property
    def vertices(self) -> range:
        return range(1, self.n + 1)

    @property
    def m(self) -> int:
        return len(self.edges)

    def neighbors(self, v: int) -> frozenset:
        return self._adj[v]

    def closed_neighborhood(self, v: int) -> frozenset:
        return self._adj[v] | {v}

    def degree(self, v: int) -> int:
        return len(self._adj[v])

    @property
    def max_degree(self) -> int:
        return max((len(s) for s in self._adj.values()), default=0)

    @property
    def min_degree(self) -> int:
        return min((len(s) for s in self._adj.values()), default=0)

    @property
    def average_degree(self) -> float:
        return 2 * self.m / self.n if self.n else 0.0

    def has_edge(self, u: int, v: int) -> bool:
        return v in self._adj.get(u, ())

    def is_independent(self, S: Iterable[int]) -> bool:
        S = set(S)
        return not any(self._adj[v] & S for v in S)

    def without(self, Y: Iterable[int]) -> "Graph":
        """G minus Y, keeping the original vertex names (Y becomes isolated)."""
        Y = set(Y)
        return Graph(self.n, frozenset(e for e in self.edges if not (set(e) & Y)))

    def relabel(self, keep: Iterable[int]) -> tuple["Graph", dict[int, int]]:
        """Induced subgraph on ``keep`` renumbered 1..|keep| in ascending order."""
        keep = sorted(set(keep))
        idx = {v: i + 1 for i, v in enumerate(keep)}
        es = frozenset((idx[u], idx[v]) for u, v in self.edges if u in idx and v in idx)
        return Graph(len(keep), es), idx

    def to_networkx(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(self.vertices)
        g.add_edges_from(self.edges)
        return g


@dataclass(frozen=True)
class WeightedDigraph:
    n: int
    arcs: dict  # (u, v) -> weight
    M: int | None = None

    def __post_init__(self):
        arcs = {(int(u), int(v)): int(w) for (u, v), w in dict(self.arcs).items()}
        M = self.M if self.M is not None else max(arcs.values(), default=1)
        for (u, v), w in arcs.items():
            if u == v or not (1 <= u <= self.n and 1 <= v <= self.n):
                raise ValueError(f"bad arc ({u}, {v})")
            if not 1 <= w <= M:
                raise ValueError(f"weight {w} of arc ({u}, {v}) outside [1, {M}]")
        object.__setattr__(self, "arcs", arcs)
        object.__setattr__(self, "M", M)

    @classmethod
    def symmetric(cls, G: Graph, weights: dict | None = None, M: int | None = None) -> "WeightedDigraph":
        weights = weights or {}
        arcs = {}
        for u, v in G.edges:
            w = weights.get((u, v), weights.get((v, u), 1))
            arcs[(u, v)] = w
            arcs[(v, u)] = w
        return cls(G.n, arcs, M)

    def underlying(self) -> Graph:
        return Graph(self.n, frozenset(_edge(u, v) for u, v in self.arcs))

    def in_arcs(self) -> dict[int, list[tuple[int, int]]]:
        """Arcs grouped by head: v -> [(u, w), ...]."""
        out = {v: [] for v in range(1, self.n + 1)}
        for (u, v), w in sorted(self.arcs.items()):
            out[v].append((u, w))
        return out

    def scaled(self, c: int) -> "WeightedDigraph":
        return WeightedDigraph(self.n, {a: w * c for a, w in self.arcs.items()}, self.M * c)

    @property
    def min_weight(self) -> int:
        return min(self.arcs.values(), default=1)


@dataclass(frozen=True)
class LabeledMultigraph:
    """Contracted multigraph; each edge is (u, v, label) with label a 2-set."""

    n: int
    edges: tuple
    pairs: tuple = ()

    def __post_init__(self):
        es = tuple((u, v, frozenset(lab)) for u, v, lab in self.edges)
        count: dict = {}
        for u, v, lab in es:
            if len(lab) != 2:
                raise ValueError(f"label {set(lab)} is not a 2-set")
            key = _edge(u, v)
            count[key] = count.get(key, 0) + 1
            if count[key] > 4:
                raise StructuralError(f"more than 4 parallel edges between {key}")
        object.__setattr__(self, "edges", es)

    def is_loop(self, i: int) -> bool:
        u, v, _ = self.edges[i]
        return u == v

    @property
    def loops(self) -> list[int]:
        return [i for i in range(len(self.edges)) if self.is_loop(i)]

    @property
    def labels(self) -> frozenset:
        return frozenset(x for _, _, lab in self.edges for x in lab)


@dataclass(frozen=True)
class Decomposition:
    A: frozenset
    Y: frozenset
    d: int
    ok: bool = True
    reason: str = ""
    config: dict = field(default_factory=dict, compare=False)


# --------------------------------------------------------------------- DIMACS

def parse_dimacs(text: str) -> Graph | WeightedDigraph:
    """Read ``p edge n m`` / ``e u v [w]`` / ``a u v w`` lines.

    Plain edges give a ``Graph``.  Any weight, or any ``a`` (arc) line, gives a
    ``WeightedDigraph``; weighted ``e`` lines are added in both directions.
    """
    n = None
    edges: list[tuple[int, int, int | None, bool, int]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        parts = raw.split()
        if not parts or parts[0] == "c":
            continue
        tag = parts[0]
        if tag == "p":
            if n is not None:
                raise ParseError("second problem line", lineno)
            if len(parts) != 4 or parts[1] not in ("edge", "col", "sp", "tsp"):
                raise ParseError(f"malformed problem line {raw.strip()!r}", lineno)
            try:
                n, _m = int(parts[2]), int(parts[3])
            except ValueError:
                raise ParseError("non-integer vertex or edge count", lineno) from None
            if n < 0 or _m < 0:
                raise ParseError("negative count", lineno)
        elif tag in ("e", "a"):
            if n is None:
                raise ParseError("edge before problem line", lineno)
            if len(parts) not in (3, 4) or (tag == "a" and len(parts) != 4):
                raise ParseError(f"malformed {tag} line {raw.strip()!r}", lineno)
            try:
                nums = [int(x) for x in parts[1:]]
            except ValueError:
                raise ParseError("non-integer field", lineno) from None
            u, v = nums[0], nums[1]
            w = nums[2] if len(nums) == 3 else None
            if not (1 <= u <= n and 1 <= v <= n):
                raise ParseError(f"vertex out of range in {raw.strip()!r}", lineno)
            if u == v:
                raise ParseError(f"self-loop at {u}", lineno)
            if w is not None and w < 1:
                raise ParseError(f"weight {w} must be positive", lineno)
            edges.append((u, v, w, tag == "a", lineno))
        else:
            raise ParseError(f"unknown line type {tag!r}", lineno)
    if n is None:
        raise ParseError("missing problem line")
    if not any(w is not None or directed for _, _, w, directed, _ in edges):
        return Graph(n, frozenset(_edge(u, v) for u, v, *_ in edges))
    arcs: dict = {}
    for u, v, w, directed, lineno in edges:
        w = 1 if w is None else w
        targets = [(u, v)] if directed else [(u, v), (v, u)]
        for a in targets:
            if a in arcs and arcs[a] != w:
                raise ParseError(f"conflicting weights for arc {a}", lineno)
            arcs[a] = w
    return WeightedDigraph(n, arcs)


def write_dimacs(G: Graph | WeightedDigraph) -> str:
    if isinstance(G, Graph):
        lines = [f"p edge {G.n} {G.m}"] + [f"e {u} {v}" for u, v in sorted(G.edges)]
    else:
        sym = all(G.arcs.get((v, u)) == w for (u, v), w in G.arcs.items())
        if sym:
            es = sorted((u, v, w) for (u, v), w in G.arcs.items() if u < v)
            lines = [f"p edge {G.n} {len(es)}"] + [f"e {u} {v} {w}" for u, v, w in es]
        else:
            es = sorted((u, v, w) for (u, v), w in G.arcs.items())
            lines = [f"p edge {G.n} {len(es)}"] + [f"a {u} {v} {w}" for u, v, w in es]
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- structure

def square(G: Graph) -> Graph:
    es = set(G.edges)
    for v in G.vertices:
        nb = sorted(G.neighbors(v))
        for i, a in enumerate(nb):
            for b in nb[i + 1:]:
                es.add((a, b))
    return Graph(G.n, frozenset(es))


@dataclass(frozen=True)
class IndependentSet:
    vertices: tuple[int, ...]
    target: int
    shortfall: bool

    def __len__(self):
        return len(self.vertices)

    def __iter__(self):
        return iter(self.vertices)


def greedy_independent_in_square(G: Graph, target: int | None = None, allowed: Iterable[int] | None = None) -> IndependentSet:
    """Scan vertices in ascending order, keeping those at distance >= 3 from all kept.

    ``target`` defaults to ceil(n / (Delta^2 + 2)).  The scan stops once the
    target is reached; ``shortfall`` reports a maximal set that stayed below it.
    """
    if target is None:
        target = math.ceil(G.n / (G.max_degree**2 + 2)) if G.n else 0
    pool = G.vertices if allowed is None else sorted(set(allowed))
    blocked: set[int] = set()
    chosen: list[int] = []
    for v in pool:
        if len(chosen) >= target:
            break
        if v in blocked:
            continue
        chosen.append(v)
        for u in G.closed_neighborhood(v):
            blocked |= G.closed_neighborhood(u)
    return IndependentSet(tuple(chosen), target, len(chosen) < target)


def complement_matching(G: Graph, d: float | None = None) -> list[tuple[int, int]]:
    """Maximum matching of the complement of G, checked against n - 3d.

    G has 2n vertices; ``d`` defaults to the average degree of G.
    """
    d = G.average_degree if d is None else d
    comp = nx.complement(G.to_networkx())
    matching = sorted(_edge(u, v) for u, v in nx.max_weight_matching(comp, maxcardinality=True))
    half = G.n // 2
    if len(matching) < half - 3 * d:
        raise StructuralError(f"complement matching has {len(matching)} edges, below {half} - 3*{d}")
    return matching


def decomposition_defaults(d: int) -> dict:
    return {"T": 4 * d, "alpha": 1 / (2 * (16 * d * d + 1)), "c": 1 / (2 * d + 1)}


def decompose_avg_degree(G: Graph, d: int, config: dict | None = None) -> Decomposition:
    """Split off high-degree vertices Y and pick A independent in (G - Y)^2.

    Never raises; a failed contract comes back with ``ok=False`` and the
    reason, which callers treat as a request to use the plain tier.
    """
    cfg = decomposition_defaults(d) | (config or {})
    T, alpha = cfg["T"], cfg["alpha"]
    if T < 2 * d:
        return Decomposition(frozenset(), frozenset(), d, False, f"threshold T={T} below 2d", cfg)
    if G.average_degree > d:
        return Decomposition(frozenset(), frozenset(), d, False, "average degree exceeds d", cfg)
    Y = frozenset(v for v in G.vertices if G.degree(v) > T)
    H = G.without(Y)
    low = [v for v in G.vertices if v not in Y and H.degree(v) <= 2 * d]
    # c is not applied here: the solver keeps at most floor(c * n) families
    found = greedy_independent_in_square(H, target=len(low), allowed=low)
    A = frozenset(found.vertices)
    dec = Decomposition(A, Y, d, True, "", cfg)
    if len(A) < 2 * len(Y):
        return Decomposition(A, Y, d, False, f"|A|={len(A)} < 2|Y|={2 * len(Y)}", cfg)
    if not A or len(A) < alpha * G.n:
        return Decomposition(A, Y, d, False, f"|A|={len(A)} below alpha*n", cfg)
    return dec


def check_decomposition(G: Graph, dec: Decomposition) -> list[str]:
    """Violated contract items (empty when everything holds)."""
    bad = []
    if dec.A & dec.Y:
        bad.append("A and Y intersect")
    H = G.without(dec.Y)
    H2 = square(H)
    if not H2.is_independent(dec.A):
        bad.append("A not independent in (G - Y)^2")
    if any(H.degree(v) > 2 * dec.d for v in dec.A):
        bad.append("a vertex of A has more than 2d neighbours outside Y")
    if len(dec.A) < 2 * len(dec.Y):
        bad.append("|A| < 2|Y|")
    alpha = dec.config.get("alpha", decomposition_defaults(dec.d)["alpha"])
    if len(dec.A) < alpha * G.n:
        bad.append("|A| < alpha n")
    return bad
