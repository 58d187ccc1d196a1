"""Systems of families with infants and the row-normalised matrix encoding.

A family R_i is an ordered tuple whose first element is the infant r_i.  Any
admissible set containing r_i also contains another member of R_i, so the
characteristic row of the set restricted to R_i is never [1, 0, ..., 0].  The
remaining 2^q - 1 row patterns are exactly the values 0..2^q-2 of

    rowcode(row) = -row[0] + sum_{j>=1} 2^j row[j]

which is what shrinks the search domain from 2^q to 2^q - 1 per family.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import domain
from .domain import CyclicLayout, Detection, FactorProfile
from .errors import EncodingError, FamilySystemError, InfantViolationError
from .kronecker import MultiCircuit, MultiMonomial, PartitionProblem, circuit_evaluator


@dataclass(frozen=True)
class FamilySystem:
    n: int
    families: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        fams = tuple(tuple(f) for f in self.families)
        object.__setattr__(self, "families", fams)
        seen = set()
        for f in fams:
            if not f:
                raise FamilySystemError("empty family")
            if len(set(f)) != len(f):
                raise FamilySystemError(f"family {f} repeats an element")
            for v in f:
                if not 1 <= v <= self.n:
                    raise FamilySystemError(f"element {v} outside [1, {self.n}]")
                if v in seen:
                    raise FamilySystemError(f"families overlap at {v}")
                seen.add(v)
        if self.p * self.q > self.n:
            raise FamilySystemError(f"p*q = {self.p * self.q} exceeds n = {self.n}")

    @property
    def p(self) -> int:
        return len(self.families)

    @property
    def q(self) -> int:
        return max((len(f) for f in self.families), default=0)

    @property
    def infants(self) -> tuple[int, ...]:
        return tuple(f[0] for f in self.families)

    @property
    def members(self) -> frozenset[int]:
        return frozenset(v for f in self.families for v in f)

    @property
    def leftover(self) -> tuple[int, ...]:
        m = self.members
        return tuple(v for v in range(1, self.n + 1) if v not in m)

    @property
    def padded(self) -> bool:
        return all(len(f) == self.q for f in self.families)

    def position(self) -> dict[int, tuple[int, int]]:
        """The matrix representation alpha: element -> (row, column)."""
        return {v: (i, j) for i, f in enumerate(self.families) for j, v in enumerate(f)}

    def admits(self, elements: Iterable[int]) -> bool:
        s = set(elements)
        return all(f[0] not in s or any(v in s for v in f[1:]) for f in self.families)

    def dump(self) -> str:
        return "\n".join(" ".join(str(v) for v in f) for f in self.families)


def pad_families(raw: Sequence[Sequence[int]], n: int, q: int | None = None) -> FamilySystem:
    """Extend every family to exactly q members using the lowest unused elements."""
    raw = [tuple(f) for f in raw]
    q = max((len(f) for f in raw), default=0) if q is None else q
    if any(len(f) > q for f in raw):
        raise FamilySystemError("a family is larger than q")
    if len(raw) * q > n:
        raise FamilySystemError(f"p*q = {len(raw) * q} exceeds n = {n}")
    used = {v for f in raw for v in f}
    if len(used) != sum(len(f) for f in raw):
        raise FamilySystemError("families are not disjoint")
    spare = (v for v in range(1, n + 1) if v not in used)
    out = []
    for f in raw:
        extra = [next(spare) for _ in range(q - len(f))]
        out.append(f + tuple(extra))
    return FamilySystem(n, tuple(out))


def rowcode(row: Sequence[int]) -> int:
    return -row[0] + sum(v << j for j, v in enumerate(row) if j)


@dataclass(frozen=True)
class MatrixStats:
    colweight0: int
    weight: int
    rowsum: int
    code: int


def stats_of_matrix(M: Sequence[Sequence[int]], q: int | None = None) -> MatrixStats:
    q = len(M[0]) if M and q is None else (q or 0)
    base = (1 << q) - 1
    codes = [rowcode(r) for r in M]
    return MatrixStats(
        sum(r[0] for r in M),
        sum(sum(r) for r in M),
        sum(codes),
        sum(c * base**i for i, c in enumerate(codes)),
    )


def characteristic_matrix(S: Iterable[int], system: FamilySystem) -> list[list[int]]:
    pos = system.position()
    M = [[0] * system.q for _ in range(system.p)]
    for v in S:
        if v in pos:
            i, j = pos[v]
            M[i][j] = 1
    return M


def matrix_stats(S: Iterable[int], system: FamilySystem) -> MatrixStats:
    """Statistics of the characteristic matrix of S restricted to the families."""
    S = set(S)
    if not system.admits(S):
        raise InfantViolationError(f"set {sorted(S)} contains an infant without a relative")
    return stats_of_matrix(characteristic_matrix(S, system), system.q)


@dataclass(frozen=True)
class InfantEncoding:
    """Exponent strides of the univariate substitution for u_1..u_6, z.

    With N = n + 1, B = 2^|L|:  u_1 = u, u_2 = u^{N^2}, u_3 = u^{N^3 B},
    u_4 = u^{N^5 B}, u_5 = u^{N^7 B}, u_6 = u^{N^9 B 2^q},
    z = u^{N^10 B 2^q (2^q - 1)^p}.
    """

    n: int
    p: int
    q: int
    free: int
    d: int = 0

    @classmethod
    def for_system(cls, system: FamilySystem, d: int = 0) -> "InfantEncoding":
        return cls(system.n, system.p, system.q, len(system.leftover), d)

    @property
    def strides(self) -> tuple[int, ...]:
        N, B, Q = self.n + 1, 1 << self.free, 1 << self.q
        return (
            1,
            N**2,
            N**3 * B,
            N**5 * B,
            N**7 * B,
            N**9 * B * Q,
            N**10 * B * Q * (Q - 1) ** self.p,
        )

    @property
    def domain_size(self) -> int:
        """Exponent bound of the encoded product: z-stride times (dn + 1)."""
        return self.strides[-1] * (self.d * self.n + 1)


def _fields(F: set, system: FamilySystem) -> tuple[int, ...]:
    L = system.leftover
    FL = [pos for pos, v in enumerate(L) if v in F]
    bits = sum(1 << pos for pos in FL)
    st = matrix_stats(F, system) if system.p else MatrixStats(0, 0, 0, 0)
    return (len(FL), bits, st.colweight0, st.weight, st.rowsum, st.code)


def encode_monomial(F: Iterable[int], total_degree: int, z_degree: int, system: FamilySystem, enc: InfantEncoding) -> int:
    F = set(F)
    if total_degree < len(F):
        raise EncodingError("total degree below the size of the variable set")
    fields = _fields(F, system) + (z_degree,)
    return sum(f * s for f, s in zip(fields, enc.strides))


def decode_fields(exponent: int, enc: InfantEncoding) -> tuple[int, ...]:
    out = []
    for s in reversed(enc.strides):
        f, exponent = divmod(exponent, s)
        out.append(f)
    return tuple(reversed(out))


def target_exponent_infants(system: FamilySystem, enc: InfantEncoding, k: int) -> int:
    nL = len(system.leftover)
    p, q = system.p, system.q
    b = (1 << q) - 1
    fields = (nL, (1 << nL) - 1, p, p * q, p * (b - 2), sum((b - 2) * b**i for i in range(p)), k)
    return sum(f * s for f, s in zip(fields, enc.strides))


def infant_formula(n: int, d: int, p: int, q: int, free: int) -> int:
    """d * 2^|L| * (2^q - 1)^p * 2^q, with d read as max(d, 1)."""
    return max(d, 1) * (1 << free) * ((1 << q) - 1) ** p * (1 << q)


def declared_poly_factor(n: int) -> int:
    # (n+1)^10 from the strides, (dn+1)/d <= n+1 from the z range
    return (n + 1) ** 11


def _profile_of_list(monos: list[tuple[tuple[int, ...], int, int]], system: FamilySystem) -> FactorProfile:
    pos = system.position()
    counts, zs, free, weight, col0, rows = [], [], [], [], [], []
    for elems, z, _ in monos:
        counts.append(len(elems))
        zs.append(z)
        inR = [pos[v] for v in elems if v in pos]
        free.append(len(elems) - len(inR))
        weight.append(len(inR))
        col0.append(sum(1 for _, j in inR if j == 0))
        rows.append(sum(-1 if j == 0 else 1 << j for _, j in inR))
    if not monos:
        return FactorProfile((0, 0), (0, 0), 0, 0, 0, 0)
    return FactorProfile((min(counts), max(counts)), (min(zs), max(zs)), max(free), max(weight), max(col0), max(rows))


def _prepare_list(factor: Sequence[MultiMonomial], system: FamilySystem):
    out = []
    for m in factor:
        if not m.coefficient or not m.multilinear:
            # a repeated variable can never be part of x_1 ... x_n
            continue
        elems = tuple(m.elements)
        if elems and elems[-1] > system.n:
            raise EncodingError(f"element {elems[-1]} outside [1, {system.n}]")
        if not system.admits(elems):
            raise InfantViolationError(f"monomial {elems} contains an infant without a relative")
        out.append((elems, m.z_degree, m.coefficient))
    out.sort()
    return out


def _list_value(block: domain.PointBlock, monos) -> np.ndarray:
    q = block.q
    any_x = next(iter(block.x.values()))
    ones = np.ones_like(any_x)
    by_z: dict[int, np.ndarray] = {}
    stack: list[tuple[int, np.ndarray]] = []
    for elems, z, coef in monos:
        c = 0
        while c < len(stack) and c < len(elems) and stack[c][0] == elems[c]:
            c += 1
        del stack[c:]
        for e in elems[c:]:
            base = stack[-1][1] if stack else ones
            stack.append((e, base * block.x[e] % q))
        val = stack[-1][1] if stack else ones
        acc = by_z.get(z)
        term = val * (coef % q) % q
        by_z[z] = term if acc is None else (acc + term) % q
    total = np.zeros((1, 1), dtype=np.int64)
    for z, s in by_z.items():
        total = (total + s * block.zpow(z)) % q
    return total


def list_evaluator(prepared: list) -> domain.Evaluator:
    def evaluate(block):
        q = block.q
        cache = {}
        val = None
        for monos in prepared:
            key = id(monos)
            if key not in cache:
                cache[key] = _list_value(block, monos)
            v = cache[key]
            val = v if val is None else val * v % q
        return val

    return evaluate


def detect_min_k_infants(factors, system: FamilySystem, d: int = 0, pointwise: bool = False) -> Detection:
    """Smallest k with x_1..x_n z^k in the product, searching the reduced domain.

    ``factors`` is either a list of monomial lists or a list of
    ``MultiCircuit``.  Every monomial of a list is checked against the infant
    property and a violation raises ``InfantViolationError``.  Circuits must
    guarantee the property themselves, in the counted (walk) sense: each
    occurrence of an infant is matched by a distinct occurrence of a relative.
    Lists are summed per exponent vector unless ``pointwise`` asks for the
    monomial-by-monomial evaluator.
    """
    if system.p and not system.padded:
        system = pad_families(system.families, system.n)
    enc = InfantEncoding.for_system(system, d)
    n = system.n
    if factors and isinstance(factors[0], MultiCircuit):
        profiles = [c.profile() for c in factors]
        evaluator = circuit_evaluator(factors, n)
        bound = math.prod(max(1, c.coef_sum) for c in factors)
    else:
        cache = {}
        prepared = []
        for f in factors:
            if id(f) not in cache:
                cache[id(f)] = _prepare_list(f, system)
            prepared.append(cache[id(f)])
        profiles = [_profile_of_list(m, system) for m in prepared]
        evaluator = list_evaluator(prepared) if pointwise else None
        bound = math.prod(max(1, sum(c for _, _, c in m)) for m in prepared)
        if any(not m for m in prepared):
            layout = CyclicLayout.build(n, system.families, [FactorProfile((0, 0))])
            return _annotate(Detection(None, 0, layout.size, (), "infants"), system, enc)
    if not factors:
        profiles = [FactorProfile((0, 0))]
        evaluator = lambda block: np.ones((1, 1), dtype=np.int64)  # noqa: E731
        bound = 1
    layout = CyclicLayout.build(n, system.families, profiles)
    if evaluator is None:
        evaluator = domain.SparseFactors(layout, prepared)
    det = domain.detect(layout, evaluator, bound, "infants")
    if det.found and d and det.k > d * n:
        det = Detection(None, 0, det.domain_size, det.moduli, det.tier)
    return _annotate(det, system, enc)


def _annotate(det: Detection, system: FamilySystem, enc: InfantEncoding) -> Detection:
    info = dict(
        p=system.p,
        q=system.q,
        free=len(system.leftover),
        n=system.n,
        encoded_bound=enc.domain_size,
        formula=infant_formula(system.n, enc.d, system.p, system.q, len(system.leftover)),
        plain_core=1 << system.n,
        infant_core=(1 << len(system.leftover)) * ((1 << system.q) - 1) ** system.p if system.p else 1 << system.n,
    )
    det.extra.update(info)
    RUN_LOG.append(info | {"domain_size": det.domain_size})
    return det


# Every infants-tier detection appends its domain accounting here.
RUN_LOG: list[dict] = []


def partition_solve_infants(problem: PartitionProblem, system: FamilySystem) -> bool:
    if problem.n != system.n:
        raise FamilySystemError("system and problem disagree on n")
    if problem.n == 0:
        return True
    cache = {}
    factors = []
    for fam in problem.families:
        if id(fam) not in cache:
            cache[id(fam)] = [MultiMonomial.of(s) for s in fam]
        factors.append(cache[id(fam)])
    return detect_min_k_infants(factors, system, 0).found
