"""Multilinear monomial detection over a product of cyclic groups.

Kronecker substitution packs the exponent fields of a monomial into one
integer.  Evaluating at roots of unity, each field can instead live on its
own cyclic axis as long as no monomial other than the target aliases onto
the target residue.  The axis sizes below are chosen so that this holds:

* ``count``  number of occurrences of free (non-family) elements;
* ``bits``   sum of 2**pos over free occurrences, modulo 2**|L| - 1.  With
             exactly |L| summands the residue 0 forces distinct positions;
* ``weight``, ``col0``, ``rowsum``, ``code``  the matrix statistics of the
             family part (row-normalised monomials only);
* ``z``      the weight variable, kept exact so every z-degree is read off
             from one marginal.

All evaluations are done in chunks, so memory does not grow with the domain.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import ConfigurationError
from .modpoly import WORD_PRIME_LIMIT, ModPrime, crt_reconstruct, find_primes

CHUNK_POINTS = 1 << 16

AXIS_NAMES = ("count", "bits", "weight", "col0", "rowsum", "code")


@dataclass(frozen=True)
class Detection:
    """Result of a smallest-k search; iterates as ``(k, coefficient)``."""

    k: int | None
    coefficient: int
    domain_size: int = 0
    moduli: tuple[int, ...] = ()
    tier: str = "plain"
    extra: dict = field(default_factory=dict, compare=False)

    def __iter__(self):
        yield self.k
        yield self.coefficient

    @property
    def found(self) -> bool:
        return self.k is not None


@dataclass(frozen=True)
class FactorProfile:
    """Ranges of the per-monomial statistics of one factor.

    ``count`` is the (min, max) number of variable occurrences in a monomial,
    ``z`` the (min, max) z-degree.  The optional maxima tighten axis sizes.
    """

    count: tuple[int, int]
    z: tuple[int, int] = (0, 0)
    max_free: int | None = None
    max_weight: int | None = None
    max_col0: int | None = None
    max_rowsum: int | None = None


def _coprime_above(k: int, m: int) -> int:
    n = k + 1
    while math.gcd(n, m) != 1:
        n += 1
    return n


@dataclass(frozen=True)
class CyclicLayout:
    n: int
    families: tuple[tuple[int, ...], ...]
    free: tuple[int, ...]
    sizes: tuple[int, ...]
    target: tuple[int, ...]
    z_low: int
    z_size: int
    exponents: dict = field(repr=False, compare=False)

    @property
    def p(self) -> int:
        return len(self.families)

    @property
    def q(self) -> int:
        return len(self.families[0]) if self.families else 0

    @property
    def size(self) -> int:
        return math.prod(self.sizes) * self.z_size

    @property
    def orders(self) -> tuple[int, ...]:
        return tuple(self.sizes) + (self.z_size,)

    @classmethod
    def build(cls, n: int, families: Sequence[Sequence[int]], profiles: Sequence[FactorProfile]) -> "CyclicLayout":
        families = tuple(tuple(f) for f in families)
        members = {v for f in families for v in f}
        free = tuple(v for v in range(1, n + 1) if v not in members)
        p = len(families)
        q = len(families[0]) if p else 0
        if p and (q < 2 or any(len(f) != q for f in families)):
            raise ConfigurationError("families must be padded to a common size q >= 2")
        nL = len(free)
        hi = sum(pr.count[1] for pr in profiles)
        homogeneous = all(pr.count[0] == pr.count[1] for pr in profiles)

        max_free = sum(pr.count[1] if pr.max_free is None else pr.max_free for pr in profiles)
        if not nL:
            max_free = 0
        unreachable = homogeneous and hi != n
        if homogeneous:
            # total degree is fixed at n, so the free count follows from weight
            count_size = 1
        else:
            count_size = max(nL, max_free - nL) + 1
        bits_size = (1 << nL) - 1 if nL >= 2 else 1
        sizes = [count_size, bits_size]
        target = [nL % count_size, 0]
        exps = {}
        for pos, v in enumerate(free):
            exps[v] = [1, (1 << pos) % bits_size, 0, 0, 0, 0]
        if p:
            b = (1 << q) - 1
            wmax = sum(pr.count[1] if pr.max_weight is None else pr.max_weight for pr in profiles)
            cwmax = sum(pr.count[1] if pr.max_col0 is None else pr.max_col0 for pr in profiles)
            rsmax = sum(pr.count[1] << (q - 1) if pr.max_rowsum is None else pr.max_rowsum for pr in profiles)
            # a homogeneous product of degree n has weight n - (free count)
            wlo = max(0, hi - max_free) if homogeneous else 0
            w_size = max(p * q - wlo, wmax - p * q, 0) + 1
            cw_size = max(p, cwmax - p) + 1
            K = max(0, (rsmax - p * (b - 2)) // (b - 1))
            rs_size = _coprime_above(K, b - 1)
            code_size = b**p - 1
            sizes += [w_size, cw_size, rs_size, code_size]
            code_target = sum((b - 2) * b**i for i in range(p))
            target += [p * q % w_size, p % cw_size, p * (b - 2) % rs_size, code_target % code_size]
            for i, fam in enumerate(families):
                for j, v in enumerate(fam):
                    c = -1 if j == 0 else 1 << j
                    exps[v] = [0, 0, 1, int(j == 0), c, c * b**i]
        else:
            sizes += [1, 1, 1, 1]
            target += [0, 0, 0, 0]
        if unreachable:
            target[0] = -1
        z_low = sum(pr.z[0] for pr in profiles)
        z_high = sum(pr.z[1] for pr in profiles)
        table = {v: tuple(e % s for e, s in zip(ev, sizes)) for v, ev in exps.items()}
        return cls(n, families, free, tuple(sizes), tuple(target), z_low, z_high - z_low + 1, table)

    def reachable(self) -> bool:
        return self.target[0] >= 0


class PointBlock:
    """Variable values at a block of domain points.

    ``x[v]`` has shape (rows, 1); ``z`` has shape (1, z_size); products
    broadcast to (rows, z_size).
    """

    def __init__(self, x: dict, z: np.ndarray, q: int):
        self.x = x
        self.z = z
        self.q = q

    def zpow(self, e: int) -> np.ndarray:
        cache = self.__dict__.setdefault("_zp", {})
        if e not in cache:
            q = self.q
            if e == 0:
                cache[e] = np.ones_like(self.z)
            else:
                half = self.zpow(e // 2)
                val = half * half % q
                if e % 2:
                    val = val * self.z % q
                cache[e] = val
        return cache[e]


Evaluator = Callable[[PointBlock], np.ndarray]


def _axis_tables(prime: ModPrime, sizes: Sequence[int]) -> list[np.ndarray]:
    q = prime.q
    out = []
    for s in sizes:
        w = prime.root_of_unity(s)
        t = np.empty(s, dtype=np.int64)
        acc = 1
        for i in range(s):
            t[i] = acc
            acc = acc * w % q
        out.append(t)
    return out


def z_marginal(layout: CyclicLayout, evaluator, prime: ModPrime) -> list[int]:
    """Coefficients (mod q) of the target monomial at each z-degree in range.

    Entry ``j`` is the coefficient of the target x-part times z**(z_low + j).
    ``evaluator`` is a point-block callable or a ``SparseFactors``.
    """
    if isinstance(evaluator, SparseFactors):
        return evaluator.marginal(layout, prime)
    q = prime.q
    sizes = layout.sizes
    tables = _axis_tables(prime, sizes)
    ztab = _axis_tables(prime, [layout.z_size])[0]
    rows_total = math.prod(sizes)
    rows_per = max(1, CHUNK_POINTS // layout.z_size)
    G = np.zeros(layout.z_size, dtype=np.int64)
    verts = sorted(layout.exponents)
    ex = np.array([layout.exponents[v] for v in verts], dtype=np.int64).reshape(len(verts), len(sizes))
    tgt = np.array(layout.target, dtype=np.int64)
    zrow = ztab.reshape(1, -1)
    for r0 in range(0, rows_total, rows_per):
        r = np.arange(r0, min(rows_total, r0 + rows_per), dtype=np.int64)
        idx = np.unravel_index(r, sizes)
        x = {}
        for vi, v in enumerate(verts):
            val = np.ones(len(r), dtype=np.int64)
            for a, s in enumerate(sizes):
                if s > 1 and ex[vi, a]:
                    val = val * tables[a][(ex[vi, a] * idx[a]) % s] % q
            x[v] = val.reshape(-1, 1)
        wt = np.ones(len(r), dtype=np.int64)
        for a, s in enumerate(sizes):
            if s > 1 and tgt[a]:
                wt = wt * tables[a][(-tgt[a] * idx[a]) % s] % q
        vals = np.asarray(evaluator(PointBlock(x, zrow, q)), dtype=np.int64) % q
        vals = np.broadcast_to(vals, (len(r), layout.z_size))
        G = (G + (vals * wt.reshape(-1, 1) % q).sum(axis=0)) % q
    return _invert_z(layout, G, ztab, q)


class SparseFactors:
    """Factors given as explicit monomials, evaluated axis by axis.

    Each monomial becomes an exponent vector on the torus.  Axes split into a
    free group (count, bits) and a family group (the matrix statistics); the
    value of a factor is a sum of outer products of per-group root powers,
    grouped by the family part so that many monomials share one outer product.
    """

    def __init__(self, layout: "CyclicLayout", factors: Sequence[Sequence[tuple[tuple[int, ...], int, int]]]):
        sizes = layout.sizes
        self.hists = []
        cache = {}
        for f in factors:
            key = id(f)
            if key not in cache:
                hist: dict = {}
                for elems, z, coef in f:
                    e = [0] * len(sizes)
                    for v in elems:
                        for a, x in enumerate(layout.exponents[v]):
                            e[a] += x
                    e1 = tuple(x % s for x, s in zip(e[:2], sizes[:2]))
                    e2 = tuple(x % s for x, s in zip(e[2:], sizes[2:]))
                    grp = hist.setdefault((e2, z), {})
                    grp[e1] = grp.get(e1, 0) + coef
                cache[key] = hist
            self.hists.append(cache[key])

    def marginal(self, layout: "CyclicLayout", prime: ModPrime) -> np.ndarray:
        q = prime.q
        sizes = layout.sizes
        tables = _axis_tables(prime, sizes)
        ztab = _axis_tables(prime, [layout.z_size])[0]
        zs = layout.z_size
        s1, s2 = sizes[:2], sizes[2:]
        n1, n2 = math.prod(s1), math.prod(s2)
        idx1 = np.unravel_index(np.arange(n1, dtype=np.int64), s1)
        idx2 = np.unravel_index(np.arange(n2, dtype=np.int64), s2)

        def powers(e, idx, tabs, ss):
            val = np.ones(len(idx[0]), dtype=np.int64)
            for a, s in enumerate(ss):
                if s > 1 and e[a] % s:
                    val = val * tabs[a][(e[a] * idx[a]) % s] % q
            return val

        tgt = layout.target
        w2 = powers([-t for t in tgt[2:]], idx2, tables[2:], s2)
        V = {}
        for hist in self.hists:
            for e2, _ in hist:
                if e2 not in V:
                    V[e2] = powers(e2, idx2, tables[2:], s2)
        Zp = {}
        for hist in self.hists:
            for _, z in hist:
                Zp.setdefault(z, ztab[(z * np.arange(zs)) % zs])
        U: dict = {}
        w1_full = powers([-t for t in tgt[:2]], idx1, tables[:2], s1)
        G = np.zeros(zs, dtype=np.int64)
        rows = max(1, CHUNK_POINTS // max(1, n2 * zs))
        for r0 in range(0, n1, rows):
            sl = slice(r0, min(n1, r0 + rows))
            r = sl.stop - sl.start
            chunk_idx = tuple(i[sl] for i in idx1)
            total = None
            for hist in self.hists:
                val = np.zeros((r, n2, zs), dtype=np.int64)
                for (e2, z), grp in hist.items():
                    u = np.zeros(r, dtype=np.int64)
                    for e1, c in grp.items():
                        key = (e1, r0)
                        if key not in U:
                            U[key] = powers(e1, chunk_idx, tables[:2], s1)
                        u = (u + U[key] * (c % q)) % q
                    outer = (V[e2][:, None] * Zp[z][None, :]) % q
                    val = (val + u[:, None, None] * outer[None, :, :]) % q
                total = val if total is None else total * val % q
            if total is None:
                total = np.ones((r, n2, zs), dtype=np.int64)
            weight = w1_full[sl][:, None] * w2[None, :] % q
            G = (G + (total * weight[:, :, None] % q).sum(axis=(0, 1)) % q) % q
            U.clear()
        return _invert_z(layout, G, ztab, q)


def _invert_z(layout: "CyclicLayout", G: np.ndarray, ztab: np.ndarray, q: int) -> list[int]:
    zs = layout.z_size
    inv_total = pow(math.prod(layout.sizes) * zs, -1, q)
    out = []
    for j in range(zs):
        # weights omega_z^{-(z_low + j) i} reduce to omega_z^{-j' i} with j' = (z_low+j) mod zs
        jj = (layout.z_low + j) % zs
        w = ztab[(-jj * np.arange(zs)) % zs]
        out.append(int((w * G % q).sum() % q) * inv_total % q)
    return out


def choose_primes(layout: CyclicLayout, coef_bound: int) -> list[ModPrime]:
    """Primes q < 2**31 with every axis order dividing q-1 and prod q > 2*bound."""
    order = math.lcm(*layout.orders)
    if order >= WORD_PRIME_LIMIT // 2:
        raise ConfigurationError(f"domain axis orders need lcm {order}, too large for word primes")
    start = max(WORD_PRIME_LIMIT // 4, order + 1)
    chosen = []
    while True:
        chosen = find_primes(start, len(chosen) + 1, order=order)
        if chosen[-1].q >= WORD_PRIME_LIMIT:
            raise ConfigurationError("ran out of word-sized primes for this domain")
        if math.prod(p.q for p in chosen) > 2 * coef_bound:
            return chosen


def detect(layout: CyclicLayout, evaluator: Evaluator, coef_bound: int, tier: str = "plain") -> Detection:
    """Smallest z-degree k of the target monomial, with its exact coefficient."""
    if not layout.reachable():
        return Detection(None, 0, layout.size, (), tier)
    primes = choose_primes(layout, coef_bound)
    residues = [z_marginal(layout, evaluator, pr) for pr in primes]
    for j in range(layout.z_size):
        c = crt_reconstruct([res[j] for res in residues], primes)
        if c:
            return Detection(layout.z_low + j, c, layout.size, tuple(p.q for p in primes), tier)
    return Detection(None, 0, layout.size, tuple(p.q for p in primes), tier)


def all_z_coefficients(layout: CyclicLayout, evaluator: Evaluator, coef_bound: int) -> list[int]:
    if not layout.reachable():
        return [0] * layout.z_size
    primes = choose_primes(layout, coef_bound)
    residues = [z_marginal(layout, evaluator, pr) for pr in primes]
    return [crt_reconstruct([res[j] for res in residues], primes) for j in range(layout.z_size)]
