"""Kronecker encoding of monomials and smallest-k multilinear monomial detection.

A monomial z^t * m over x_1..x_n is mapped to the single exponent

    t + (dn+1) * deg(m) + (dn+1)(n^2+1) * b(F(m))

where b(F) is the bitmask of the variable set (element i is bit i-1).  The
product of the encoded factors has the target ``x_1...x_n z^k`` at a unique
exponent because the mask field can only reach 2^n - 1 with n summands when
no carries occur.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from . import domain
from .domain import CyclicLayout, Detection, FactorProfile, PointBlock
from .errors import ConfigurationError, EncodingError
from .modpoly import (
    WORD_PRIME_LIMIT,
    PolyCircuit,
    _convolve_prime,
    crt_reconstruct,
    extract_coefficient,
    find_primes,
    primes_for_bound,
)


def popcount(x: int) -> int:
    return bin(x).count("1")


def mask_of(elements: Iterable[int]) -> int:
    m = 0
    for e in elements:
        if e < 1:
            raise EncodingError(f"element {e} outside [1, n]")
        m |= 1 << (e - 1)
    return m


def elements_of(mask: int) -> list[int]:
    out, i = [], 1
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


@dataclass(frozen=True)
class MultiMonomial:
    vertex_set: int  # bitmask, bit i-1 <=> element i
    total_degree: int
    z_degree: int = 0
    coefficient: int = 1

    def __post_init__(self):
        if self.vertex_set < 0 or self.coefficient < 0 or self.z_degree < 0:
            raise EncodingError("negative monomial field")
        if self.total_degree < popcount(self.vertex_set):
            raise EncodingError("total degree below the size of the variable set")

    @classmethod
    def of(cls, elements: Iterable[int], z: int = 0, coefficient: int = 1) -> "MultiMonomial":
        """Multilinear monomial prod_{i in elements} x_i * z^z."""
        elements = list(elements)
        m = mask_of(elements)
        if popcount(m) != len(elements):
            raise EncodingError("repeated element in a multilinear monomial")
        return cls(m, len(elements), z, coefficient)

    @property
    def multilinear(self) -> bool:
        return self.total_degree == popcount(self.vertex_set)

    @property
    def elements(self) -> list[int]:
        return elements_of(self.vertex_set)


@dataclass(frozen=True)
class StandardEncoding:
    n: int
    d: int = 0

    @property
    def stride_y(self) -> int:
        return self.d * self.n + 1

    @property
    def stride_x(self) -> int:
        return (self.d * self.n + 1) * (self.n * self.n + 1)

    @property
    def z_max(self) -> int:
        return self.d * self.n


def pack(monomial: MultiMonomial, enc: StandardEncoding) -> int:
    if monomial.z_degree > enc.z_max:
        raise EncodingError(f"z-degree {monomial.z_degree} exceeds {enc.z_max}")
    if monomial.total_degree > enc.n * enc.n:
        raise EncodingError("total degree exceeds n^2")
    if monomial.vertex_set >> enc.n:
        raise EncodingError("variable index exceeds n")
    return monomial.z_degree + enc.stride_y * monomial.total_degree + enc.stride_x * monomial.vertex_set


def unpack(exponent: int, enc: StandardEncoding) -> tuple[int, int, int]:
    """Inverse of ``pack``: (vertex mask, total degree, z-degree)."""
    mask, rest = divmod(exponent, enc.stride_x)
    deg, z = divmod(rest, enc.stride_y)
    return mask, deg, z


def target_exponent(enc: StandardEncoding, k: int) -> int:
    if not 0 <= k <= enc.z_max:
        raise EncodingError(f"k={k} outside [0, {enc.z_max}]")
    return k + enc.stride_y * enc.n + enc.stride_x * ((1 << enc.n) - 1)


def _factor_bound(factor: Sequence[MultiMonomial]) -> int:
    return sum(m.coefficient for m in factor)


def detect_min_k_dense(factors: Sequence[Sequence[MultiMonomial]], enc: StandardEncoding) -> Detection:
    """Smallest k with x_1..x_n z^k in the product of monomial lists.

    Each factor is packed into a dense coefficient array truncated at the
    largest target exponent (exponents only add, so higher terms never
    contribute), multiplied modulo a set of transform primes, and the target
    coefficients are lifted by CRT.
    """
    n = enc.n
    if len(factors) > n and n > 0:
        raise EncodingError(f"{len(factors)} factors exceed n={n}")
    top = target_exponent(enc, enc.z_max)
    length = top + 1
    bound = math.prod(max(1, _factor_bound(f)) for f in factors)
    arrays = []
    for f in factors:
        a = {}
        for m in f:
            e = pack(m, enc)
            if e <= top and m.coefficient:
                a[e] = a.get(e, 0) + m.coefficient
        arrays.append(a)
    if not factors:
        arrays = [{0: 1}]
    primes = primes_for_bound(bound, 2 * length)
    residues = []
    for pr in primes:
        q = pr.q
        acc = None
        for a in arrays:
            arr = np.zeros(length, dtype=np.int64)
            for e, c in a.items():
                arr[e] = c % q
            acc = arr if acc is None else _convolve_prime(acc, arr, pr)[:length]
        residues.append(acc)
    moduli = tuple(p.q for p in primes)
    for k in range(enc.z_max + 1):
        t = target_exponent(enc, k)
        if t >= len(residues[0]):
            break
        c = crt_reconstruct([int(r[t]) for r in residues], primes)
        if c:
            return Detection(k, c, length, moduli, "dense")
    return Detection(None, 0, length, moduli, "dense")


@dataclass(frozen=True)
class MultiCircuit:
    """A polynomial in (x_1..x_n, z) known through modular evaluation.

    ``evaluate(xs, z, p)`` receives a list of n arrays and an array for z
    (numpy-broadcastable, values in [0, p)) and returns the value modulo p.
    ``degree`` bounds the x-degree of each monomial as (min, max);
    ``z_range`` bounds the z-degree; ``coef_sum`` bounds every coefficient
    of the product this factor takes part in (callers may take the value of
    the polynomial at all-ones).
    """

    n: int
    evaluate: Callable
    degree: tuple[int, int]
    z_range: tuple[int, int]
    coef_sum: int
    hints: dict = field(default_factory=dict, compare=False)

    def profile(self) -> FactorProfile:
        return FactorProfile(self.degree, self.z_range, **self.hints)

    @classmethod
    def constant_one(cls, n: int) -> "MultiCircuit":
        return cls(n, lambda xs, z, p: np.ones_like(z), (0, 0), (0, 0), 1)


def _pad_factors(circuits: Sequence[MultiCircuit], n: int) -> list[MultiCircuit]:
    if len(circuits) > n:
        raise EncodingError(f"{len(circuits)} factors exceed n={n}")
    return list(circuits)


def _stream_univariate(circuits, enc, k):
    """Univariate circuit (1+u+...+u^k) * prod_f C_f(x_i -> u^{sy + sx 2^{i-1}}, z -> u)."""
    n = enc.n
    xexp = [enc.stride_y + enc.stride_x * (1 << (i - 1)) for i in range(1, n + 1)]
    deg = k
    for c in circuits:
        deg += c.z_range[1] + max(e for e in xexp) * c.degree[1] if n else c.z_range[1]

    def evaluate(u, p):
        xs = [_vpow(u, e, p) for e in xexp]
        val = np.ones_like(u)
        for c in circuits:
            val = val * (np.asarray(c.evaluate(xs, u, p), dtype=np.int64) % p) % p
        geo = np.zeros_like(u)
        term = np.ones_like(u)
        for _ in range(k + 1):
            geo = (geo + term) % p
            term = term * u % p
        return val * geo % p

    return PolyCircuit(deg, evaluate)


def _vpow(u: np.ndarray, e: int, p: int) -> np.ndarray:
    result = np.ones_like(u)
    base = u % p
    while e:
        if e & 1:
            result = result * base % p
        base = base * base % p
        e >>= 1
    return result


def detect_min_k_stream(
    circuits: Sequence[MultiCircuit],
    enc: StandardEncoding,
    method: str = "marginal",
) -> Detection:
    """Smallest k with x_1..x_n z^k in the product of circuits.

    ``method="bisect"`` is the textbook route: the circuits are composed with
    the Kronecker substitution into one univariate polynomial, multiplied by
    1 + u + ... + u^k, and the prefix sum at the target exponent is extracted
    over a prime field larger than the degree; k is found by binary search.
    It needs a prime above the full degree, so it is only usable for small n.

    ``method="marginal"`` evaluates on a product of cyclic groups (see
    ``famfft.domain``) and reads every z-degree off a single pass.
    """
    circuits = _pad_factors(circuits, enc.n)
    bound = math.prod(max(1, c.coef_sum) for c in circuits)
    if method == "marginal":
        det = stream_marginal(circuits, enc.n, (), bound)
        if det.found and det.k > enc.z_max:
            return Detection(None, 0, det.domain_size, det.moduli, det.tier)
        return det
    if method != "bisect":
        raise ValueError(f"unknown method {method!r}")
    return _stream_bisect(circuits, enc, bound)


def _stream_bisect(circuits, enc, bound) -> Detection:
    zmax = min(enc.z_max, sum(c.z_range[1] for c in circuits))
    probe = _stream_univariate(circuits, enc, zmax)
    need = probe.degree_bound + 2
    if need >= WORD_PRIME_LIMIT:
        raise ConfigurationError(f"univariate degree {probe.degree_bound} too large for word-sized fields")
    # prefix sums are bounded by (zmax+1) * bound
    primes = []
    count = 1
    while True:
        primes = find_primes(need, count)
        if math.prod(p.q for p in primes) > 2 * (zmax + 1) * bound:
            break
        count += 1
    moduli = tuple(p.q for p in primes)

    def prefix(k):
        circ = _stream_univariate(circuits, enc, k)
        t = target_exponent(enc, k)
        return crt_reconstruct([extract_coefficient(circ, t, pr) for pr in primes], primes)

    top = prefix(zmax)
    if top == 0:
        return Detection(None, 0, need, moduli, "stream-bisect")
    lo, hi = 0, zmax
    while lo < hi:
        mid = (lo + hi) // 2
        if prefix(mid):
            hi = mid
        else:
            lo = mid + 1
    coef = prefix(lo) - (prefix(lo - 1) if lo else 0)
    return Detection(lo, coef, need, moduli, "stream-bisect")


def circuit_evaluator(circuits: Sequence[MultiCircuit], n: int) -> domain.Evaluator:
    def evaluate(block: PointBlock):
        q = block.q
        ones = np.ones((1, 1), dtype=np.int64)
        xs = [block.x.get(v, ones) for v in range(1, n + 1)]
        val = None
        seen = {}
        for c in circuits:
            if id(c) not in seen:
                seen[id(c)] = np.asarray(c.evaluate(xs, block.z, q), dtype=np.int64) % q
            v = seen[id(c)]
            val = v if val is None else val * v % q
        return ones if val is None else val

    return evaluate


def stream_marginal(circuits, n, families, bound, tier="plain") -> Detection:
    profiles = [c.profile() for c in circuits]
    layout = CyclicLayout.build(n, families, profiles)
    det = domain.detect(layout, circuit_evaluator(circuits, n), bound, tier)
    return det


@dataclass(frozen=True)
class PartitionProblem:
    n: int
    k: int
    families: tuple  # k sequences of subsets (each an iterable of elements of [n])

    def __post_init__(self):
        if len(self.families) != self.k:
            raise ValueError("need exactly k families")
        if self.k > self.n and self.n > 0:
            raise ValueError("k must not exceed n")
        for fam in self.families:
            for s in fam:
                if any(not 1 <= e <= self.n for e in s):
                    raise ValueError(f"subset {tuple(s)} not inside [{self.n}]")


def family_monomials(family) -> list[MultiMonomial]:
    return [MultiMonomial.of(s) for s in family]


def partition_solve(problem: PartitionProblem) -> bool:
    """Can [n] be written as F_1 + ... + F_k (disjoint) with F_i from family i?"""
    if problem.n == 0:
        return True
    enc = StandardEncoding(problem.n, 0)
    cache = {}
    factors = []
    for fam in problem.families:
        key = id(fam)
        if key not in cache:
            cache[key] = family_monomials(fam)
        factors.append(cache[key])
    return detect_min_k_dense(factors, enc).found
