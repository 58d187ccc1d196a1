"""Exact polynomial arithmetic over word-sized prime fields.

Products are computed with a number-theoretic transform over primes below
2**31 (so residue products fit in int64) and lifted with the Chinese
remainder theorem.  Single coefficients of polynomials that are too large to
list are recovered from evaluations at powers of a primitive root.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from .errors import CoefficientOverflowError, ConfigurationError

# Residues must stay below 2**31 so that a*b fits a signed 64-bit integer.
WORD_PRIME_LIMIT = 1 << 31
MAX_WINDOW_DOUBLINGS = 1 << 10
MAX_CRT_PRIMES = 16
DEFAULT_CHUNK = 1 << 15

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(x: int) -> bool:
    """Deterministic Miller-Rabin; exact for every x < 3.3e24."""
    if x < 2:
        return False
    for b in _MR_BASES:
        if x % b == 0:
            return x == b
    d, s = x - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        y = pow(a, d, x)
        if y == 1 or y == x - 1:
            continue
        for _ in range(s - 1):
            y = y * y % x
            if y == x - 1:
                break
        else:
            return False
    return True


def trial_factor(x: int) -> list[tuple[int, int]]:
    """Factor ``x`` by trial division, returning sorted (prime, exponent) pairs."""
    if x < 2:
        raise ValueError("trial_factor needs x >= 2")
    out = []
    for p in (2, 3):
        e = 0
        while x % p == 0:
            x //= p
            e += 1
        if e:
            out.append((p, e))
    f = 5
    while f * f <= x:
        for p in (f, f + 2):
            e = 0
            while x % p == 0:
                x //= p
                e += 1
            if e:
                out.append((p, e))
        f += 6
    if x > 1:
        out.append((x, 1))
    return out


@dataclass(frozen=True)
class ModPrime:
    q: int
    omega: int
    factors: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if not is_prime(self.q):
            raise ValueError(f"{self.q} is not prime")
        if math.prod(a**b for a, b in self.factors) != self.q - 1:
            raise ValueError("factors do not multiply to q-1")
        if not _is_primitive_root(self.omega, self.q, self.factors):
            raise ValueError(f"{self.omega} is not a primitive root mod {self.q}")

    def root_of_unity(self, order: int) -> int:
        """An element of exact multiplicative order ``order``."""
        if (self.q - 1) % order:
            raise ConfigurationError(f"order {order} does not divide {self.q}-1")
        return pow(self.omega, (self.q - 1) // order, self.q)

    @classmethod
    def for_prime(cls, q: int) -> "ModPrime":
        return _mod_prime(q)


def _is_primitive_root(g, q, factors) -> bool:
    if q == 2:
        return g % 2 == 1
    if pow(g, q - 1, q) != 1:
        return False
    return all(pow(g, (q - 1) // a, q) != 1 for a, _ in factors)


def primitive_root(q: int, factors=None) -> int:
    factors = factors or (trial_factor(q - 1) if q > 2 else [])
    for g in range(1, q):
        if _is_primitive_root(g, q, factors):
            return g
    raise ValueError(f"no primitive root modulo {q}")


@lru_cache(maxsize=None)
def _mod_prime(q: int) -> ModPrime:
    factors = tuple(trial_factor(q - 1)) if q > 2 else ()
    return ModPrime(q, primitive_root(q, factors), factors)


def find_primes(N: int, count: int, order: int = 1) -> list[ModPrime]:
    """The ``count`` smallest primes ``q >= N`` with ``order | q-1``.

    The search window starts at [N, 2N) and doubles until enough primes are
    found; after ``MAX_WINDOW_DOUBLINGS`` doublings it gives up.
    """
    if N < 2 or count < 1 or order < 1:
        raise ValueError("find_primes needs N >= 2, count >= 1, order >= 1")
    found = []
    q = N + ((1 - N) % order)
    hi = 2 * N
    doublings = 0
    while len(found) < count:
        while q < hi and len(found) < count:
            if is_prime(q):
                found.append(_mod_prime(q))
            q += order
        if len(found) < count:
            doublings += 1
            if doublings > MAX_WINDOW_DOUBLINGS:
                raise ConfigurationError(f"prime search window exhausted above {N}")
            hi *= 2
    return found


@lru_cache(maxsize=None)
def ntt_primes(log_len: int, count: int) -> tuple[ModPrime, ...]:
    """``count`` primes below 2**31 supporting transforms of length 2**log_len."""
    step = 1 << log_len
    out = []
    c = (WORD_PRIME_LIMIT - 1) // step
    while len(out) < count and c > 0:
        q = c * step + 1
        if is_prime(q):
            out.append(_mod_prime(q))
        c -= 1
    if len(out) < count:
        raise ConfigurationError(f"fewer than {count} NTT primes for length 2**{log_len}")
    return tuple(out)


@dataclass(frozen=True, eq=False)
class DensePoly:
    modulus: int
    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=np.int64)
        if c.ndim != 1 or len(c) == 0:
            raise ValueError("coefficient list must be a non-empty 1-d sequence")
        if (c < 0).any() or (c >= self.modulus).any():
            raise ValueError("coefficients must lie in [0, modulus)")
        object.__setattr__(self, "coeffs", c)

    @property
    def degree(self) -> int:
        nz = np.flatnonzero(self.coeffs)
        return int(nz[-1]) if len(nz) else -1

    def __eq__(self, other):
        if not isinstance(other, DensePoly) or other.modulus != self.modulus:
            return NotImplemented
        a, b = self.coeffs, other.coeffs
        k = max(len(a), len(b))
        return np.array_equal(np.pad(a, (0, k - len(a))), np.pad(b, (0, k - len(b))))

    def tolist(self) -> list[int]:
        return [int(v) for v in self.coeffs]


@lru_cache(maxsize=64)
def _bitrev(n: int) -> np.ndarray:
    bits = n.bit_length() - 1
    idx = np.arange(n, dtype=np.int64)
    rev = np.zeros(n, dtype=np.int64)
    for b in range(bits):
        rev |= ((idx >> b) & 1) << (bits - 1 - b)
    return rev


@lru_cache(maxsize=256)
def _twiddles(q: int, root: int, half: int) -> np.ndarray:
    w = np.empty(half, dtype=np.int64)
    acc = 1
    for i in range(half):
        w[i] = acc
        acc = acc * root % q
    return w


def ntt(a: np.ndarray, prime: ModPrime, invert: bool = False) -> np.ndarray:
    """In-order radix-2 transform of a length-2**k int64 array modulo ``prime``."""
    n = len(a)
    if n & (n - 1):
        raise ValueError("transform length must be a power of two")
    q = prime.q
    a = np.asarray(a, dtype=np.int64)[_bitrev(n)].copy()
    m = 2
    while m <= n:
        root = prime.root_of_unity(m)
        if invert:
            root = pow(root, q - 2, q)
        w = _twiddles(q, root, m // 2)
        blk = a.reshape(-1, m)
        u = blk[:, : m // 2].copy()
        v = blk[:, m // 2 :] * w % q
        blk[:, : m // 2] = (u + v) % q
        blk[:, m // 2 :] = (u - v) % q
        m *= 2
    if invert:
        a = a * pow(n, q - 2, q) % q
    return a


def _convolve_prime(a: np.ndarray, b: np.ndarray, prime: ModPrime) -> np.ndarray:
    out_len = len(a) + len(b) - 1
    size = 1 << max(0, (out_len - 1).bit_length())
    if (prime.q - 1) % size:
        raise ConfigurationError(f"prime {prime.q} cannot host a length-{size} transform")
    q = prime.q
    if min(len(a), len(b)) <= 32:
        # schoolbook is faster for short operands
        res = np.zeros(out_len, dtype=np.int64)
        small, big = (a, b) if len(a) <= len(b) else (b, a)
        for i, c in enumerate(small.tolist()):
            if c:
                res[i : i + len(big)] = (res[i : i + len(big)] + big * c) % q
        return res
    fa = ntt(np.pad(a % q, (0, size - len(a))), prime)
    fb = ntt(np.pad(b % q, (0, size - len(b))), prime)
    return ntt(fa * fb % q, prime, invert=True)[:out_len]


def primes_for_bound(bound: int, length: int) -> tuple[ModPrime, ...]:
    """Enough transform primes that their product exceeds ``2 * bound``."""
    log_len = max(1, (max(length, 2) - 1).bit_length())
    count = 1
    while True:
        if count > MAX_CRT_PRIMES:
            raise ConfigurationError(f"coefficient bound {bound} needs more than {MAX_CRT_PRIMES} primes")
        ps = ntt_primes(log_len, count)
        if math.prod(p.q for p in ps) > 2 * bound:
            return ps
        count += 1


def garner(residues: Sequence[np.ndarray], primes: Sequence[int]) -> list[int]:
    """Vectorised CRT: the non-negative integers below prod(primes) matching ``residues``."""
    digits = []
    for j, qj in enumerate(primes):
        v = np.asarray(residues[j], dtype=np.int64) % qj
        for i in range(j):
            qi = primes[i]
            v = (v - digits[i] % qj) % qj * pow(qi, -1, qj) % qj
        digits.append(v)
    total = math.prod(primes)
    if total < (1 << 62):
        acc = np.zeros_like(digits[0])
        for d, qj in zip(reversed(digits), reversed(primes)):
            acc = acc * qj + d
        return acc.tolist()
    out = [0] * len(digits[0])
    cols = [d.tolist() for d in digits]
    for idx in range(len(out)):
        acc = 0
        for j in range(len(primes) - 1, -1, -1):
            acc = acc * primes[j] + cols[j][idx]
        out[idx] = acc
    return out


def multiply_mod(p: DensePoly, r: DensePoly, m: int | None = None) -> DensePoly:
    """Product of ``p`` and ``r`` with coefficients reduced modulo ``m``."""
    m = p.modulus if m is None else m
    if p.modulus != m or r.modulus != m:
        raise ValueError("operands must share the modulus")
    out_len = len(p.coeffs) + len(r.coeffs) - 1
    size = 1 << max(0, (out_len - 1).bit_length())
    if m < WORD_PRIME_LIMIT and is_prime(m) and (m - 1) % size == 0:
        return DensePoly(m, _convolve_prime(p.coeffs, r.coeffs, _mod_prime(m)))
    bound = (m - 1) ** 2 * min(len(p.coeffs), len(r.coeffs))
    ps = primes_for_bound(bound, out_len)
    res = [_convolve_prime(p.coeffs, r.coeffs, pr) for pr in ps]
    exact = garner(res, [pr.q for pr in ps])
    return DensePoly(m, np.array([v % m for v in exact], dtype=np.int64))


def multiply_exact(p: Sequence[int], r: Sequence[int], W: int) -> list[int]:
    """Exact product of two polynomials with coefficients in [0, W)."""
    a = [int(v) for v in p]
    b = [int(v) for v in r]
    if any(v < 0 or v >= W for v in a + b):
        raise CoefficientOverflowError(f"coefficient outside [0, {W})")
    if W >= WORD_PRIME_LIMIT:
        raise ConfigurationError("coefficient bound must be below 2**31")
    n = max(len(a), len(b))
    bound = 2 * W * W * n + 1
    ps = primes_for_bound(bound, len(a) + len(b) - 1)
    an, bn = np.array(a, dtype=np.int64), np.array(b, dtype=np.int64)
    res = [_convolve_prime(an, bn, pr) for pr in ps]
    out = garner(res, [pr.q for pr in ps])
    limit = (W - 1) ** 2 * min(len(a), len(b))
    if any(v > limit for v in out):
        raise CoefficientOverflowError("lifted coefficient exceeds the declared bound")
    return out


def crt_reconstruct(residues: Sequence[int], fields: Sequence[ModPrime | int], bound: int | None = None) -> int:
    """The unique integer in [0, prod q) congruent to each residue.

    If ``bound`` is given, the product of moduli must exceed ``2 * bound``.
    """
    mods = [f.q if isinstance(f, ModPrime) else int(f) for f in fields]
    if len(set(mods)) != len(mods):
        raise ConfigurationError("moduli must be distinct primes")
    total = math.prod(mods)
    if bound is not None and total <= 2 * bound:
        raise ConfigurationError(f"moduli product {total} too small for bound {bound}")
    x = 0
    for r, q in zip(residues, mods):
        Mi = total // q
        x += (int(r) % q) * Mi * pow(Mi, -1, q)
    return x % total


@dataclass(frozen=True)
class PolyCircuit:
    """A univariate polynomial known only through modular evaluation.

    ``evaluate(x, p)`` must accept an int64 numpy array of points in [0, p)
    and return the values of the polynomial modulo ``p`` elementwise.
    """

    degree_bound: int
    evaluate: Callable[[np.ndarray, int], np.ndarray]

    @classmethod
    def from_coefficients(cls, coeffs: Sequence[int]) -> "PolyCircuit":
        cs = [int(c) for c in coeffs]

        def horner(x, p):
            acc = np.zeros_like(x)
            for c in reversed(cs):
                acc = (acc * x + c % p) % p
            return acc

        return cls(len(cs) - 1, horner)


def _power_run(base: int, length: int, q: int) -> np.ndarray:
    out = np.empty(length, dtype=np.int64)
    acc = 1
    for i in range(length):
        out[i] = acc
        acc = acc * base % q
    return out


def extract_coefficient(circuit: PolyCircuit, m: int, field: ModPrime, chunk: int = DEFAULT_CHUNK) -> int:
    """Coefficient of x**m modulo field.q, by a streaming inverse transform.

    Computes (q-1)^{-1} * sum_{i<q-1} omega^{-im} P(omega^i); working memory is
    O(chunk) regardless of the degree.
    """
    q = field.q
    if circuit.degree_bound >= q - 1 or q > WORD_PRIME_LIMIT:
        raise ConfigurationError(f"field {q} too small for degree bound {circuit.degree_bound}")
    total_pts = q - 1
    chunk = min(chunk, total_pts)
    w = field.omega
    w_inv_m = pow(w, -(m % total_pts), q) if m % total_pts else 1
    pts_base = _power_run(w, chunk, q)
    wts_base = _power_run(w_inv_m, chunk, q)
    step_pt = pow(w, chunk, q)
    step_wt = pow(w_inv_m, chunk, q)
    pt_off = wt_off = 1
    acc = 0
    for start in range(0, total_pts, chunk):
        size = min(chunk, total_pts - start)
        pts = pts_base[:size] * pt_off % q
        wts = wts_base[:size] * wt_off % q
        vals = np.asarray(circuit.evaluate(pts, q), dtype=np.int64) % q
        acc = (acc + int((vals * wts % q).sum() % q)) % q
        pt_off = pt_off * step_pt % q
        wt_off = wt_off * step_wt % q
    return acc * pow(total_pts, -1, q) % q
