import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from famfft import oracle
from famfft.errors import FamilySystemError, InfantViolationError
from famfft.graphs import WeightedDigraph
from famfft.infants import (
    FamilySystem,
    InfantEncoding,
    MatrixStats,
    characteristic_matrix,
    declared_poly_factor,
    decode_fields,
    detect_min_k_infants,
    encode_monomial,
    infant_formula,
    matrix_stats,
    pad_families,
    partition_solve_infants,
    rowcode,
    stats_of_matrix,
    target_exponent_infants,
)
from famfft.kronecker import (
    MultiMonomial,
    PartitionProblem,
    StandardEncoding,
    detect_min_k_dense,
    partition_solve,
)
from famfft.solvers.domatic import dominating_sets, domatic_system
from famfft.solvers.tsp import closed_walk_circuit, max_degree_system

from conftest import cycle, random_regular


def row_normalized(M):
    return all(rowcode(r) >= 0 for r in M)


def stats_by_hand(M, q):
    """Statistics computed straight from the definitions."""
    col0 = weight = rowsum = code = 0
    for i, row in enumerate(M):
        rc = -row[0] + sum(row[j] * 2**j for j in range(1, q))
        col0 += row[0]
        weight += sum(row)
        rowsum += rc
        code += (2**q - 1) ** i * rc
    return MatrixStats(col0, weight, rowsum, code)


class TestRowcode:
    @pytest.mark.parametrize("row,code", [([1, 0, 0], -1), ([1, 1, 0], 1), ([0, 0, 1], 4)])
    def test_examples(self, row, code):
        assert rowcode(row) == code

    @pytest.mark.parametrize("q", [1, 2, 3, 4])
    def test_only_lonely_infant_is_negative(self, q):
        for row in itertools.product((0, 1), repeat=q):
            assert (rowcode(row) < 0) == (row == (1,) + (0,) * (q - 1))

    @pytest.mark.parametrize("p,q", [(1, 2), (2, 2), (2, 3), (3, 3), (2, 4)])
    def test_code_bound(self, p, q):
        for bits in itertools.product((0, 1), repeat=p * q):
            E = [list(bits[i * q : (i + 1) * q]) for i in range(p)]
            if row_normalized(E):
                assert 0 <= stats_of_matrix(E, q).code < (2**q - 1) ** p


@pytest.mark.parametrize("p,q", [(1, 2), (1, 3), (2, 2), (2, 3)])
def test_coding_uniqueness(p, q):
    """Equal statistics force M = E for 0/1 row-normalized E."""
    by_stats = {}
    for bits in itertools.product((0, 1), repeat=p * q):
        E = tuple(tuple(bits[i * q : (i + 1) * q]) for i in range(p))
        if row_normalized(E):
            by_stats[stats_of_matrix(E, q)] = E
    for vals in itertools.product(range(4), repeat=p * q):
        M = tuple(tuple(vals[i * q : (i + 1) * q]) for i in range(p))
        if not row_normalized(M):
            continue
        E = by_stats.get(stats_of_matrix(M, q))
        assert E is None or E == M


class TestFamilySystem:
    def test_basic(self):
        S = FamilySystem(6, ((1, 2), (3, 4)))
        assert (S.p, S.q, S.infants, S.leftover) == (2, 2, (1, 3), (5, 6))
        assert S.dump() == "1 2\n3 4"
        assert S.admits({1, 2}) and not S.admits({1, 3, 4})

    @pytest.mark.parametrize(
        "fams,n",
        [(((1, 2), (2, 3)), 4), (((1, 2, 3),), 2), (((1, 1),), 3), (((),), 2), (((1, 2), (3, 4)), 3)],
    )
    def test_invalid(self, fams, n):
        with pytest.raises(FamilySystemError):
            FamilySystem(n, fams)

    def test_padding_uses_lowest_unused(self):
        S = pad_families([(4, 6), (2,)], 8, 3)
        assert S.families == ((4, 6, 1), (2, 3, 5))
        with pytest.raises(FamilySystemError):
            pad_families([(1, 2, 3)], 5, 2)
        with pytest.raises(FamilySystemError):
            pad_families([(1,), (2,)], 3, 2)


class TestMatrixStats:
    def test_full_two_by_two(self):
        S = FamilySystem(4, ((1, 2), (3, 4)))
        assert matrix_stats({1, 2, 3, 4}, S) == MatrixStats(2, 4, 2, 4)

    def test_empty(self):
        assert matrix_stats(set(), FamilySystem(4, ((1, 2), (3, 4)))) == MatrixStats(0, 0, 0, 0)

    def test_violation(self):
        with pytest.raises(InfantViolationError):
            matrix_stats({1, 3}, FamilySystem(4, ((1, 2), (3, 4))))

    def test_random_against_hand_builder(self, rng):
        for _ in range(100):
            p, q = rng.randint(1, 3), rng.randint(2, 4)
            n = p * q + rng.randint(0, 3)
            elems = list(range(1, n + 1))
            rng.shuffle(elems)
            S = FamilySystem(n, tuple(tuple(elems[i * q : (i + 1) * q]) for i in range(p)))
            F = {v for v in range(1, n + 1) if rng.random() < 0.5}
            if not S.admits(F):
                continue
            M = [[int(v in F) for v in fam] for fam in S.families]
            assert characteristic_matrix(F, S) == M
            assert matrix_stats(F, S) == stats_by_hand(M, q)


class TestEncoding:
    def test_strides_increase(self):
        enc = InfantEncoding(9, 2, 3, 3, 2)
        assert list(enc.strides) == sorted(set(enc.strides))

    def test_empty_set(self):
        S = FamilySystem(4, ((1, 2),))
        assert encode_monomial(set(), 0, 0, S, InfantEncoding.for_system(S)) == 0

    def test_target_by_hand(self):
        S = FamilySystem(2, ((1, 2),))
        enc = InfantEncoding.for_system(S, 1)
        N = 3
        for k in range(3):
            assert target_exponent_infants(S, enc, k) == N**3 + 2 * N**5 + N**7 + 4 * N**9 + k * N**10 * 4 * 3

    def test_target_without_families(self):
        S = FamilySystem(3, ())
        enc = InfantEncoding.for_system(S, 2)
        assert decode_fields(target_exponent_infants(S, enc, 4), enc) == (3, 7, 0, 0, 0, 0, 4)

    @pytest.mark.parametrize("fams,n", [(((1, 2), (3, 4)), 5), (((2, 5, 1),), 6), ((), 4)])
    def test_target_is_full_set(self, fams, n):
        S = FamilySystem(n, fams)
        enc = InfantEncoding.for_system(S, 2)
        for k in (0, 3):
            assert encode_monomial(range(1, n + 1), n, k, S, enc) == target_exponent_infants(S, enc, k)

    def test_violation_rejected(self):
        S = FamilySystem(4, ((1, 2),))
        with pytest.raises(InfantViolationError):
            encode_monomial({1, 3}, 2, 0, S, InfantEncoding.for_system(S))

    @settings(max_examples=150, deadline=None)
    @given(st.integers(0, 2**32), st.integers(0, 4))
    def test_decode_roundtrip(self, seed, k):
        rng = random.Random(seed)
        p, q = rng.randint(0, 2), rng.randint(2, 3)
        n = p * q + rng.randint(0, 3)
        elems = list(range(1, n + 1))
        rng.shuffle(elems)
        S = FamilySystem(n, tuple(tuple(elems[i * q : (i + 1) * q]) for i in range(p)))
        F = {v for v in elems if rng.random() < 0.5}
        if not S.admits(F):
            F |= {fam[1] for fam in S.families}
        enc = InfantEncoding.for_system(S, 1)
        fields = decode_fields(encode_monomial(F, len(F), k, S, enc), enc)
        L = S.leftover
        st_ = matrix_stats(F, S) if p else MatrixStats(0, 0, 0, 0)
        assert fields[0] == len(F & set(L))
        assert fields[1] == sum(1 << i for i, v in enumerate(L) if v in F)
        assert fields[2:6] == (st_.colweight0, st_.weight, st_.rowsum, st_.code)
        assert fields[6] == k


class TestDetection:
    def test_domatic_c4(self):
        G = cycle(4)
        S = domatic_system(G)
        assert S.p == 1
        fam = dominating_sets(G)
        for k in (1, 2, 3):
            prob = PartitionProblem(4, k, (fam,) * k)
            assert partition_solve_infants(prob, S) == partition_solve(prob) == (k <= 2)

    def test_empty_system_matches_plain(self):
        rng = random.Random(5)
        for _ in range(100):
            n = rng.randint(1, 6)
            d = rng.randint(0, 2)
            factors = [
                [
                    MultiMonomial.of(rng.sample(range(1, n + 1), rng.randint(0, n)), z=rng.randint(0, d), coefficient=rng.randint(1, 2))
                    for _ in range(rng.randint(1, 5))
                ]
                for _ in range(rng.randint(1, n))
            ]
            want = tuple(detect_min_k_dense(factors, StandardEncoding(n, d)))
            assert tuple(detect_min_k_infants(factors, FamilySystem(n, ()), d)) == want

    def test_sparse_and_pointwise_agree(self):
        rng = random.Random(9)
        S = FamilySystem(6, ((1, 2, 3),))
        for _ in range(30):
            factors = []
            for _ in range(rng.randint(1, 3)):
                f = []
                for _ in range(rng.randint(1, 6)):
                    F = set(rng.sample(range(1, 7), rng.randint(0, 6)))
                    if 1 in F:
                        F.add(2)
                    f.append(MultiMonomial.of(sorted(F), z=rng.randint(0, 2)))
                factors.append(f)
            a = detect_min_k_infants(factors, S, 2)
            b = detect_min_k_infants(factors, S, 2, pointwise=True)
            assert tuple(a) == tuple(b) == tuple(detect_min_k_dense(factors, StandardEncoding(6, 2)))

    def test_violating_monomial_is_an_error(self):
        S = FamilySystem(4, ((1, 2),))
        with pytest.raises(InfantViolationError):
            detect_min_k_infants([[MultiMonomial.of([1, 3])], [MultiMonomial.of([2, 4])]], S)

    def test_tsp_three_regular(self):
        G = random_regular(3, 10, seed=4)
        D = WeightedDigraph.symmetric(G, {e: 1 + (sum(e) % 2) for e in G.edges}, M=2)
        S = max_degree_system(G)
        det = detect_min_k_infants([closed_walk_circuit(D, hints={"max_col0": 5})], S, d=2)
        assert det.k == oracle.held_karp(D)

    def test_domain_accounting(self):
        S = FamilySystem(8, ((1, 2, 3), (4, 5, 6)))
        fam = [tuple(c) for r in range(9) for c in itertools.combinations(range(1, 9), r) if S.admits(c)]
        det = detect_min_k_infants([[MultiMonomial.of(s) for s in fam]] * 2, S, 0)
        x = det.extra
        assert det.domain_size <= declared_poly_factor(8) * infant_formula(8, 0, 2, 3, 2)
        assert x["encoded_bound"] == InfantEncoding(8, 2, 3, 2, 0).domain_size
        assert x["infant_core"] == 4 * 49 < x["plain_core"] == 256
