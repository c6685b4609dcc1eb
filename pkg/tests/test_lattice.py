import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from arsys.errors import ValidationError
from arsys.lattice import (
    CosetSet,
    LatticeSubgroup,
    cs_canonicalize,
    cs_equal,
    cs_intersect,
    cs_subset,
    cs_sum,
    enumerate_prime_maximal_subgroups,
    hermite_normal_form,
    is_prime,
    lattice_residues,
    sublattices_of_prime_index,
)


def brute_elements(cs, bound):
    """Oracle: all elements of a CosetSet with coordinates in [-bound, bound]."""
    k = cs.k
    out = set()
    for v in itertools.product(range(-bound, bound + 1), repeat=k):
        if cs.contains(v):
            out.add(v)
    return out


def Z(k=1):
    return CosetSet.full(k)


def coset1(sub_rows, rep):
    return CosetSet.make(LatticeSubgroup.from_rows(sub_rows), [rep])


class TestHNF:
    def test_identity_fixed(self):
        H, U = hermite_normal_form([[1, 0], [0, 1]])
        assert H == ((1, 0), (0, 1))
        assert U == ((1, 0), (0, 1))

    def test_2x2_det2_example(self):
        # Oracle: exhaustive search over small unimodular U; exactly one U*A
        # satisfies the HNF conditions, and it is [[1,1],[0,2]].
        target = [[2, 0], [1, 1]]
        in_hnf = set()
        rng = range(-3, 4)
        for a, b, c, d in itertools.product(rng, repeat=4):
            if a * d - b * c not in (1, -1):
                continue
            rows = (
                (a * 2 + b * 1, b * 1),
                (c * 2 + d * 1, d * 1),
            )
            if rows[1][0] == 0 and rows[0][0] > 0 and rows[1][1] > 0:
                if 0 <= rows[0][1] < rows[1][1]:
                    in_hnf.add(rows)
        assert in_hnf == {((1, 1), (0, 2))}
        H, U = hermite_normal_form(target)
        assert H == ((1, 1), (0, 2))
        prod = tuple(
            tuple(sum(U[i][t] * target[t][j] for t in range(2)) for j in range(2))
            for i in range(2)
        )
        assert prod == H

    def test_diagonal_already_hnf(self):
        H, _ = hermite_normal_form([[5, 0], [0, 1]])
        assert H == ((5, 0), (0, 1))

    def test_transform_is_unimodular(self):
        rows = [[4, 2, 0], [1, 3, 1], [0, 0, 2]]
        H, U = hermite_normal_form(rows)
        prod = tuple(
            tuple(sum(U[i][t] * rows[t][j] for t in range(3)) for j in range(3))
            for i in range(3)
        )
        assert prod == H

    @settings(max_examples=60)
    @given(st.integers(1, 3), st.data())
    def test_unimodular_invariance(self, k, data):
        # H(U*A) == H(A) for U built from elementary integer row operations.
        rows = [
            [data.draw(st.integers(-4, 4)) for _ in range(k)] for _ in range(k)
        ]
        try:
            LatticeSubgroup.from_rows(rows)
        except ValidationError:
            return
        mixed = [list(r) for r in rows]
        for _ in range(data.draw(st.integers(0, 6))):
            i = data.draw(st.integers(0, k - 1))
            j = data.draw(st.integers(0, k - 1))
            if i == j:
                continue
            c = data.draw(st.integers(-3, 3))
            mixed[i] = [x + c * y for x, y in zip(mixed[i], mixed[j])]
        H1, _ = hermite_normal_form(rows)
        H2, _ = hermite_normal_form(mixed)
        assert tuple(H1) == tuple(H2)

    def test_singular_rejected(self):
        with pytest.raises(ValidationError):
            LatticeSubgroup.from_rows([[1, 2], [2, 4]])


class TestPrimeMaximalSubgroups:
    def test_k2_q2_matches_known_list(self):
        got = {L.basis for L in enumerate_prime_maximal_subgroups(2, 2)}
        assert got == {((1, 0), (0, 2)), ((1, 1), (0, 2)), ((2, 0), (0, 1))}

    def test_k1(self):
        assert [L.basis for L in enumerate_prime_maximal_subgroups(1, 5)] == [((5,),)]

    def test_counts(self):
        for k in range(1, 5):
            for q in (2, 3, 5):
                n = len(enumerate_prime_maximal_subgroups(k, q))
                assert n == (q**k - 1) // (q - 1)

    def test_nonprime_rejected(self):
        with pytest.raises(ValidationError):
            enumerate_prime_maximal_subgroups(2, 4)

    def test_quotient_size_is_q(self):
        for q in (2, 3):
            for L in enumerate_prime_maximal_subgroups(3, q):
                assert len(list(L.residues())) == q
                assert len({L.reduce(v) for v in itertools.product(range(-q, q), repeat=3)}) == q


class TestCosetOps:
    def test_sum_parity(self):
        odd = coset1([[2]], [1])
        assert cs_sum(odd, odd) == CosetSet.make(LatticeSubgroup.from_rows([[2]]), [[0]])

    def test_sum_absorption(self):
        two = CosetSet.group(LatticeSubgroup.from_rows([[2]]))
        assert cs_sum(two, Z()) == Z()

    def test_sum_mixed_moduli(self):
        # (1+2Z) + (0+3Z): oracle scan mod 6 says every residue is hit.
        a = coset1([[2]], [1])
        b = coset1([[3]], [0])
        s = cs_sum(a, b)
        assert s == Z()

    def test_intersect_crt(self):
        a = coset1([[2]], [1])
        b = coset1([[3]], [1])
        got = cs_intersect(a, b)
        assert got == coset1([[6]], [1])

    def test_intersect_self(self):
        a = coset1([[4]], [3])
        assert cs_intersect(a, a) == cs_canonicalize(a)

    def test_intersect_disjoint(self):
        evens = CosetSet.group(LatticeSubgroup.from_rows([[2]]))
        odds = coset1([[2]], [1])
        assert cs_intersect(evens, odds).is_empty

    def test_canonicalize_merges_to_full(self):
        a = CosetSet.make(LatticeSubgroup.from_rows([[2]]), [[0], [1]])
        assert cs_canonicalize(a) == Z()

    def test_canonicalize_fixed_point(self):
        a = CosetSet.full(2)
        assert cs_canonicalize(a) == a

    def test_canonicalize_period_detection(self):
        a = CosetSet.make(LatticeSubgroup.from_rows([[4]]), [[0], [2]])
        assert cs_canonicalize(a) == CosetSet.group(LatticeSubgroup.from_rows([[2]]))

    def test_canonicalize_idempotent_and_membership(self):
        a = CosetSet.make(
            LatticeSubgroup.from_rows([[4, 0], [0, 2]]), [[0, 0], [2, 0], [1, 1]]
        )
        c = cs_canonicalize(a)
        assert cs_canonicalize(c) == c
        for v in itertools.product(range(-4, 5), repeat=2):
            assert a.contains(v) == c.contains(v)

    def test_scale(self):
        a = coset1([[3]], [1])
        assert a.scale(2) == CosetSet.make(LatticeSubgroup.from_rows([[6]]), [[2]])
        assert a.scale(-1) == a.neg()

    def test_subset(self):
        four = CosetSet.group(LatticeSubgroup.from_rows([[4]]))
        two = CosetSet.group(LatticeSubgroup.from_rows([[2]]))
        assert cs_subset(four, two)
        assert not cs_subset(two, four)
        assert cs_subset(CosetSet.empty(1), four)

    @settings(max_examples=40, deadline=None)
    @given(st.data())
    def test_sum_intersect_match_bruteforce(self, data):
        # Randomized small cases, k <= 2: compare against residue-set arithmetic
        # modulo a common finite-index subgroup.
        k = data.draw(st.integers(1, 2))
        def draw_cs():
            diag = [data.draw(st.integers(1, 3)) for _ in range(k)]
            rows = [[diag[i] if i == j else 0 for j in range(k)] for i in range(k)]
            sub = LatticeSubgroup.from_rows(rows)
            nreps = data.draw(st.integers(1, 2))
            reps = [
                tuple(data.draw(st.integers(0, 5)) for _ in range(k))
                for _ in range(nreps)
            ]
            return CosetSet.make(sub, reps)

        a, b = draw_cs(), draw_cs()
        bound = 18
        ae, be = brute_elements(a, bound), brute_elements(b, bound)
        inner = 6
        s = cs_sum(a, b)
        inter = cs_intersect(a, b)
        sum_small = {
            tuple(x + y for x, y in zip(u, v))
            for u in ae for v in be
            if all(abs(x + y) <= inner for x, y in zip(u, v))
        }
        for v in itertools.product(range(-inner, inner + 1), repeat=k):
            assert s.contains(v) == (v in sum_small)
            assert inter.contains(v) == (v in ae and v in be)


class TestLatticeHelpers:
    def test_lattice_residues(self):
        big = LatticeSubgroup.from_rows([[2]])
        small = LatticeSubgroup.from_rows([[6]])
        assert lattice_residues(big, small) == [(0,), (2,), (4,)]

    def test_sublattices_of_prime_index(self):
        L = LatticeSubgroup.from_rows([[1, 0], [0, 2]])
        subs = sublattices_of_prime_index(L, 2)
        assert len(subs) == 3
        for S in subs:
            assert L.contains_lattice(S)
            assert S.det == 2 * L.det

    def test_is_prime(self):
        assert [n for n in range(20) if is_prime(n)] == [2, 3, 5, 7, 11, 13, 17, 19]

    def test_k0(self):
        L = LatticeSubgroup.full(0)
        assert L.det == 1
        assert list(L.residues()) == [()]
        assert L.reduce(()) == ()
        c = CosetSet.full(0)
        assert c.contains(())
        assert cs_sum(c, c) == c
        assert cs_intersect(c, CosetSet.empty(0)).is_empty
