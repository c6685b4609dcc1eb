import itertools

import pytest

from arsys.errors import ValidationError
from arsys.lattice import (
    CosetSet,
    LatticeSubgroup,
    cs_intersect,
    cs_subset,
    cs_sum,
    lattice_residues,
)
from arsys.roots import (
    DIVISIBLE,
    LONG,
    SHORT,
    RootSystemType,
    all_maximal_closed,
    gamma_pairs,
    vec_add,
)
from arsys.subroot import (
    FULL,
    PROPER_CLOSED,
    SEMI_CLOSED,
    common_period,
    enumerate_maximal_periodic,
    gradient_class,
    is_closed_subroot,
    is_maximal_periodic,
)
from arsys.classify import (
    ClassifyRequest,
    classify_all,
    classify_bc,
    classify_full_gradient,
    classify_proper_closed,
    classify_semi_closed,
)
from arsys.systems import (
    finite_system,
    saito_system,
    toroidal_system,
    twisted_affine_system,
)

T = RootSystemType.parse


def keys(descriptors):
    return sorted(d.canonical_key() for d in descriptors)


def periodic_only(descriptors, M):
    return [
        d for d in descriptors
        if all(cs.subgroup.contains_lattice(M) for _, cs in d.z_map)
    ]


def assert_matches_oracle(system, q_max, scale, cell_bound=64):
    M = common_period(system, scale=scale)
    oracle = enumerate_maximal_periodic(system, M, cell_bound=cell_bound)
    rep = classify_all(ClassifyRequest(system, q_max=q_max))
    assert keys(periodic_only(rep.descriptors, M)) == keys(oracle)
    return rep, oracle


class TestSemiClosed:
    def test_twisted_c2_exactly_two(self):
        system = twisted_affine_system(T("A3"), 2)
        rep = classify_semi_closed(ClassifyRequest(system, q_max=2))
        assert len(rep.entries) == 2
        for d, _ in rep.entries:
            assert gradient_class(d) == SEMI_CLOSED
        # the fork roots carry opposite parity classes
        parities = set()
        for d, _ in rep.entries:
            za, zb = d.z((2, -2)), d.z((2, 2))
            assert za != zb
            parities.add((za.contains((0,)), zb.contains((0,))))
        assert parities == {(True, False), (False, True)}

    def test_untwisted_empty_with_note(self):
        rep = classify_semi_closed(ClassifyRequest(toroidal_system(T("C3"), 2)))
        assert rep.entries == []
        assert rep.notes

    def test_simply_laced_empty(self):
        rep = classify_semi_closed(ClassifyRequest(toroidal_system(T("A2"), 1)))
        assert rep.entries == []

    def test_bc_rejected(self):
        with pytest.raises(ValidationError):
            classify_semi_closed(
                ClassifyRequest(twisted_affine_system(T("A4"), 2))
            )

    def test_twisted_g2_count_and_parameters(self):
        system = twisted_affine_system(T("D4"), 3)
        rep = classify_semi_closed(ClassifyRequest(system, q_max=3))
        assert len(rep.entries) == 6
        lam_ell = system.datum.lambda_ell
        gam = gamma_pairs(system.base, LONG)
        for d, prov in rep.entries:
            H = LatticeSubgroup.from_rows(prov["H"], k=1)
            # the long class sits inside H, which has index m = 3
            assert cs_subset(lam_ell, CosetSet.group(H))
            assert H.det == 3 * system.datum.lambda_s.subgroup.det
            # tau(a) != -tau(b) for every pair summing long
            for a, b in gam:
                s = vec_add(d.z(a).reps[0], d.z(b).reps[0])
                assert not H.contains(s)

    def test_g2_chain_condition(self):
        # For every admissible map there are short roots b1, b2, b3 with
        # consecutive pairs summing long whose value sums exhaust the
        # nonzero quotient classes.
        system = twisted_affine_system(T("D4"), 3)
        rep = classify_semi_closed(ClassifyRequest(system, q_max=3))
        base = system.base
        shorts = base.of_class(SHORT)
        gam = set(gamma_pairs(base, LONG))
        for d, prov in rep.entries:
            H = LatticeSubgroup.from_rows(prov["H"], k=1)
            found = False
            for chain in itertools.product(shorts, repeat=3):
                if (chain[0], chain[1]) in gam and (chain[1], chain[2]) in gam:
                    sums = {
                        H.reduce(vec_add(d.z(chain[i]).reps[0],
                                         d.z(chain[i + 1]).reps[0]))
                        for i in range(2)
                    }
                    nonzero = {r for r in H.residues() if any(r)}
                    want = {H.reduce(r) for r in nonzero}
                    if sums == want:
                        found = True
                        break
            assert found

    def test_twisted_f4_count(self):
        system = twisted_affine_system(T("E6"), 2)
        rep = classify_semi_closed(ClassifyRequest(system, q_max=2))
        # 3 two-two splits x 2 value assignments x 2 half-sum values
        assert len(rep.entries) == 12
        for d, _ in rep.entries:
            assert gradient_class(d) == SEMI_CLOSED
            assert is_maximal_periodic(d, common_period(system, [d]))

    def test_twisted_b3_shapes(self):
        system = twisted_affine_system(T("D4"), 2)
        rep = classify_semi_closed(ClassifyRequest(system, q_max=2))
        base = system.base
        lam_ell = system.datum.lambda_ell
        assert rep.entries
        for d, prov in rep.entries:
            # short sets partition the short class into the two parity blocks
            zsets = {d.z(a) for a in d.gradient
                     if base.length_class[a] == SHORT}
            assert len(zsets) == 2
            union = cs_sum(CosetSet.make(lam_ell.subgroup, [(0,)]), CosetSet.full(1))
            # the two blocks are disjoint and cover the short set
            a, b = sorted(zsets, key=lambda c: c.to_json()["reps"])
            assert cs_intersect(a, b).is_empty
            got = sorted(set(a.residues_mod(lam_ell.subgroup))
                         | set(b.residues_mod(lam_ell.subgroup)))
            assert got == system.datum.lambda_s.residues_mod(lam_ell.subgroup)
            # long roots present carry the full long set
            for g in d.gradient:
                if base.length_class[g] == LONG:
                    assert d.z(g) == lam_ell


class TestFullGradient:
    def test_toroidal_a2_counts(self):
        system = toroidal_system(T("A2"), 1)
        rep = classify_full_gradient(ClassifyRequest(system, q_max=2))
        assert len(rep.entries) == 4

    def test_toroidal_rank2_k2_count(self):
        # q^n * (q^k - 1)/(q - 1) = 4 * 3 at q = 2 for a rank-2 base
        for base in ("A2", "B2"):
            system = toroidal_system(T(base), 2)
            rep = classify_full_gradient(ClassifyRequest(system, q_max=2))
            assert len(rep.entries) == 12, base

    def test_all_outputs_full_gradient(self):
        system = twisted_affine_system(T("A3"), 2)
        rep = classify_full_gradient(ClassifyRequest(system, q_max=3))
        assert len(rep.entries) == 11
        for d, _ in rep.entries:
            assert gradient_class(d) == FULL

    def test_bn_distinct_coset_condition(self):
        # Distinct coset blocks of the short set never sum into the long set.
        system = twisted_affine_system(T("D4"), 2)
        rep = classify_full_gradient(ClassifyRequest(system, q_max=3))
        lam_ell = system.datum.lambda_ell
        seen_split = 0
        for d, prov in rep.entries:
            H = LatticeSubgroup.from_rows(prov["H"], k=1)
            zshort = next(d.z(a) for a in d.gradient
                          if system.base.length_class[a] == SHORT)
            reps = zshort.residues_mod(H)
            if len(reps) > 1:
                seen_split += 1
            for x, y in itertools.combinations(reps, 2):
                assert not lam_ell.contains(vec_add(x, y))
        assert seen_split > 0

    def test_long_intersections_nonempty(self):
        system = saito_system(3)
        rep = classify_full_gradient(ClassifyRequest(system, q_max=2))
        for d, _ in rep.entries:
            for a in d.gradient:
                if system.base.length_class[a] == LONG:
                    assert not d.z(a).is_empty
                    assert cs_subset(d.z(a), system.datum.lambda_ell)

    def test_bc_deferred(self):
        rep = classify_full_gradient(
            ClassifyRequest(twisted_affine_system(T("A4"), 2))
        )
        assert rep.entries == []
        assert any("classify_bc" in n for n in rep.notes)


class TestProperClosed:
    def test_untwisted_lifts_everything(self):
        system = toroidal_system(T("A2"), 1)
        rep = classify_proper_closed(ClassifyRequest(system))
        assert len(rep.entries) == 3
        for d, _ in rep.entries:
            assert gradient_class(d) == PROPER_CLOSED
            for root in d.gradient:
                assert d.z(root) == CosetSet.full(1)

    def test_twisted_drops_long_only(self):
        # In a twisted system the all-long maximal subsystem is not lifted.
        system = twisted_affine_system(T("A3"), 2)  # base C_2
        rep = classify_proper_closed(ClassifyRequest(system))
        base = system.base
        lifted = {frozenset(d.gradient) for d, _ in rep.entries}
        all_subs = {frozenset(s) for s in all_maximal_closed(base)}
        long_only = {
            s for s in all_subs
            if all(base.length_class[a] == LONG for a in s)
        }
        assert long_only
        assert lifted == all_subs - long_only

    def test_untwisted_keeps_long_only(self):
        system = toroidal_system(T("C3"), 1)
        rep = classify_proper_closed(ClassifyRequest(system))
        assert len(rep.entries) == len(all_maximal_closed(system.base))

    def test_bc_rejected(self):
        with pytest.raises(ValidationError):
            classify_proper_closed(ClassifyRequest(finite_system(T("BC2"))))


class TestBC:
    def test_split_lifts_maximal(self):
        # The short and long sets coincide here, so the empty slot set is
        # admissible alongside the proper nonempty ones.
        system = twisted_affine_system(T("A4"), 2)
        rep = classify_bc(ClassifyRequest(system, q_max=2))
        split = [(d, p) for d, p in rep.entries if p["case"] == "bc/split-lift"]
        assert {tuple(p["J"]) for _, p in split} == {(), (0,), (1,)}
        M = common_period(system)
        for d, _ in split:
            assert is_maximal_periodic(d, M)

    def test_split_lift_needs_nonempty_when_twisted_shorts(self):
        # Saito-style data over BC: build a twisted-short BC system and
        # check the empty slot set is replaced by coset-drop systems.
        from arsys.lattice import CosetSet as CS
        from arsys.systems import custom_system
        from arsys.errors import ValidationError as VE

        lam_ell = CS.group(LatticeSubgroup.from_rows([[2]]))
        lam_d = CS.make(LatticeSubgroup.from_rows([[2]]), [[0]])
        from arsys.systems import ExtensionDatum

        datum = ExtensionDatum(CS.full(1), CS.full(1), lam_ell, lam_d)
        system = custom_system(T("BC2"), 1, datum)
        rep = classify_bc(ClassifyRequest(system, q_max=2))
        js = {tuple(p["J"]) for _, p in rep.entries if p["case"] == "bc/split-lift"}
        assert () not in js
        drops = [p for _, p in rep.entries if p["case"] == "bc/short-coset-drop"]
        assert drops

    def test_gradient_types(self):
        # |J| = r gives a gradient with a BC_r block and a rank n-r block.
        system = toroidal_system(T("BC3"), 1)
        rep = classify_bc(ClassifyRequest(system, q_max=2))
        from arsys.roots import SubSystemView

        for d, prov in rep.entries:
            if prov["case"] != "bc/split-lift":
                continue
            J = prov["J"]
            fams = sorted(
                c.detect_family() for c in SubSystemView(d.gradient).components()
            )
            if 0 < len(J) < 3:
                assert ("BC", len(J)) in fams

    def test_untwisted_bc2_matches_oracle(self):
        system = toroidal_system(T("BC2"), 1)
        rep, oracle = assert_matches_oracle(system, 2, 2)

    def test_twisted_bc2_matches_oracle(self):
        system = twisted_affine_system(T("A4"), 2)
        assert_matches_oracle(system, 2, 1)

    def test_non_bc_rejected(self):
        with pytest.raises(ValidationError):
            classify_bc(ClassifyRequest(toroidal_system(T("A2"), 1)))

    def test_divisible_extension_formula(self):
        # Divisible sets of full-extension outputs equal the intersected
        # sum of the two long sets spanning each divisible root.
        system = toroidal_system(T("BC2"), 1)
        rep = classify_bc(ClassifyRequest(system, q_max=2))
        base = system.base
        gamma_ell = gamma_pairs(base, DIVISIBLE)
        lam_d = system.datum.lambda_d
        for d, prov in rep.entries:
            if prov["case"] != "bc/full-extension":
                continue
            for root in d.gradient:
                if base.length_class[root] != DIVISIBLE:
                    continue
                g1, g2 = next(
                    (a, b) for a, b in gamma_ell if vec_add(a, b) == root
                )
                expect = cs_intersect(cs_sum(d.z(g1), d.z(g2)), lam_d)
                assert d.z(root) == expect


class TestClassifyAll:
    def test_toroidal_a2_seven(self):
        rep = classify_all(ClassifyRequest(toroidal_system(T("A2"), 1), q_max=2))
        assert len(rep.entries) == 7

    def test_matches_oracle_matrix(self):
        cases = [
            (toroidal_system(T("A2"), 1), 2, 2),
            (toroidal_system(T("B2"), 1), 2, 2),
            (twisted_affine_system(T("A3"), 2), 2, 1),
            (twisted_affine_system(T("D4"), 3), 3, 1),
            (finite_system(T("BC2")), 2, 1),
        ]
        for system, q_max, scale in cases:
            assert_matches_oracle(system, q_max, scale)

    def test_twisted_c2_q3_cases_disjoint(self):
        system = twisted_affine_system(T("A3"), 2)
        rep = classify_all(ClassifyRequest(system, q_max=3))
        by_class = {}
        for d, prov in rep.entries:
            by_class.setdefault(prov["gradient_class"], []).append(d)
        assert len(by_class[SEMI_CLOSED]) == 2
        assert len(by_class[FULL]) == 11
        assert len(by_class[PROPER_CLOSED]) == 2
        assert len(rep.entries) == 15  # pairwise distinct after dedup

    def test_finite_equals_borel_de_siebenthal(self):
        for name in ("A2", "B3", "G2", "C3", "BC2"):
            system = finite_system(T(name))
            rep = classify_all(ClassifyRequest(system, q_max=2))
            got = {frozenset(d.gradient) for d in rep.descriptors}
            expect = {frozenset(s) for s in all_maximal_closed(system.base)}
            assert got == expect, name
            for d in rep.descriptors:
                assert all(cs == CosetSet.full(0) for _, cs in d.z_map)

    def test_case_filter(self):
        system = toroidal_system(T("A2"), 1)
        rep = classify_all(ClassifyRequest(system, q_max=2, cases=(FULL,)))
        assert len(rep.entries) == 4
        assert all(p["gradient_class"] == FULL for _, p in rep.entries)

    def test_every_output_closed_and_classified(self):
        for system in (
            toroidal_system(T("B2"), 2),
            twisted_affine_system(T("D4"), 2),
            saito_system(2),
        ):
            rep = classify_all(ClassifyRequest(system, q_max=2))
            for d, prov in rep.entries:
                assert is_closed_subroot(d)[0]
                assert prov["gradient_class"] in (FULL, PROPER_CLOSED, SEMI_CLOSED)

    def test_dedup_idempotent_byte_stable(self):
        import json

        system = twisted_affine_system(T("A3"), 2)
        a = classify_all(ClassifyRequest(system, q_max=2)).to_json()
        b = classify_all(ClassifyRequest(system, q_max=2)).to_json()
        assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)

    def test_qmax_validation(self):
        with pytest.raises(ValidationError):
            ClassifyRequest(toroidal_system(T("A2"), 1), q_max=1)
