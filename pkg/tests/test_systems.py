import itertools

import pytest

from arsys.errors import ValidationError
from arsys.lattice import CosetSet, LatticeSubgroup, cs_equal
from arsys.roots import RootSystemType, build_root_system
from arsys.subroot import CellQuotient, common_period
from arsys.systems import (
    AffineReflectionSystem,
    ExtensionDatum,
    build_system,
    custom_system,
    finite_system,
    saito_system,
    toroidal_system,
    twisted_affine_system,
    validate_extension_datum,
)

T = RootSystemType.parse


def all_builtin_systems():
    out = [
        finite_system(T("A2")),
        finite_system(T("BC2")),
        toroidal_system(T("A2"), 1),
        toroidal_system(T("A2"), 2),
        toroidal_system(T("B2"), 2),
        toroidal_system(T("BC2"), 1),
        twisted_affine_system(T("A3"), 2),
        twisted_affine_system(T("A4"), 2),
        twisted_affine_system(T("D4"), 2),
        twisted_affine_system(T("D4"), 3),
        twisted_affine_system(T("E6"), 2),
        saito_system(2),
        saito_system(3),
    ]
    return out


class TestValidation:
    def test_untwisted_toroidal_valid(self):
        s = toroidal_system(T("A2"), 2)
        assert validate_extension_datum(s.base, s.datum).ok

    def test_twisted_affine_d4_order3_valid(self):
        s = twisted_affine_system(T("D4"), 3)
        assert s.base.type == T("G2")
        assert cs_equal(
            s.datum.lambda_ell,
            CosetSet.group(LatticeSubgroup.from_rows([[3]])),
        )
        assert validate_extension_datum(s.base, s.datum).ok

    def test_missing_zero_reported(self):
        bad = ExtensionDatum(
            CosetSet.full(1),
            CosetSet.full(1),
            CosetSet.make(LatticeSubgroup.from_rows([[2]]), [[1]]),
        )
        rep = validate_extension_datum(build_root_system(T("B2")), bad)
        assert not rep.ok
        assert any("0 not in" in v for v in rep.violations)

    def test_mild_assumption_reported(self):
        # long set a non-subgroup union for B_2: every clause named.
        lam_ell = CosetSet.make(LatticeSubgroup.from_rows([[4]]), [[0], [1], [3]])
        bad = ExtensionDatum(CosetSet.full(1), CosetSet.full(1), lam_ell)
        rep = validate_extension_datum(build_root_system(T("B2")), bad)
        assert any("mild assumption" in v for v in rep.violations)

    def test_reflection_axiom_violation(self):
        # Lambda_ell - 2*Lambda_s must stay long: fails for 4Z with full shorts.
        bad = ExtensionDatum(
            CosetSet.full(1),
            CosetSet.full(1),
            CosetSet.group(LatticeSubgroup.from_rows([[4]])),
        )
        rep = validate_extension_datum(build_root_system(T("B2")), bad)
        assert any("not contained in" in v for v in rep.violations)

    def test_all_builtins_pass(self):
        for s in all_builtin_systems():
            rep = validate_extension_datum(s.base, s.datum)
            assert rep.ok, (s.to_json(), rep.violations)

    def test_custom_rejects_with_report(self):
        bad = ExtensionDatum(
            CosetSet.full(1),
            CosetSet.full(1),
            CosetSet.make(LatticeSubgroup.from_rows([[2]]), [[1]]),
        )
        with pytest.raises(ValidationError) as err:
            custom_system(T("B2"), 1, bad)
        assert err.value.report is not None
        assert not err.value.report.ok


class TestConstructors:
    def test_twisted_affine_table(self):
        # (outer, order) -> (base, long scale); divisible offsets for A_even.
        cases = {
            ("A3", 2): ("C2", 2),
            ("A5", 2): ("C3", 2),
            ("D4", 2): ("B3", 2),
            ("D5", 2): ("B4", 2),
            ("E6", 2): ("F4", 2),
            ("D4", 3): ("G2", 3),
        }
        for (outer, order), (base, scale) in cases.items():
            s = twisted_affine_system(T(outer), order)
            assert s.base.type == T(base)
            assert s.nullity == 1
            assert s.datum.lambda_ell == CosetSet.group(
                LatticeSubgroup.from_rows([[scale]])
            )
            assert s.twisted

    def test_twisted_affine_bc(self):
        s = twisted_affine_system(T("A4"), 2)
        assert s.base.type == T("BC2")
        assert s.datum.lambda_ell == CosetSet.full(1)
        assert s.datum.lambda_d == CosetSet.make(
            LatticeSubgroup.from_rows([[2]]), [[1]]
        )
        assert s.twisted
        # divisible sets need not contain zero
        assert not s.datum.lambda_d.contains((0,))

    def test_invalid_pairs_rejected(self):
        for outer, order in [("A2", 2), ("B3", 2), ("D4", 4), ("E6", 3)]:
            with pytest.raises(ValidationError):
                twisted_affine_system(T(outer), order)

    def test_saito(self):
        s = saito_system(2)
        assert s.base.type == T("C2")
        assert s.nullity == 2
        assert s.datum.lambda_s == CosetSet.full(2)
        assert s.datum.lambda_ell == CosetSet.group(
            LatticeSubgroup.from_rows([[1, 0], [0, 2]])
        )

    def test_untwisted_flag(self):
        assert not toroidal_system(T("A2"), 2).twisted
        assert not toroidal_system(T("BC2"), 1).twisted
        assert twisted_affine_system(T("A3"), 2).twisted
        # equal short/long but offset divisible set: still twisted
        assert twisted_affine_system(T("A4"), 2).twisted

    def test_build_system_dispatch(self):
        for s in all_builtin_systems():
            rebuilt = build_system(s.to_json())
            assert rebuilt.base.type == s.base.type
            assert rebuilt.datum == s.datum
            assert rebuilt.nullity == s.nullity

    def test_unknown_kind(self):
        with pytest.raises(ValidationError):
            build_system({"kind": "nope"})


class TestSystemInvariants:
    def test_symmetry_of_translation_sets(self):
        # Each class set equals its own negation.
        for s in all_builtin_systems():
            for cs in (s.datum.lambda0, s.datum.lambda_s, s.datum.lambda_ell,
                       s.datum.lambda_d):
                if cs is not None:
                    assert cs_equal(cs, cs.neg()), s.to_json()

    def test_reflection_closure_on_quotient(self):
        # s_a(b) stays real for all cells of a finite quotient model.
        for s in all_builtin_systems():
            M = common_period(s)
            q = CellQuotient(s, M)
            for i in range(q.n):
                for j in range(q.n):
                    assert 0 <= q.refl[i][j] < q.n

    def test_nullity_matches_lambda0(self):
        for s in all_builtin_systems():
            assert s.datum.lambda0.k == s.nullity
            # Lambda_0 generates a finite-index subgroup of Z^k, so its rank
            # is the nullity by construction.
            assert s.datum.lambda0.subgroup.det >= 1

    def test_untwisted_iff_single_set(self):
        for s in all_builtin_systems():
            sets = [s.datum.lambda_s, s.datum.lambda_ell]
            if s.datum.lambda_d is not None:
                sets.append(s.datum.lambda_d)
            single = all(cs == sets[0] for cs in sets)
            assert s.twisted == (not single)

    def test_datum_mismatch_rejected(self):
        datum = ExtensionDatum(CosetSet.full(2), CosetSet.full(2), CosetSet.full(2))
        with pytest.raises(ValidationError):
            AffineReflectionSystem(build_root_system(T("A2")), 1, datum)
        with pytest.raises(ValidationError):
            AffineReflectionSystem(build_root_system(T("BC2")), 2, datum)
