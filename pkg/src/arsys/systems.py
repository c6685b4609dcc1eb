"""Extension data, their axioms, and assembled affine reflection systems.

An extension datum attaches a translation set to each length class of a
finite root system; by Weyl invariance four sets suffice (imaginary, short,
long, divisible).  Every set is a finite union of cosets of a full-rank
subgroup of Z^k, which makes all axioms finitely checkable: the reflection
axiom is verified per distinct (class, class, Cartan integer) signature,
which is sound and complete for coset-periodic sets.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from .errors import ValidationError
from .lattice import (
    CosetSet,
    LatticeSubgroup,
    cs_canonicalize,
    cs_equal,
    cs_intersect,
    cs_subset,
    cs_sum,
)
from .roots import (
    DIVISIBLE,
    LONG,
    SHORT,
    Root,
    RootSystem,
    RootSystemType,
    build_root_system,
    cartan_integer,
    reflect_vector,
)


@dataclass(frozen=True)
class ExtensionDatum:
    """The translation sets (Lambda_0, Lambda_s, Lambda_ell, Lambda_d).

    ``lambda_d`` is present exactly for non-reduced systems.  For
    simply-laced systems the construction convention is lambda_s ==
    lambda_ell (a single class).
    """

    lambda0: CosetSet
    lambda_s: CosetSet
    lambda_ell: CosetSet
    lambda_d: Optional[CosetSet] = None

    def __post_init__(self):
        object.__setattr__(self, "lambda0", cs_canonicalize(self.lambda0))
        object.__setattr__(self, "lambda_s", cs_canonicalize(self.lambda_s))
        object.__setattr__(self, "lambda_ell", cs_canonicalize(self.lambda_ell))
        if self.lambda_d is not None:
            object.__setattr__(self, "lambda_d", cs_canonicalize(self.lambda_d))

    @property
    def k(self) -> int:
        return self.lambda_s.k

    def for_class(self, cls: str) -> CosetSet:
        if cls == SHORT:
            return self.lambda_s
        if cls == LONG:
            return self.lambda_ell
        if cls == DIVISIBLE:
            if self.lambda_d is None:
                raise ValidationError("datum has no divisible class")
            return self.lambda_d
        raise ValidationError(f"unknown length class {cls!r}")

    @property
    def untwisted(self) -> bool:
        if self.lambda_s != self.lambda_ell:
            return False
        return self.lambda_d is None or self.lambda_d == self.lambda_s

    def common_period(self) -> LatticeSubgroup:
        """Intersection of the subgroup parts of all sets present."""
        period = self.lambda0.subgroup
        for cs in (self.lambda_s, self.lambda_ell, self.lambda_d):
            if cs is not None:
                period = period.intersect(cs.subgroup)
        return period

    def to_json(self):
        out = {
            "lambda0": self.lambda0.to_json(),
            "lambda_s": self.lambda_s.to_json(),
            "lambda_ell": self.lambda_ell.to_json(),
        }
        if self.lambda_d is not None:
            out["lambda_d"] = self.lambda_d.to_json()
        return out

    @staticmethod
    def from_json(obj) -> "ExtensionDatum":
        return ExtensionDatum(
            CosetSet.from_json(obj["lambda0"]),
            CosetSet.from_json(obj["lambda_s"]),
            CosetSet.from_json(obj["lambda_ell"]),
            CosetSet.from_json(obj["lambda_d"]) if "lambda_d" in obj else None,
        )


@dataclass
class ValidationReport:
    violations: List[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, clause: str):
        self.violations.append(clause)

    def to_json(self):
        return {"ok": self.ok, "violations": list(self.violations)}


def _scaled_sum(a: CosetSet, c: int, b: CosetSet) -> CosetSet:
    """The set a + c*b; c may be any integer (0 leaves a unchanged)."""
    if c == 0:
        return cs_canonicalize(a)
    return cs_sum(a, b.scale(c))


def _zero(k: int) -> Tuple[int, ...]:
    return (0,) * k


def validate_extension_datum(roots_view, datum: ExtensionDatum,
                             lambda0_required: bool = True) -> ValidationReport:
    """Check every axiom clause; violations are reported, never raised.

    ``roots_view`` is a RootSystem or SubSystemView: anything exposing
    ``roots`` (iterable), ``length_class`` (map) and living in a common
    ambient space.  The reflection axiom is checked once per distinct
    (class(beta), class(alpha), pairing) signature.  The per-family
    containment lemmas and the subgroup facts (including the rank-2 mild
    assumption) are each checked explicitly and reported by name.
    """
    rep = ValidationReport()
    k = datum.k
    zero = _zero(k)
    roots = list(roots_view.roots)
    lclass = roots_view.length_class
    present = sorted({lclass[a] for a in roots})

    def lam(cls: str) -> CosetSet:
        if cls == DIVISIBLE and datum.lambda_d is None:
            raise ValidationError("datum lacks a divisible set but the system has divisible roots")
        return datum.for_class(cls)

    # Zero membership / nonemptiness.
    if lambda0_required and not datum.lambda0.contains(zero):
        rep.add("0 not in Lambda_0")
    for cls in present:
        if cls == DIVISIBLE:
            if lam(cls).is_empty:
                rep.add("Lambda_d is empty")
        elif not lam(cls).contains(zero):
            rep.add(f"0 not in Lambda_{cls}")

    # Reflection axiom on class signatures.
    sigs = set()
    for a in roots:
        for b in roots:
            c = cartan_integer(b, a)
            sigs.add((lclass[b], lclass[a], c, lclass[reflect_vector(a, b)]))
    for (cb, ca, c, ct) in sorted(sigs):
        lhs = _scaled_sum(lam(cb), -c, lam(ca))
        if not cs_subset(lhs, lam(ct)):
            rep.add(
                f"Lambda_{cb} - ({c})*Lambda_{ca} not contained in Lambda_{ct}"
            )

    # Lambda_x + 2 Lambda_x == Lambda_x for each class present.
    for cls in present:
        if not cs_equal(_scaled_sum(lam(cls), 2, lam(cls)), lam(cls)):
            rep.add(f"Lambda_{cls} + 2*Lambda_{cls} != Lambda_{cls}")

    # Family-specific containments and subgroup facts.
    fam, rank = _family_of_view(roots_view)
    ls = lam(SHORT) if SHORT in present else None
    ll = lam(LONG) if LONG in present else None
    ld = lam(DIVISIBLE) if DIVISIBLE in present else None

    def need_subgroup(cs: CosetSet, name: str, why: str):
        if not cs.is_group:
            rep.add(f"Lambda_{name} is not a subgroup ({why})")

    def need_contained(a: CosetSet, b: CosetSet, label: str):
        if not cs_subset(a, b):
            rep.add(label)

    if fam == "ADE" and rank >= 2:
        need_subgroup(ll, "ell", "simply-laced of rank >= 2")
        if isinstance(roots_view, RootSystem) and datum.lambda_s != datum.lambda_ell:
            rep.add("simply-laced convention requires Lambda_s == Lambda_ell")
    elif fam in ("B", "C") and ls is not None and ll is not None:
        need_contained(_scaled_sum(ll, 2, ls), ll, "Lambda_ell + 2*Lambda_s not in Lambda_ell")
        need_contained(cs_sum(ls, ll), ls, "Lambda_s + Lambda_ell not in Lambda_s")
        if fam == "B" and rank >= 3:
            need_subgroup(ll, "ell", "type B, rank >= 3")
        if fam == "C" and rank >= 3:
            need_subgroup(ls, "s", "type C, rank >= 3")
        if rank == 2:
            need_subgroup(ll, "ell", "mild assumption for rank-2 systems")
    elif fam == "F" and ls is not None and ll is not None:
        need_contained(_scaled_sum(ll, 2, ls), ll, "Lambda_ell + 2*Lambda_s not in Lambda_ell")
        need_contained(cs_sum(ls, ll), ls, "Lambda_s + Lambda_ell not in Lambda_s")
        need_subgroup(ll, "ell", "type F_4")
        need_subgroup(ls, "s", "type F_4")
    elif fam == "G" and ls is not None and ll is not None:
        need_subgroup(ls, "s", "type G_2")
        need_subgroup(ll, "ell", "type G_2")
        need_contained(_scaled_sum(ll, 3, ls), ll, "Lambda_ell + 3*Lambda_s not in Lambda_ell")
        need_contained(cs_sum(ls, ll), ls, "Lambda_s + Lambda_ell not in Lambda_s")
    elif fam == "BC":
        if ll is not None:
            need_contained(_scaled_sum(ll, 2, ls), ll, "Lambda_ell + 2*Lambda_s not in Lambda_ell")
            need_contained(cs_sum(ls, ll), ls, "Lambda_s + Lambda_ell not in Lambda_s")
            need_contained(_scaled_sum(ld, 2, ll), ld, "Lambda_d + 2*Lambda_ell not in Lambda_d")
            need_contained(cs_sum(ll, ld), ll, "Lambda_ell + Lambda_d not in Lambda_ell")
            if rank >= 3:
                need_subgroup(ll, "ell", "type BC, rank >= 3")
            if rank == 2:
                need_subgroup(ll, "ell", "mild assumption for rank-2 systems")
        if ld is not None and ls is not None:
            need_contained(_scaled_sum(ld, 4, ls), ld, "Lambda_d + 4*Lambda_s not in Lambda_d")
            need_contained(cs_sum(ls, ld), ls, "Lambda_s + Lambda_d not in Lambda_s")
    return rep


def _family_of_view(roots_view) -> Tuple[str, int]:
    if isinstance(roots_view, RootSystem):
        t = roots_view.type
        if t.is_simply_laced:
            return "ADE", t.rank
        return t.family if t.family != "C" or t.rank != 2 else "B", t.rank
    fam, rank = roots_view.detect_family()
    return fam, rank


@dataclass(frozen=True)
class AffineReflectionSystem:
    """A finite root system extended by translation data of nullity k."""

    base: RootSystem
    nullity: int
    datum: ExtensionDatum
    config: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.datum.k != self.nullity:
            raise ValidationError("datum ambient rank differs from nullity")
        if self.base.type.is_reduced and self.datum.lambda_d is not None:
            raise ValidationError("reduced base cannot carry a divisible set")
        if not self.base.type.is_reduced and self.datum.lambda_d is None:
            raise ValidationError("non-reduced base needs a divisible set")

    @property
    def twisted(self) -> bool:
        return not self.datum.untwisted

    def lambda_of(self, alpha: Root) -> CosetSet:
        return self.datum.for_class(self.base.length_class[tuple(alpha)])

    def is_real_root(self, alpha: Root, y: Sequence[int]) -> bool:
        return tuple(alpha) in self.base._set and self.lambda_of(alpha).contains(y)

    def common_period(self) -> LatticeSubgroup:
        return self.datum.common_period()

    def to_json(self):
        return dict(self.config) if self.config else {
            "kind": "custom",
            "base": self.base.type.to_json(),
            "nullity": self.nullity,
            "datum": self.datum.to_json(),
        }


def _full(k: int) -> CosetSet:
    return CosetSet.full(k)


def _scaled_group(k: int, m: int) -> CosetSet:
    return CosetSet.group(LatticeSubgroup.full(k).scale(m))


def finite_system(rstype: RootSystemType) -> AffineReflectionSystem:
    """The finite root system viewed as a nullity-0 system."""
    base = build_root_system(rstype)
    datum = ExtensionDatum(
        _full(0), _full(0), _full(0), _full(0) if not rstype.is_reduced else None
    )
    cfg = {"kind": "finite", "base": rstype.to_json()}
    return AffineReflectionSystem(base, 0, datum, cfg)


def toroidal_system(rstype: RootSystemType, k: int) -> AffineReflectionSystem:
    """Untwisted system of nullity k: every translation set is Z^k."""
    if k < 0:
        raise ValidationError("nullity must be nonnegative")
    base = build_root_system(rstype)
    datum = ExtensionDatum(
        _full(k), _full(k), _full(k), _full(k) if not rstype.is_reduced else None
    )
    cfg = {"kind": "toroidal", "base": rstype.to_json(), "nullity": k}
    return AffineReflectionSystem(base, k, datum, cfg)


# (outer family, parity/order) -> base family constructor; the translation
# sets follow the nullity-1 twisted table: short class full, long class
# scaled by the order, divisible class the odd integers.
def twisted_affine_system(outer: RootSystemType, order: int) -> AffineReflectionSystem:
    """Twisted nullity-1 system attached to (outer diagram, automorphism order)."""
    fam, n = outer.family, outer.rank
    if order == 2 and fam == "A" and n >= 4 and n % 2 == 0:
        base = RootSystemType("BC", n // 2)
        datum = ExtensionDatum(
            _full(1), _full(1), _full(1),
            CosetSet.make(LatticeSubgroup.from_rows([[2]]), [[1]]),
        )
    elif order == 2 and fam == "A" and n >= 3 and n % 2 == 1:
        base = RootSystemType("C", (n + 1) // 2)
        datum = ExtensionDatum(_full(1), _full(1), _scaled_group(1, 2))
    elif order == 2 and fam == "D" and n >= 4:
        base = RootSystemType("B", n - 1)
        datum = ExtensionDatum(_full(1), _full(1), _scaled_group(1, 2))
    elif order == 2 and fam == "E" and n == 6:
        base = RootSystemType("F", 4)
        datum = ExtensionDatum(_full(1), _full(1), _scaled_group(1, 2))
    elif order == 3 and fam == "D" and n == 4:
        base = RootSystemType("G", 2)
        datum = ExtensionDatum(_full(1), _full(1), _scaled_group(1, 3))
    else:
        raise ValidationError(
            f"no twisted pair ({outer}, {order}); admissible pairs are "
            "(A_2n, 2), (A_2n-1, 2), (D_n+1, 2), (E_6, 2), (D_4, 3)"
        )
    cfg = {"kind": "twisted_affine", "outer": outer.to_json(), "order": order}
    return AffineReflectionSystem(build_root_system(base), 1, datum, cfg)


def saito_system(n: int) -> AffineReflectionSystem:
    """The nullity-2 system over C_n with short sets Z^2 and long sets Z x 2Z."""
    base = RootSystemType("C", n)
    lam_ell = CosetSet.group(LatticeSubgroup.from_rows([[1, 0], [0, 2]]))
    datum = ExtensionDatum(_full(2), _full(2), lam_ell)
    cfg = {"kind": "saito", "rank": n}
    return AffineReflectionSystem(build_root_system(base), 2, datum, cfg)


def custom_system(rstype: RootSystemType, k: int, datum: ExtensionDatum) -> AffineReflectionSystem:
    """Arbitrary validated system; rejects with the full violation report."""
    base = build_root_system(rstype)
    report = validate_extension_datum(base, datum)
    if not report.ok:
        raise ValidationError(
            "extension datum fails validation: " + "; ".join(report.violations),
            report=report,
        )
    cfg = {
        "kind": "custom",
        "base": rstype.to_json(),
        "nullity": k,
        "datum": datum.to_json(),
    }
    return AffineReflectionSystem(base, k, datum, cfg)


def build_system(config: dict) -> AffineReflectionSystem:
    """Dispatch a JSON-style config to the matching constructor."""
    kind = config.get("kind")
    if kind == "finite":
        return finite_system(RootSystemType.from_json(config["base"]))
    if kind == "toroidal":
        return toroidal_system(
            RootSystemType.from_json(config["base"]), int(config["nullity"])
        )
    if kind == "twisted_affine":
        return twisted_affine_system(
            RootSystemType.from_json(config["outer"]), int(config["order"])
        )
    if kind == "saito":
        return saito_system(int(config["rank"]))
    if kind == "custom":
        return custom_system(
            RootSystemType.from_json(config["base"]),
            int(config["nullity"]),
            ExtensionDatum.from_json(config["datum"]),
        )
    raise ValidationError(f"unknown system kind {config.get('kind')!r}")
