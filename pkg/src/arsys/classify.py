"""Constructive enumeration of maximal closed subroot systems.

One engine per classification case, dispatched on the base family and the
gradient case.  Engines emit raw (root -> CosetSet) mappings plus a
provenance record; the public classify_* functions wrap them into canonical
descriptors, deduplicate, and verify closedness.

Rank-2 double-bond bases (B_2 and the C_2 realization) always go through
the B-type engines: the rank-2 assumption guarantees their hypothesis (the
long class is a subgroup), while the short-partition engines for C/G need
the short class to be a subgroup, which rank 2 does not provide.

Prime truncation: the full-gradient cases range over maximal subgroups of
every prime index; the engines enumerate primes <= q_max and record the
truncation in the report header.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .errors import ValidationError
from .lattice import (
    CosetSet,
    LatticeSubgroup,
    cs_canonicalize,
    cs_intersect,
    cs_subset,
    cs_sum,
    is_prime,
    lattice_residues,
    sublattices_of_prime_index,
    vec_add,
    vec_neg,
)
from .roots import (
    DIVISIBLE,
    LONG,
    SHORT,
    Root,
    RootSystem,
    RootSystemType,
    all_maximal_closed,
    build_root_system,
    gamma_pairs,
    integer_coefficients,
    m_constant,
    root_lattice_basis,
)
from .subroot import (
    FULL,
    PROPER_CLOSED,
    SEMI_CLOSED,
    SubrootDescriptor,
    gradient_class,
    is_closed_subroot,
)
from .systems import AffineReflectionSystem, ExtensionDatum

ALL_CASES = (SEMI_CLOSED, FULL, PROPER_CLOSED)


@dataclass(frozen=True)
class ClassifyRequest:
    system: AffineReflectionSystem
    q_max: int = 2
    cases: Tuple[str, ...] = ALL_CASES

    def __post_init__(self):
        if self.q_max < 2:
            raise ValidationError("q_max must be at least 2")
        for c in self.cases:
            if c not in ALL_CASES:
                raise ValidationError(f"unknown case {c!r}")


@dataclass
class ClassificationReport:
    system: AffineReflectionSystem
    q_max: Optional[int]
    cases: Tuple[str, ...]
    entries: List[Tuple[SubrootDescriptor, dict]] = field(default_factory=list)
    notes: List[str] = field(default_factory=list)

    @property
    def descriptors(self) -> List[SubrootDescriptor]:
        return [d for d, _ in self.entries]

    def canonical_keys(self) -> List[str]:
        return [d.canonical_key() for d in self.descriptors]

    def to_json(self):
        return {
            "header": {
                "system": self.system.to_json(),
                "q_max": self.q_max,
                "cases": list(self.cases),
                "notes": list(self.notes),
            },
            "descriptors": [
                {"z": d.to_json()["z"], "provenance": prov}
                for d, prov in self.entries
            ],
        }


def _dedup(entries: Iterable[Tuple[SubrootDescriptor, dict]]):
    by_key: Dict[str, Tuple[SubrootDescriptor, dict]] = {}
    for d, prov in entries:
        by_key.setdefault(d.canonical_key(), (d, prov))
    return [by_key[k] for k in sorted(by_key)]


def _coset(H: LatticeSubgroup, rep) -> CosetSet:
    return CosetSet.make(H, [rep])


def _primes_upto(q_max: int) -> List[int]:
    return [p for p in range(2, q_max + 1) if is_prime(p)]


def _tau_table(base: RootSystem, basis: Sequence[Root], values: Sequence,
               H: LatticeSubgroup, roots: Sequence[Root]) -> Dict[Root, tuple]:
    """Evaluate the basis-parametrized Z-linear map on the given roots."""
    k = H.k
    out = {}
    for a in roots:
        coeffs = integer_coefficients(tuple(basis), a)
        vec = tuple(sum(c * v[j] for c, v in zip(coeffs, values)) for j in range(k))
        out[a] = H.reduce(vec)
    return out


# --- semi-closed gradient engines -----------------------------------------

def _engine_semi_short_linear(base: RootSystem, lam_s: CosetSet,
                              lam_ell: CosetSet, m: int):
    """Types with a subgroup short class and short-only gradient (C_n>=3, G_2):
    maximal subgroups H of the short set of index m containing the long set,
    and short-lattice homs into the quotient avoiding opposite values on
    pairs that sum into the long class."""
    if not lam_s.is_group:
        raise ValidationError("short translation set must be a subgroup here")
    shorts = base.of_class(SHORT)
    basis = root_lattice_basis(shorts)
    gam = gamma_pairs(base, LONG)
    for H in sublattices_of_prime_index(lam_s.subgroup, m):
        if not cs_subset(lam_ell, CosetSet.group(H)):
            continue
        reps = lattice_residues(lam_s.subgroup, H)
        for values in itertools.product(reps, repeat=len(basis)):
            tau = _tau_table(base, basis, values, H, shorts)
            # tau(a) == -tau(b) on a pair summing long would re-create a long
            # root in the closure; reject those maps.
            if any(not any(H.reduce(vec_add(tau[a], tau[b]))) for a, b in gam):
                continue
            mapping = {a: _coset(H, tau[a]) for a in shorts}
            prov = {
                "case": "semi-closed/short-linear",
                "H": H.to_json(),
                "tau": [[list(b), list(v)] for b, v in zip(basis, values)],
            }
            yield mapping, prov


def _engine_semi_f4(base: RootSystem, lam_s: CosetSet, lam_ell: CosetSet):
    """F_4: index-2 subgroup, a 2-2 split of the unit short roots, and the
    same-side long roots kept with the full long set."""
    shorts = base.of_class(SHORT)
    basis = root_lattice_basis(shorts)
    dim = base.ambient_dim
    units = [tuple(2 if j == i else 0 for j in range(dim)) for i in range(4)]
    longs = base.of_class(LONG)
    for H in sublattices_of_prime_index(lam_s.subgroup, 2):
        if not cs_subset(lam_ell, CosetSet.group(H)):
            continue
        reps = lattice_residues(lam_s.subgroup, H)
        for values in itertools.product(reps, repeat=len(basis)):
            tau = _tau_table(base, basis, values, H, shorts)
            split = {}
            for i, u in enumerate(units):
                split.setdefault(tau[u], []).append(i)
            if sorted(len(v) for v in split.values()) != [2, 2]:
                continue
            side = {}
            for val, idxs in split.items():
                for i in idxs:
                    side[i] = idxs[0]
            mapping = {a: _coset(H, tau[a]) for a in shorts}
            for g in longs:
                support = [i for i in range(4) if g[i] != 0]
                if side[support[0]] == side[support[1]]:
                    mapping[g] = lam_ell
            prov = {
                "case": "semi-closed/f4-split",
                "H": H.to_json(),
                "split": sorted(sorted(v) for v in split.values()),
                "tau": [[list(b), list(v)] for b, v in zip(basis, values)],
            }
            yield mapping, prov


def _positive_shorts(base: RootSystem) -> List[Root]:
    from .subroot import lex_positive

    return [a for a in base.of_class(SHORT) if lex_positive(a)]


def _long_supports(base: RootSystem, pos_shorts: Sequence[Root]):
    """For each long root, the unordered pair of positive shorts spanning it."""
    out = {}
    for g in base.of_class(LONG):
        pair = None
        for i, s1 in enumerate(pos_shorts):
            for s2 in pos_shorts[i + 1:]:
                if g in (vec_add(s1, s2), vec_add(s1, vec_neg(s2)),
                         vec_add(vec_neg(s1), s2), vec_neg(vec_add(s1, s2))):
                    pair = (s1, s2)
                    break
            if pair:
                break
        if pair is None:
            raise ValidationError("long root without a short support pair")
        out[g] = pair
    return out


def _engine_semi_split(base: RootSystem, lam_s: CosetSet, lam_ell: CosetSet):
    """B-type bases: a proper split of the short-root slots and a matching
    partition of the short set into long-class coset blocks."""
    if not lam_ell.is_group:
        raise ValidationError("long translation set must be a subgroup here")
    L = lam_ell.subgroup
    pos_shorts = _positive_shorts(base)
    supports = _long_supports(base, pos_shorts)
    cosets = lam_s.residues_mod(L)
    t, n = len(cosets), len(pos_shorts)
    if t < 2:
        return
    for jbits in range(1, (1 << n) - 1):
        J = {s for i, s in enumerate(pos_shorts) if jbits >> i & 1}
        for cbits in range(1, (1 << t) - 1):
            z1 = [c for i, c in enumerate(cosets) if not cbits >> i & 1]
            z2 = [c for i, c in enumerate(cosets) if cbits >> i & 1]
            Z1 = CosetSet.make(L, z1)
            Z2 = CosetSet.make(L, z2)
            mapping = {}
            for s in pos_shorts:
                zs = Z2 if s in J else Z1
                mapping[s] = zs
                mapping[vec_neg(s)] = zs.neg()
            for g, (s1, s2) in supports.items():
                if (s1 in J) == (s2 in J):
                    mapping[g] = lam_ell
            prov = {
                "case": "semi-closed/short-partition",
                "J": sorted(map(list, J)),
                "Z1": Z1.to_json(),
                "Z2": Z2.to_json(),
            }
            yield mapping, prov


# --- full-gradient engines --------------------------------------------------

def _engine_full_common_subgroup(base: RootSystem, lam_s: CosetSet,
                                 lam_ell: CosetSet, q_max: int):
    """Simply-laced / C_n>=3 / F_4 / G_2: one maximal subgroup of the short
    set, a root-lattice hom into the quotient, long sets intersected down."""
    if not lam_s.is_group:
        raise ValidationError("short translation set must be a subgroup here")
    basis = base.simple_system
    roots = base.sorted_roots
    shorts = set(base.of_class(SHORT))
    for p in _primes_upto(q_max):
        for H in sublattices_of_prime_index(lam_s.subgroup, p):
            reps = lattice_residues(lam_s.subgroup, H)
            for values in itertools.product(reps, repeat=len(basis)):
                tau = _tau_table(base, basis, values, H, roots)
                mapping = {}
                ok = True
                for a in roots:
                    if a in shorts:
                        mapping[a] = _coset(H, tau[a])
                    else:
                        cs = cs_intersect(_coset(H, tau[a]), lam_ell)
                        if cs.is_empty:
                            ok = False
                            break
                        mapping[a] = cs
                if not ok:
                    continue
                prov = {
                    "case": "full/common-subgroup",
                    "q": p,
                    "H": H.to_json(),
                    "tau": [[list(b), list(v)] for b, v in zip(basis, values)],
                }
                yield mapping, prov


def _self_negative_cosets(H: LatticeSubgroup, coset_rep, L: LatticeSubgroup):
    """H-cosets inside coset_rep + L whose doubling lands in H."""
    out = []
    for s in lattice_residues(L, H):
        x = H.reduce(vec_add(coset_rep, s))
        if H.contains(tuple(2 * v for v in x)):
            out.append(x)
    return out


def _engine_full_split(base: RootSystem, lam_s: CosetSet, lam_ell: CosetSet,
                       q_max: int):
    """B-type bases: long sets over a subgroup H of the long class, short
    sets over a coset union Z.

    For H equal to the long class, Z is the short set minus one nonzero
    long-class coset; for H a maximal subgroup of the long class, Z picks
    exactly one self-negative H-coset inside every long-class coset of the
    short set (the distinct-coset sum condition then holds automatically,
    and skipping classes with no self-negative coset drops exactly the
    degenerate non-maximal shapes).
    """
    if not lam_ell.is_group:
        raise ValidationError("long translation set must be a subgroup here")
    L = lam_ell.subgroup
    k = L.k
    ell_cosets = lam_s.residues_mod(L)
    nonzero = [c for c in ell_cosets if any(c)]

    simples = base.simple_system
    roots = base.sorted_roots
    shorts = set(base.of_class(SHORT))

    def tau_candidates(H):
        per_simple = []
        for s in simples:
            if s in shorts:
                per_simple.append(lam_s.residues_mod(H))
            else:
                per_simple.append(lattice_residues(L, H))
        return itertools.product(*per_simple)

    h_cands: List[Tuple[LatticeSubgroup, str]] = [(L, "long-class")]
    for p in _primes_upto(q_max):
        for H in sublattices_of_prime_index(L, p):
            h_cands.append((H, f"index-{p}"))

    for H, tag in h_cands:
        if H == L:
            z_options = [
                CosetSet.make(L, [c for c in ell_cosets if c != drop])
                for drop in nonzero
            ]
        else:
            per_coset = [_self_negative_cosets(H, c, L) for c in nonzero]
            if any(not opts for opts in per_coset):
                continue
            z_options = [
                CosetSet.make(H, [(0,) * k] + list(picks))
                for picks in itertools.product(*per_coset)
            ]
        if not z_options:
            continue
        for values in tau_candidates(H):
            tau = _tau_table(base, simples, values, H, roots)
            for Z in z_options:
                mapping = {}
                ok = True
                for a in roots:
                    if a in shorts:
                        cs = Z.translate(tau[a])
                        if not cs_subset(cs, lam_s):
                            ok = False
                            break
                        mapping[a] = cs
                    else:
                        mapping[a] = _coset(H, tau[a])
                if not ok:
                    continue
                prov = {
                    "case": "full/long-split",
                    "H": H.to_json(),
                    "H_kind": tag,
                    "Z": Z.to_json(),
                    "tau": [[list(b), list(v)] for b, v in zip(simples, values)],
                }
                yield mapping, prov


# --- proper closed gradient -------------------------------------------------

def _engine_proper_closed(system: AffineReflectionSystem):
    base = system.base
    twisted_short_rule = system.datum.lambda_ell != system.datum.lambda_s
    for sub in all_maximal_closed(base):
        if twisted_short_rule and not any(
            base.length_class[a] == SHORT for a in sub
        ):
            continue
        mapping = {a: system.lambda_of(a) for a in sub}
        prov = {
            "case": "proper-closed/base-lift",
            "subsystem": sorted(map(list, sub)),
        }
        yield mapping, prov


# --- public classify operations ----------------------------------------------

def _wrap(system: AffineReflectionSystem, raw) -> List[Tuple[SubrootDescriptor, dict]]:
    out = []
    for mapping, prov in raw:
        out.append((SubrootDescriptor.make(system, mapping), prov))
    return _dedup(out)


def _b_dispatch_family(base: RootSystem) -> str:
    """Engine family key: rank-2 double-bond bases behave as B-type."""
    t = base.type
    if t.family == "B" or (t.family == "C" and t.rank == 2):
        return "B"
    return t.family


def classify_semi_closed(req: ClassifyRequest) -> ClassificationReport:
    system = req.system
    base = system.base
    if base.type.family == "BC":
        raise ValidationError("semi-closed engine needs a reduced base; "
                              "use classify_bc for non-reduced systems")
    report = ClassificationReport(system, req.q_max, (SEMI_CLOSED,))
    if system.datum.lambda_ell == system.datum.lambda_s:
        report.notes.append(
            "short and long translation sets coincide: closed subroot systems "
            "have closed gradient, so the semi-closed case is empty"
        )
        return report
    lam_s, lam_ell = system.datum.lambda_s, system.datum.lambda_ell
    fam = _b_dispatch_family(base)
    if fam in ("C", "G"):
        raw = _engine_semi_short_linear(base, lam_s, lam_ell, m_constant(base.type))
    elif fam == "F":
        raw = _engine_semi_f4(base, lam_s, lam_ell)
    elif fam == "B":
        raw = _engine_semi_split(base, lam_s, lam_ell)
    else:
        report.notes.append("simply-laced bases admit no semi-closed gradients")
        return report
    report.entries = _wrap(system, raw)
    return report


def classify_full_gradient(req: ClassifyRequest) -> ClassificationReport:
    system = req.system
    base = system.base
    report = ClassificationReport(system, req.q_max, (FULL,))
    if base.type.family == "BC":
        report.notes.append("non-reduced bases are classified by classify_bc")
        return report
    lam_s, lam_ell = system.datum.lambda_s, system.datum.lambda_ell
    if _b_dispatch_family(base) == "B":
        raw = _engine_full_split(base, lam_s, lam_ell, req.q_max)
    else:
        raw = _engine_full_common_subgroup(base, lam_s, lam_ell, req.q_max)
    report.entries = _wrap(system, raw)
    report.notes.append(f"prime truncation at q_max={req.q_max}")
    return report


def classify_proper_closed(req: ClassifyRequest) -> ClassificationReport:
    system = req.system
    if not system.base.type.is_reduced:
        raise ValidationError("proper-closed engine needs a reduced base; "
                              "use classify_bc for non-reduced systems")
    report = ClassificationReport(system, req.q_max, (PROPER_CLOSED,))
    report.entries = _wrap(system, _engine_proper_closed(system))
    return report


def _bc_derived_b_system(system: AffineReflectionSystem) -> AffineReflectionSystem:
    """The reduced part of a BC system, sharing its ambient coordinates."""
    b_type = RootSystemType("B", system.base.type.rank)
    datum = ExtensionDatum(
        system.datum.lambda0, system.datum.lambda_s, system.datum.lambda_ell
    )
    cfg = {"kind": "derived-b", "base": b_type.to_json()}
    return AffineReflectionSystem(build_root_system(b_type), system.nullity,
                                  datum, cfg)


def classify_bc(req: ClassifyRequest) -> ClassificationReport:
    """Non-reduced bases: split lifts, semi-closed extensions, and
    full-gradient extensions with intersected divisible sets."""
    system = req.system
    base = system.base
    if base.type.family != "BC":
        raise ValidationError("classify_bc needs a non-reduced base")
    n = base.type.rank
    lam_s = system.datum.lambda_s
    lam_ell = system.datum.lambda_ell
    lam_d = system.datum.lambda_d
    dim = base.ambient_dim
    units = [tuple(2 if j == i else 0 for j in range(dim)) for i in range(n)]
    divisibles = base.of_class(DIVISIBLE)
    shorts = base.of_class(SHORT)
    longs = base.of_class(LONG)

    entries: List[Tuple[dict, dict]] = []

    # split lifts: all divisibles, shorts indexed by J, same-side longs
    j_range = range(0, 1 << n) if lam_s == lam_ell else range(1, 1 << n)
    for jbits in j_range:
        if jbits == (1 << n) - 1:
            continue  # J proper
        J = {i for i in range(n) if jbits >> i & 1}
        mapping = {d: lam_d for d in divisibles}
        for s in shorts:
            i = next(j for j in range(n) if s[j] != 0)
            if i in J:
                mapping[s] = lam_s
        for g in longs:
            sup = [i for i in range(n) if g[i] != 0]
            if (sup[0] in J) == (sup[1] in J):
                mapping[g] = lam_ell
        entries.append((mapping, {"case": "bc/split-lift", "J": sorted(J)}))

    # empty-J replacement in the twisted-short case: drop one nonzero coset
    if lam_s != lam_ell:
        L = lam_ell.subgroup
        cosets = lam_s.residues_mod(L)
        for drop in (c for c in cosets if any(c)):
            Z = CosetSet.make(L, [c for c in cosets if c != drop])
            mapping = {d: lam_d for d in divisibles}
            for s in shorts:
                mapping[s] = Z
            for g in longs:
                mapping[g] = lam_ell
            entries.append(
                (mapping, {"case": "bc/short-coset-drop", "Z": Z.to_json()})
            )

    derived = _bc_derived_b_system(system)
    gamma_ell = gamma_pairs(base, DIVISIBLE)

    # semi-closed extensions: full divisible sets
    for mapping, prov in _engine_semi_split(derived.base, lam_s, lam_ell):
        ext = dict(mapping)
        for d in divisibles:
            ext[d] = lam_d
        entries.append((ext, {"case": "bc/semi-closed-extension", "inner": prov}))

    # full-gradient extensions: divisible sets by summed long sets
    for mapping, prov in _engine_full_split(derived.base, lam_s, lam_ell, req.q_max):
        ext = dict(mapping)
        for d in divisibles:
            g1, g2 = next((a, b) for a, b in gamma_ell if vec_add(a, b) == d)
            cs = cs_intersect(cs_sum(mapping[g1], mapping[g2]), lam_d)
            if not cs.is_empty:
                ext[d] = cs
        entries.append((ext, {"case": "bc/full-extension", "inner": prov}))

    report = ClassificationReport(system, req.q_max, ALL_CASES)
    report.entries = _wrap(system, iter(entries))
    report.notes.append(f"prime truncation at q_max={req.q_max}")
    return report


def classify_all(req: ClassifyRequest) -> ClassificationReport:
    """Union of the applicable case engines, deduplicated and verified."""
    system = req.system
    report = ClassificationReport(system, req.q_max, tuple(req.cases))
    entries: List[Tuple[SubrootDescriptor, dict]] = []
    if system.base.type.family == "BC":
        sub = classify_bc(req)
        entries.extend(sub.entries)
        report.notes.extend(sub.notes)
    else:
        if SEMI_CLOSED in req.cases:
            sub = classify_semi_closed(req)
            entries.extend(sub.entries)
            report.notes.extend(sub.notes)
        if FULL in req.cases:
            sub = classify_full_gradient(req)
            entries.extend(sub.entries)
            report.notes.extend(sub.notes)
        if PROPER_CLOSED in req.cases:
            entries.extend(classify_proper_closed(req).entries)
    kept = []
    for d, prov in _dedup(entries):
        ok, witness = is_closed_subroot(d)
        if not ok:
            raise RuntimeError(
                f"classifier emitted a non-closed descriptor: {witness}"
            )
        cls = gradient_class(d)
        if cls in req.cases:
            prov = dict(prov)
            prov["gradient_class"] = cls
            kept.append((d, prov))
    report.entries = kept
    return report
