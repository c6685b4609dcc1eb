"""Subroot-system descriptors, gradient analysis, and the periodic oracle.

A subroot system of an affine reflection system is stored as its gradient
together with one coset-periodic translation set per gradient root.  All
closure and maximality questions are decided exactly on a finite quotient:
every set involved is periodic under a common full-rank subgroup M, and
reflection/addition descend to residues because the bilinear form ignores
translations.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .errors import ResourceBoundError, ValidationError
from .lattice import (
    CosetSet,
    LatticeSubgroup,
    cs_canonicalize,
    cs_subset,
    vec_add,
    vec_neg,
    vec_sub,
)
from .roots import (
    DIVISIBLE,
    LONG,
    SHORT,
    Root,
    SubSystemView,
    cartan_integer,
    classify_subset,
    integer_coefficients,
    reflect_vector,
)
from .systems import AffineReflectionSystem, ExtensionDatum

Cell = Tuple[Root, Tuple[int, ...]]

FULL, PROPER_CLOSED, SEMI_CLOSED = "full", "proper_closed", "semi_closed"


@dataclass(frozen=True)
class SubrootDescriptor:
    """Canonical (gradient root -> translation CosetSet) map over a system."""

    system: AffineReflectionSystem
    z_map: Tuple[Tuple[Root, CosetSet], ...]

    @staticmethod
    def make(system: AffineReflectionSystem,
             mapping: Dict[Root, CosetSet]) -> "SubrootDescriptor":
        items = []
        for root, cs in mapping.items():
            root = tuple(root)
            if root not in system.base:
                raise ValidationError(f"{root} is not a root of the base system")
            cs = cs_canonicalize(cs)
            if cs.is_empty:
                raise ValidationError(f"empty translation set at {root}")
            if not cs_subset(cs, system.lambda_of(root)):
                raise ValidationError(
                    f"translation set at {root} leaves the ambient set"
                )
            items.append((root, cs))
        by_root = dict(items)
        for root, cs in items:
            neg = vec_neg(root)
            if neg not in by_root or by_root[neg] != cs.neg():
                raise ValidationError(f"descriptor is not symmetric at {root}")
        return SubrootDescriptor(system, tuple(sorted(by_root.items())))

    @property
    def gradient(self) -> Tuple[Root, ...]:
        return tuple(r for r, _ in self.z_map)

    def z(self, root: Root) -> CosetSet:
        for r, cs in self.z_map:
            if r == tuple(root):
                return cs
        raise KeyError(root)

    @property
    def is_full_system(self) -> bool:
        full = all(r in set(self.gradient) for r in self.system.base.sorted_roots)
        return full and all(
            cs == self.system.lambda_of(r) for r, cs in self.z_map
        )

    def canonical_key(self) -> str:
        return json.dumps(
            [[list(r), cs.to_json()] for r, cs in self.z_map],
            sort_keys=True, separators=(",", ":"),
        )

    def to_json(self):
        return {
            "system": self.system.to_json(),
            "z": [{"root": list(r), "set": cs.to_json()} for r, cs in self.z_map],
        }

    @staticmethod
    def from_json(obj, system: Optional[AffineReflectionSystem] = None):
        from .systems import build_system

        if system is None:
            system = build_system(obj["system"])
        mapping = {
            tuple(entry["root"]): CosetSet.from_json(entry["set"])
            for entry in obj["z"]
        }
        return SubrootDescriptor.make(system, mapping)


def full_descriptor(system: AffineReflectionSystem) -> SubrootDescriptor:
    """The whole real-root set as a descriptor."""
    return SubrootDescriptor.make(
        system, {r: system.lambda_of(r) for r in system.base.sorted_roots}
    )


def common_period(system: AffineReflectionSystem,
                  descriptors: Sequence[SubrootDescriptor] = (),
                  scale: int = 1) -> LatticeSubgroup:
    """Intersection of all subgroup parts involved, optionally with m*Z^k."""
    period = system.common_period()
    for d in descriptors:
        for _, cs in d.z_map:
            period = period.intersect(cs.subgroup)
    if scale != 1:
        period = period.intersect(LatticeSubgroup.full(system.nullity).scale(scale))
    return period


class CellQuotient:
    """Finite model of the real roots modulo a common period M.

    Cells are (finite root, residue mod M) pairs; negation, reflection and
    addition act on cells exactly.  Cell sets are bitmasks.
    """

    def __init__(self, system: AffineReflectionSystem, period: LatticeSubgroup):
        if not system.common_period().contains_lattice(period):
            raise ValidationError("period is not a common period of the system")
        self.system = system
        self.period = period
        base = system.base
        self.cells: List[Cell] = []
        self.index: Dict[Cell, int] = {}
        for root in base.sorted_roots:
            for res in system.lambda_of(root).residues_mod(period):
                self.index[(root, res)] = len(self.cells)
                self.cells.append((root, res))
        n = self.n = len(self.cells)
        self.all_mask = (1 << n) - 1
        idx = self.index
        self.neg = [
            idx[(vec_neg(r), period.reduce(vec_neg(t)))] for r, t in self.cells
        ]
        self.refl = [[0] * n for _ in range(n)]
        self.add = [[-1] * n for _ in range(n)]
        rset = base._set
        for i, (a, ra) in enumerate(self.cells):
            for j, (b, rb) in enumerate(self.cells):
                c = cartan_integer(b, a)
                t = period.reduce(vec_sub(rb, tuple(c * x for x in ra)))
                self.refl[i][j] = idx[(reflect_vector(a, b), t)]
                s = vec_add(a, b)
                if s in rset:
                    self.add[i][j] = idx.get((s, period.reduce(vec_add(ra, rb))), -1)

    def pair_masks(self) -> List[int]:
        """One mask per {c, -c} orbit, in cell order."""
        out, seen = [], set()
        for i in range(self.n):
            if i not in seen:
                seen.add(i)
                seen.add(self.neg[i])
                out.append(1 << i | 1 << self.neg[i])
        return out

    def mask_of(self, d: SubrootDescriptor) -> int:
        mask = 0
        for root, cs in d.z_map:
            if not cs.subgroup.contains_lattice(self.period):
                raise ValidationError(
                    "descriptor is not periodic under the given period"
                )
            for res in cs.residues_mod(self.period):
                mask |= 1 << self.index[(root, res)]
        return mask

    def descriptor_of(self, mask: int) -> SubrootDescriptor:
        per_root: Dict[Root, list] = {}
        for i in range(self.n):
            if mask >> i & 1:
                root, res = self.cells[i]
                per_root.setdefault(root, []).append(res)
        mapping = {
            root: CosetSet.make(self.period, reps) for root, reps in per_root.items()
        }
        return SubrootDescriptor.make(self.system, mapping)

    def closure(self, mask: int) -> int:
        """Least fixed point under negation, reflection and real addition."""
        active = [i for i in range(self.n) if mask >> i & 1]
        inset = mask
        qi = 0
        while qi < len(active):
            c = active[qi]
            qi += 1
            j = self.neg[c]
            if not inset >> j & 1:
                inset |= 1 << j
                active.append(j)
            for e in list(active):
                for j in (self.add[c][e], self.refl[c][e], self.refl[e][c]):
                    if j >= 0 and not inset >> j & 1:
                        inset |= 1 << j
                        active.append(j)
        return inset

    def is_closed_mask(self, mask: int):
        """(flag, witness pair of cells): closure under reflections and sums."""
        members = [i for i in range(self.n) if mask >> i & 1]
        for c in members:
            if not mask >> self.neg[c] & 1:
                return False, (self.cells[c], self.cells[self.neg[c]])
            for e in members:
                j = self.refl[c][e]
                if not mask >> j & 1:
                    return False, (self.cells[c], self.cells[e])
                j = self.add[c][e]
                if j >= 0 and not mask >> j & 1:
                    return False, (self.cells[c], self.cells[e])
        return True, None


def is_closed_subroot(d: SubrootDescriptor):
    """Exact closed-subroot check on the quotient; returns (flag, witness)."""
    period = common_period(d.system, [d])
    q = CellQuotient(d.system, period)
    return q.is_closed_mask(q.mask_of(d))


def gradient_class(d: SubrootDescriptor) -> str:
    """'full', 'proper_closed' or 'semi_closed'; rejects non-closed input."""
    ok, witness = is_closed_subroot(d)
    if not ok:
        raise ValidationError(f"descriptor is not a closed subroot system: {witness}")
    base = d.system.base
    S = set(d.gradient)
    if S == base._set:
        return FULL
    rep = classify_subset(base, S)
    if rep.is_closed:
        return PROPER_CLOSED
    if rep.is_semi_closed:
        return SEMI_CLOSED
    raise RuntimeError("gradient of a closed subroot system is neither closed "
                       "nor semi-closed; invariant violated")


def _is_subroot(d: SubrootDescriptor) -> bool:
    period = common_period(d.system, [d])
    q = CellQuotient(d.system, period)
    mask = q.mask_of(d)
    members = [i for i in range(q.n) if mask >> i & 1]
    return all(mask >> q.refl[c][e] & 1 for c in members for e in members)


def lex_positive(v: Root) -> bool:
    for x in v:
        if x:
            return x > 0
    return False


def p_function(d: SubrootDescriptor) -> Dict[Root, Tuple[int, ...]]:
    """Base points p_alpha in Z_alpha chosen on a simple system of the gradient.

    The simple system is the indecomposable part of the lexicographic
    positive system; representatives are the minimal canonical residues.
    The extension is Z-linear, so the reflection identity
    p(s_a(b)) = p(b) - (b, a-check) p(a) holds by construction.
    """
    if not _is_subroot(d):
        raise ValidationError("descriptor is not a subroot system")
    gr = d.gradient
    positives = [a for a in gr if lex_positive(a)]
    pos_set = set(positives)
    simples = [
        a for a in positives
        if not any(vec_sub(a, b) in pos_set for b in positives if b != a)
    ]
    chosen = {g: d.z(g).reps[0] for g in simples}
    out: Dict[Root, Tuple[int, ...]] = {}
    for a in gr:
        coeffs = integer_coefficients(tuple(simples), a)
        vec = tuple(
            sum(c * chosen[g][j] for c, g in zip(coeffs, simples))
            for j in range(d.system.nullity)
        )
        out[a] = vec
    return out


def shifted_component_data(d: SubrootDescriptor):
    """Per irreducible gradient component: the p-shifted class sets.

    Returns a list of (SubSystemView, ExtensionDatum) pairs with the shifted
    sets deduplicated per length class; raises if same-class sets within one
    component disagree (they cannot, for a subroot system).
    """
    p = p_function(d)
    view = SubSystemView(d.gradient)
    out = []
    for comp in view.components():
        class_sets: Dict[str, CosetSet] = {}
        for a in comp.roots:
            shifted = cs_canonicalize(d.z(a).translate(vec_neg(p[a])))
            cls = comp.length_class[a]
            if cls in class_sets:
                if class_sets[cls] != shifted:
                    raise ValidationError(
                        f"shifted sets disagree within class {cls} of a component"
                    )
            else:
                class_sets[cls] = shifted
        ls = class_sets.get(SHORT, class_sets.get(LONG))
        ll = class_sets.get(LONG, ls)
        datum = ExtensionDatum(
            CosetSet.full(d.system.nullity), ls, ll, class_sets.get(DIVISIBLE)
        )
        out.append((comp, datum))
    return out


def periodic_closure(q: CellQuotient, seed: Iterable[Cell]) -> List[Cell]:
    """Closure of a symmetric cell set; public cell-level variant."""
    mask = 0
    for cell in seed:
        root, res = cell
        mask |= 1 << q.index[(tuple(root), q.period.reduce(res))]
    for i in range(q.n):
        if mask >> i & 1 and not mask >> q.neg[i] & 1:
            raise ValidationError("seed is not symmetric under cell negation")
    closed = q.closure(mask)
    return [q.cells[i] for i in range(q.n) if closed >> i & 1]


def is_maximal_periodic(d: SubrootDescriptor, period: LatticeSubgroup) -> bool:
    """Maximality among period-stable closed subroot systems, by augmentation."""
    q = CellQuotient(d.system, period)
    mask = q.mask_of(d)
    if q.closure(mask) != mask:
        return False
    if mask == q.all_mask:
        return False  # not proper
    for pm in q.pair_masks():
        if mask & pm != pm and q.closure(mask | pm) != q.all_mask:
            return False
    return True


def enumerate_maximal_periodic(system: AffineReflectionSystem,
                               period: LatticeSubgroup,
                               cell_bound: int = 64) -> List[SubrootDescriptor]:
    """All maximal period-stable closed subroot systems, canonical and sorted.

    Enumerates every closed cell set by closure-BFS over symmetric pairs,
    then filters the inclusion-maximal proper ones.  Complete because every
    closed set is reachable by adding its own pairs one at a time.
    """
    q = CellQuotient(system, period)
    if q.n > cell_bound:
        raise ResourceBoundError(
            f"{q.n} cells exceed the configured bound of {cell_bound}"
        )
    pairs = q.pair_masks()
    seen = {0}
    frontier = [0]
    while frontier:
        nxt = []
        for C in frontier:
            for pm in pairs:
                if C & pm == pm:
                    continue
                D = q.closure(C | pm)
                if D not in seen:
                    seen.add(D)
                    nxt.append(D)
        frontier = nxt
    candidates = [C for C in seen if C and C != q.all_mask]
    maximal = [
        C for C in candidates
        if not any(C != D and C & D == C for D in candidates)
    ]
    out = [q.descriptor_of(C) for C in maximal]
    return sorted(out, key=SubrootDescriptor.canonical_key)
