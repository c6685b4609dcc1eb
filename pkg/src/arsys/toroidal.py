"""Triple parametrization of full-gradient maximal systems over Z^k tori,
and the catalog of Saito's nullity-2 families over C_n.

For an untwisted system with every translation set Z^k, the full-gradient
maximal closed subroot systems correspond one-to-one to triples
(q, (b_i), U): q prime, b_i in [0, q-1] per simple root, U a k x k Hermite
normal form matrix of determinant q.  The root alpha = sum a_i alpha_i
receives the coset b_alpha e_ell + rowspan(U), where b_alpha = sum a_i b_i
and ell is the row with pivot q.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import List, Tuple

from .errors import ValidationError
from .lattice import (
    CosetSet,
    LatticeSubgroup,
    cs_intersect,
    enumerate_prime_maximal_subgroups,
    is_prime,
    vec_neg,
)
from .roots import (
    LONG,
    SHORT,
    Root,
    RootSystem,
    integer_coefficients,
    root_lattice_basis,
)
from .subroot import FULL, SubrootDescriptor, gradient_class
from .classify import (
    ClassificationReport,
    ClassifyRequest,
    _dedup,
    _tau_table,
    classify_proper_closed,
)
from .systems import AffineReflectionSystem, saito_system


@dataclass(frozen=True)
class TripleDescriptor:
    q: int
    b: Tuple[int, ...]
    U: LatticeSubgroup

    def __post_init__(self):
        if not is_prime(self.q):
            raise ValidationError(f"{self.q} is not prime")
        if self.U.det != self.q:
            raise ValidationError("matrix determinant must equal q")
        if any(not 0 <= x < self.q for x in self.b):
            raise ValidationError("offsets must lie in [0, q-1]")

    @property
    def ell(self) -> int:
        """Index of the unique pivot row equal to q * e_ell."""
        return next(i for i in range(self.U.k) if self.U.basis[i][i] == self.q)

    def to_json(self):
        return {"q": self.q, "b": list(self.b), "U": self.U.to_json()}

    @staticmethod
    def from_json(obj) -> "TripleDescriptor":
        return TripleDescriptor(
            int(obj["q"]),
            tuple(int(x) for x in obj["b"]),
            LatticeSubgroup.from_rows(obj["U"], k=len(obj["U"])),
        )


def _require_untwisted_toroidal(system: AffineReflectionSystem):
    full = CosetSet.full(system.nullity)
    datum = system.datum
    sets = [datum.lambda_s, datum.lambda_ell]
    if datum.lambda_d is not None:
        sets.append(datum.lambda_d)
    if any(cs != full for cs in sets):
        raise ValidationError(
            "triple parametrization applies to untwisted systems whose "
            "translation sets are all of Z^k"
        )


def triple_to_psi(system: AffineReflectionSystem, t: TripleDescriptor) -> SubrootDescriptor:
    """Materialize the subroot system attached to a triple."""
    _require_untwisted_toroidal(system)
    base = system.base
    if not base.type.is_reduced:
        raise ValidationError("triple parametrization needs a reduced base")
    if t.U.k != system.nullity:
        raise ValidationError("matrix size must equal the nullity")
    n = base.type.rank
    if len(t.b) != n:
        raise ValidationError("offset tuple length must equal the rank")
    ell = t.ell
    k = system.nullity
    mapping = {}
    for a in base.sorted_roots:
        coeffs = integer_coefficients(base.simple_system, a)
        b_alpha = sum(c * x for c, x in zip(coeffs, t.b))
        rep = tuple(b_alpha if j == ell else 0 for j in range(k))
        mapping[a] = CosetSet.make(t.U, [rep])
    return SubrootDescriptor.make(system, mapping)


def psi_to_triple(d: SubrootDescriptor) -> TripleDescriptor:
    """Invert the parametrization; rejects non-conforming descriptors."""
    system = d.system
    _require_untwisted_toroidal(system)
    base = system.base
    if set(d.gradient) != base._set:
        raise ValidationError("descriptor does not have full gradient")
    subgroups = {cs.subgroup for _, cs in d.z_map}
    if len(subgroups) != 1:
        raise ValidationError("translation sets share no single subgroup")
    U = subgroups.pop()
    q = U.det
    if not is_prime(q):
        raise ValidationError(
            f"common subgroup has determinant {q}, not prime: descriptor is "
            "not of the maximal full-gradient shape"
        )
    if any(len(cs.reps) != 1 for _, cs in d.z_map):
        raise ValidationError("translation sets are not single cosets")
    ell = next(i for i in range(U.k) if U.basis[i][i] == q)
    b = []
    for s in base.simple_system:
        rep = d.z(s).reps[0]
        if any(rep[j] for j in range(U.k) if j != ell):
            raise ValidationError("coset offset is not along the pivot axis")
        b.append(rep[ell])
    t = TripleDescriptor(q, tuple(b), U)
    if triple_to_psi(system, t).canonical_key() != d.canonical_key():
        raise ValidationError("offsets are inconsistent across non-simple roots")
    return t


def enumerate_triples(system: AffineReflectionSystem, q: int) -> List[TripleDescriptor]:
    """All q^n * (q^k - 1)/(q - 1) triples for one prime."""
    _require_untwisted_toroidal(system)
    n = system.base.type.rank
    out = []
    for U in enumerate_prime_maximal_subgroups(system.nullity, q):
        for b in itertools.product(range(q), repeat=n):
            out.append(TripleDescriptor(q, b, U))
    return out


def saito_families(n: int, q_max: int) -> ClassificationReport:
    """The four families of maximal closed subroot systems of the nullity-2
    twisted system over C_n, emitted from their explicit shapes.

    (1) short-root systems over the long lattice, split at the fork of the
        short-root subsystem; (2)/(3) full-gradient families indexed by a
        prime, an offset tuple, and the pivot position, with the long parts
        cut to even second coordinates; (4) lifts of the maximal closed
        subsystems of the base that contain a short root.
    """
    if n < 2:
        raise ValidationError("rank must be at least 2")
    if q_max < 2:
        raise ValidationError("q_max must be at least 2")
    system = saito_system(n)
    base = system.base
    lam_ell = system.datum.lambda_ell
    L_ell = lam_ell.subgroup  # Z x 2Z
    shorts = base.of_class(SHORT)
    entries = []

    # family (1): tau on the short-root system with distinct values at the
    # fork pair e_(n-1) - e_n, e_(n-1) + e_n.
    dbasis = root_lattice_basis(shorts)
    dim = base.ambient_dim
    fork_minus = tuple(2 * ((j == n - 2) - (j == n - 1)) for j in range(dim))
    fork_plus = tuple(2 * ((j == n - 2) + (j == n - 1)) for j in range(dim))
    values_range = [(0, 0), (0, 1)]
    for values in itertools.product(values_range, repeat=len(dbasis)):
        tau = _tau_table(base, dbasis, values, L_ell, shorts)
        if tau[fork_minus] == tau[fork_plus]:
            continue
        mapping = {a: CosetSet.make(L_ell, [tau[a]]) for a in shorts}
        entries.append((mapping, {
            "case": "saito/family-1",
            "tau": [[list(b), list(v)] for b, v in zip(dbasis, values)],
        }))

    # families (2) and (3): prime q, offsets b, and a pivot choice.
    for q in (p for p in range(2, q_max + 1) if is_prime(p)):
        for x in [None] + list(range(q)):
            if x is None:
                U = LatticeSubgroup.from_rows([[q, 0], [0, 1]])
                ell = 0
            else:
                U = LatticeSubgroup.from_rows([[1, x], [0, q]])
                ell = 1
            for b in itertools.product(range(q), repeat=n):
                mapping = {}
                ok = True
                for a in base.sorted_roots:
                    coeffs = integer_coefficients(base.simple_system, a)
                    b_alpha = sum(c * y for c, y in zip(coeffs, b))
                    rep = (b_alpha, 0) if ell == 0 else (0, b_alpha)
                    cs = CosetSet.make(U, [rep])
                    if base.length_class[a] == LONG:
                        cs = cs_intersect(cs, lam_ell)
                        if cs.is_empty:
                            ok = False
                            break
                    mapping[a] = cs
                if ok:
                    entries.append((mapping, {
                        "case": "saito/family-2" if x is None else "saito/family-3",
                        "q": q,
                        "x": x,
                        "b": list(b),
                    }))

    # family (4): proper-closed lifts (short-meeting subsystems only).
    rep4 = classify_proper_closed(ClassifyRequest(system, q_max=q_max))
    wrapped = [(SubrootDescriptor.make(system, m), p) for m, p in entries]
    for d, prov in rep4.entries:
        wrapped.append((d, {"case": "saito/family-4", "inner": prov}))
    report = ClassificationReport(system, q_max, ("semi_closed", "full", "proper_closed"))
    report.entries = _dedup(wrapped)
    report.notes.append(f"prime truncation at q_max={q_max}")
    return report
