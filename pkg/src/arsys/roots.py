"""Finite root systems with exact doubled-integer coordinates.

Every root is stored as an integer vector equal to twice its coordinates in
the ambient orthonormal basis, so the F_4 half-sum roots stay integral.  The
bilinear form carries a global factor 1/4 which cancels in every Cartan
integer, so all pairings are computed in plain integer arithmetic.

Fixed simple systems (the standard realizations, recorded once and never
varied):

  A_n  in R^(n+1):  e_i - e_(i+1)
  B_n  in R^n:      e_i - e_(i+1), e_n
  C_n  in R^n:      e_i - e_(i+1), 2 e_n
  D_n  in R^n:      e_i - e_(i+1), e_(n-1) + e_n
  E_8  in R^8:      (e_1 + e_8 - sum others)/2, e_1 + e_2, e_2 - e_1,
                    e_(i-1) - e_(i-2) for 4 <= i <= 8
  E_6, E_7:         the first 6 resp. 7 simple roots of E_8
  F_4  in R^4:      e_2 - e_3, e_3 - e_4, e_4, (e_1 - e_2 - e_3 - e_4)/2
  G_2  in R^3:      e_1 - e_2, -2 e_1 + e_2 + e_3
  BC_n in R^n:      e_i - e_(i+1), e_n  (the B_n system; BC_n = B_n u C_n)

C_2 is admitted: it is the length-preserving twin of B_2 and occurs as the
base of twisted systems built from A_3; rank-one systems are rejected.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from .errors import ValidationError
from .lattice import hermite_normal_form, is_prime

Root = Tuple[int, ...]

FAMILIES = ("A", "B", "C", "D", "E", "F", "G", "BC")

SHORT, LONG, DIVISIBLE = "short", "long", "divisible"

_RANK_RULES = {
    "A": lambda n: n >= 2,
    "B": lambda n: n >= 2,
    "C": lambda n: n >= 2,
    "D": lambda n: n >= 4,
    "E": lambda n: n in (6, 7, 8),
    "F": lambda n: n == 4,
    "G": lambda n: n == 2,
    "BC": lambda n: n >= 2,
}


@dataclass(frozen=True)
class RootSystemType:
    family: str
    rank: int

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValidationError(f"unknown family {self.family!r}")
        if self.rank == 1 or (self.family == "BC" and self.rank == 1):
            raise ValidationError(
                f"{self.family}_{self.rank} rejected: rank-one systems are "
                "excluded (mild assumption on the scope of the classification)"
            )
        if not _RANK_RULES[self.family](self.rank):
            raise ValidationError(f"inadmissible type {self.family}_{self.rank}")

    @property
    def is_reduced(self) -> bool:
        return self.family != "BC"

    @property
    def is_simply_laced(self) -> bool:
        return self.family in ("A", "D", "E")

    def __str__(self) -> str:
        return f"{self.family}{self.rank}"

    @staticmethod
    def parse(text: str) -> "RootSystemType":
        """Parse strings like 'A2', 'BC3', 'G2'."""
        fam = "BC" if text.upper().startswith("BC") else text[:1].upper()
        try:
            rank = int(text[len(fam):])
        except ValueError:
            raise ValidationError(f"cannot parse root system type {text!r}")
        return RootSystemType(fam, rank)

    def to_json(self):
        return {"family": self.family, "rank": self.rank}

    @staticmethod
    def from_json(obj) -> "RootSystemType":
        return RootSystemType(obj["family"], int(obj["rank"]))


def dot2(a: Root, b: Root) -> int:
    """Scaled inner product (4x the geometric one); exact."""
    return sum(x * y for x, y in zip(a, b))


def cartan_integer(beta: Root, alpha: Root) -> int:
    """The pairing (beta, alpha-check); integral for roots of one system."""
    num = 2 * dot2(beta, alpha)
    den = dot2(alpha, alpha)
    if num % den:
        raise ValidationError("non-integral Cartan pairing")
    return num // den


def reflect_vector(alpha: Root, beta: Root) -> Root:
    c = cartan_integer(beta, alpha)
    return tuple(b - c * a for a, b in zip(alpha, beta))


def _e(i: int, dim: int, c: int = 2) -> Root:
    return tuple(c if j == i else 0 for j in range(dim))


def _build_roots(t: RootSystemType):
    n = t.rank
    fam = t.family
    if fam == "A":
        dim = n + 1
        roots = {
            tuple(2 * ((i == a) - (i == b)) for i in range(dim))
            for a in range(dim) for b in range(dim) if a != b
        }
        simple = [vec_sub(_e(i, dim), _e(i + 1, dim)) for i in range(n)]
    elif fam in ("B", "BC"):
        dim = n
        shorts = {_e(i, dim, s) for i in range(n) for s in (2, -2)}
        longs = {
            tuple(si * 2 * (j == a) + sj * 2 * (j == b) for j in range(dim))
            for a in range(n) for b in range(n) if a < b
            for si in (1, -1) for sj in (1, -1)
        }
        roots = shorts | longs
        if fam == "BC":
            roots |= {_e(i, dim, s) for i in range(n) for s in (4, -4)}
        simple = [vec_sub(_e(i, dim), _e(i + 1, dim)) for i in range(n - 1)]
        simple.append(_e(n - 1, dim))
    elif fam == "C":
        dim = n
        roots = {
            tuple(si * 2 * (j == a) + sj * 2 * (j == b) for j in range(dim))
            for a in range(n) for b in range(n) if a < b
            for si in (1, -1) for sj in (1, -1)
        }
        roots |= {_e(i, dim, s) for i in range(n) for s in (4, -4)}
        simple = [vec_sub(_e(i, dim), _e(i + 1, dim)) for i in range(n - 1)]
        simple.append(_e(n - 1, dim, 4))
    elif fam == "D":
        dim = n
        roots = {
            tuple(si * 2 * (j == a) + sj * 2 * (j == b) for j in range(dim))
            for a in range(n) for b in range(n) if a < b
            for si in (1, -1) for sj in (1, -1)
        }
        simple = [vec_sub(_e(i, dim), _e(i + 1, dim)) for i in range(n - 1)]
        simple.append(vec_add(_e(n - 2, dim), _e(n - 1, dim)))
    elif fam == "F":
        dim = 4
        roots = {_e(i, dim, s) for i in range(4) for s in (2, -2)}
        roots |= {
            tuple(si * 2 * (j == a) + sj * 2 * (j == b) for j in range(dim))
            for a in range(4) for b in range(4) if a < b
            for si in (1, -1) for sj in (1, -1)
        }
        roots |= set(itertools.product((1, -1), repeat=4))
        simple = [
            vec_sub(_e(1, dim), _e(2, dim)),
            vec_sub(_e(2, dim), _e(3, dim)),
            _e(3, dim),
            (1, -1, -1, -1),
        ]
    elif fam == "G":
        dim = 3
        base = [(2, -2, 0), (0, 2, -2), (2, 0, -2)]
        longs = [(4, -2, -2), (-2, 4, -2), (-2, -2, 4)]
        roots = {s for v in base + longs for s in (v, vec_neg(v))}
        simple = [(2, -2, 0), (-4, 2, 2)]
    else:  # E_6, E_7, E_8
        dim = 8
        e8_simple = [
            (1, -1, -1, -1, -1, -1, -1, 1),
            (2, 2, 0, 0, 0, 0, 0, 0),
            (-2, 2, 0, 0, 0, 0, 0, 0),
            (0, -2, 2, 0, 0, 0, 0, 0),
            (0, 0, -2, 2, 0, 0, 0, 0),
            (0, 0, 0, -2, 2, 0, 0, 0),
            (0, 0, 0, 0, -2, 2, 0, 0),
            (0, 0, 0, 0, 0, -2, 2, 0),
        ]
        simple = e8_simple[: t.rank]
        roots = _reflection_closure(simple)
    return frozenset(roots), tuple(simple)


def vec_add(a: Root, b: Root) -> Root:
    return tuple(x + y for x, y in zip(a, b))


def vec_sub(a: Root, b: Root) -> Root:
    return tuple(x - y for x, y in zip(a, b))


def vec_neg(a: Root) -> Root:
    return tuple(-x for x in a)


def _reflection_closure(seed: Sequence[Root]) -> set:
    """Close {±seed} under reflections in its own elements."""
    roots = {s for v in seed for s in (v, vec_neg(v))}
    frontier = list(roots)
    while frontier:
        nxt = []
        for a in list(roots):
            for b in frontier:
                r = reflect_vector(b, a)
                if r not in roots:
                    roots.add(r)
                    nxt.append(r)
                r = reflect_vector(a, b)
                if r not in roots:
                    roots.add(r)
                    nxt.append(r)
        frontier = nxt
    return roots


class RootSystem:
    """Immutable finite root system; all coordinates are doubled integers."""

    def __init__(self, rstype: RootSystemType):
        self.type = rstype
        roots, simple = _build_roots(rstype)
        self.roots: FrozenSet[Root] = roots
        self.simple_system: Tuple[Root, ...] = simple
        self._set = set(roots)
        lc: Dict[Root, str] = {}
        for a in roots:
            if all(x % 2 == 0 for x in a) and tuple(x // 2 for x in a) in self._set:
                lc[a] = DIVISIBLE
        nd_norms = sorted({dot2(a, a) for a in roots if a not in lc})
        for a in roots:
            if a in lc:
                continue
            if len(nd_norms) == 1:
                lc[a] = LONG  # single length: every root is long by convention
            else:
                lc[a] = SHORT if dot2(a, a) == nd_norms[0] else LONG
        self.length_class: Dict[Root, str] = lc
        self.sorted_roots: Tuple[Root, ...] = tuple(sorted(roots))

    def __contains__(self, v: Root) -> bool:
        return tuple(v) in self._set

    def __iter__(self):
        return iter(self.sorted_roots)

    def __len__(self):
        return len(self._set)

    @property
    def ambient_dim(self) -> int:
        return len(self.simple_system[0])

    def classes(self) -> Tuple[str, ...]:
        present = set(self.length_class.values())
        return tuple(c for c in (SHORT, LONG, DIVISIBLE) if c in present)

    def of_class(self, cls: str) -> Tuple[Root, ...]:
        return tuple(a for a in self.sorted_roots if self.length_class[a] == cls)

    def to_json(self):
        return {
            "type": self.type.to_json(),
            "roots": [list(r) for r in self.sorted_roots],
        }


def build_root_system(rstype: RootSystemType) -> RootSystem:
    """Construct the full root system for an admissible type."""
    return RootSystem(rstype)


def reflect(rs: RootSystem, alpha: Root, beta: Root) -> Root:
    """s_alpha(beta), exact; both arguments must belong to the system."""
    if alpha not in rs or beta not in rs:
        raise ValidationError("reflect: arguments must be roots of the system")
    return reflect_vector(alpha, beta)


def m_constant(rstype: RootSystemType) -> int:
    """Family constant: 1 for A/D/E, 2 for B/C/F, 3 for G_2, 4 for BC."""
    return {"A": 1, "D": 1, "E": 1, "B": 2, "C": 2, "F": 2, "G": 3, "BC": 4}[
        rstype.family
    ]


def gamma_pairs(rs: RootSystem, target: str):
    """Ordered pairs of equal-length roots whose sum lands in ``target``.

    target LONG pairs shorts (the set Gamma_s); target DIVISIBLE pairs longs
    (Gamma_ell).
    """
    if target == LONG:
        source = SHORT
    elif target == DIVISIBLE:
        source = LONG
    else:
        raise ValidationError("target must be 'long' or 'divisible'")
    src = rs.of_class(source)
    out = []
    for a in src:
        for b in src:
            s = vec_add(a, b)
            if s in rs and rs.length_class[s] == target:
                out.append((a, b))
    return tuple(out)


def integer_coefficients(basis: Sequence[Root], v: Root) -> Tuple[int, ...]:
    """Integer coordinates of v in the given independent basis; exact.

    Solves the Gram system over Fractions and insists on integrality.
    """
    m = len(basis)
    G = [[Fraction(dot2(basis[i], basis[j])) for j in range(m)] for i in range(m)]
    rhs = [Fraction(dot2(basis[i], v)) for i in range(m)]
    # Gaussian elimination with partial pivoting over Q.
    for col in range(m):
        piv = next((r for r in range(col, m) if G[r][col] != 0), None)
        if piv is None:
            raise ValidationError("basis is not independent")
        G[col], G[piv] = G[piv], G[col]
        rhs[col], rhs[piv] = rhs[piv], rhs[col]
        inv = G[col][col]
        for r in range(m):
            if r != col and G[r][col] != 0:
                f = G[r][col] / inv
                G[r] = [x - f * y for x, y in zip(G[r], G[col])]
                rhs[r] = rhs[r] - f * rhs[col]
    coeffs = []
    for i in range(m):
        c = rhs[i] / G[i][i]
        if c.denominator != 1:
            raise ValidationError("vector is not an integer combination of the basis")
        coeffs.append(int(c))
    if tuple(
        sum(coeffs[i] * basis[i][j] for i in range(m)) for j in range(len(v))
    ) != tuple(v):
        raise ValidationError("vector lies outside the span of the basis")
    return tuple(coeffs)


def root_lattice_basis(vectors: Iterable[Root]) -> Tuple[Root, ...]:
    """HNF basis of the lattice generated by the given integer vectors."""
    H, _ = hermite_normal_form(sorted(vectors))
    return tuple(r for r in H if any(r))


def highest_root_marks(rs: RootSystem):
    """Highest root and its marks in the fixed simple system (reduced only)."""
    if not rs.type.is_reduced:
        raise ValidationError(
            "marks are defined for reduced systems; decompose BC via its "
            "reduced part instead"
        )
    best = None
    for a in rs.sorted_roots:
        coeffs = integer_coefficients(rs.simple_system, a)
        h = sum(coeffs)
        if best is None or h > best[0]:
            best = (h, a, coeffs)
    return best[1], best[2]


def closed_closure(rs: RootSystem, subset: Iterable[Root]) -> FrozenSet[Root]:
    """Least superset closed under root addition and reflections.

    The seed must be symmetric (S = -S) and contained in the system.
    """
    S = {tuple(v) for v in subset}
    if any(v not in rs for v in S):
        raise ValidationError("subset contains non-roots")
    if {vec_neg(v) for v in S} != S:
        raise ValidationError("subset is not symmetric under negation")
    changed = True
    while changed:
        changed = False
        cur = list(S)
        for a in cur:
            for b in cur:
                s = vec_add(a, b)
                if s in rs and s not in S:
                    S.add(s)
                    changed = True
                r = reflect_vector(b, a)
                if r not in S:
                    S.add(r)
                    changed = True
    return frozenset(S)


@dataclass(frozen=True)
class SubsetReport:
    is_subroot: bool
    is_closed: bool
    is_semi_closed: bool
    is_maximal_closed: bool
    is_maximal_semi_closed: bool

    def to_json(self):
        return {
            "subroot": self.is_subroot,
            "closed": self.is_closed,
            "semi_closed": self.is_semi_closed,
            "maximal_closed": self.is_maximal_closed,
            "maximal_semi_closed": self.is_maximal_semi_closed,
        }


_SEMI_SHAPES = {
    (SHORT, SHORT, LONG),
    (SHORT, SHORT, DIVISIBLE),
    (LONG, LONG, DIVISIBLE),
}


def classify_subset(rs: RootSystem, subset: Iterable[Root]) -> SubsetReport:
    """All five subset flags, computed exactly by exhaustive scans."""
    S = {tuple(v) for v in subset}
    if any(v not in rs for v in S):
        raise ValidationError("subset contains non-roots")
    if not S:
        return SubsetReport(False, True, False, False, False)
    is_subroot = all(reflect_vector(b, a) in S for a in S for b in S)
    violations = []
    for a in S:
        for b in S:
            s = vec_add(a, b)
            if s in rs and s not in S:
                violations.append((a, b, s))
    is_closed = not violations
    is_semi = (
        is_subroot
        and not is_closed
        and all(
            (rs.length_class[a], rs.length_class[b], rs.length_class[s])
            in _SEMI_SHAPES
            for a, b, s in violations
        )
    )
    proper = S != rs._set
    is_max_closed = False
    if is_subroot and is_closed and proper:
        is_max_closed = all(
            closed_closure(rs, S | {g, vec_neg(g)}) == rs._set
            for g in rs.sorted_roots
            if g not in S
        )
    # Maximal semi-closed: semi-closed and not properly contained in a proper
    # closed subroot system, i.e. its closed closure is everything.
    is_max_semi = is_semi and closed_closure(rs, S) == rs._set
    return SubsetReport(is_subroot, is_closed, is_semi, is_max_closed, is_max_semi)


def _bds_generator_sets(rs: RootSystem):
    """Generator sets from the marks: drop a mark-1 node, or swap in the
    lowest root at a prime mark."""
    alpha0, marks = highest_root_marks(rs)
    simples = rs.simple_system
    out = []
    for i, m in enumerate(marks):
        rest = [s for j, s in enumerate(simples) if j != i]
        if m == 1:
            out.append(tuple(rest))
        elif is_prime(m):
            out.append(tuple([vec_neg(alpha0)] + rest))
    return out


def borel_de_siebenthal(rs: RootSystem) -> List[FrozenSet[Root]]:
    """Maximal closed subroot systems, one representative per conjugacy class.

    Reduced systems follow the marks recipe; BC systems are the divisible
    roots joined with each maximal closed system of the reduced part.
    """
    if rs.type.is_reduced:
        reps = []
        for gens in _bds_generator_sets(rs):
            seed = {s for g in gens for s in (g, vec_neg(g))}
            reps.append(closed_closure(rs, seed))
        # The marks recipe can repeat a class; dedup up to Weyl conjugacy.
        out, seen_orbits = [], []
        for rep in reps:
            orbit = _weyl_orbit_of_set(rs, rep)
            if orbit not in seen_orbits:
                seen_orbits.append(orbit)
                out.append(min(orbit, key=lambda s: tuple(sorted(s))))
        return out
    reduced = build_root_system(RootSystemType("B", rs.type.rank))
    divisible = {a for a in rs.roots if rs.length_class[a] == DIVISIBLE}
    return [frozenset(divisible | set(phi)) for phi in borel_de_siebenthal(reduced)]


def _weyl_orbit_of_set(rs: RootSystem, subset: FrozenSet[Root]):
    """Orbit of a root subset under the Weyl group (simple reflections BFS)."""
    start = frozenset(subset)
    seen = {start}
    frontier = [start]
    while frontier:
        nxt = []
        for S in frontier:
            for g in rs.simple_system:
                T = frozenset(reflect_vector(g, v) for v in S)
                if T not in seen:
                    seen.add(T)
                    nxt.append(T)
        frontier = nxt
    return seen


def all_maximal_closed(rs: RootSystem) -> List[FrozenSet[Root]]:
    """Every maximal closed subroot system (all Weyl conjugates), sorted."""
    out = set()
    for rep in borel_de_siebenthal(rs):
        out |= _weyl_orbit_of_set(rs, rep)
    return sorted(out, key=lambda s: tuple(sorted(s)))


class SubSystemView:
    """Length-class and pairing view of a subset of an ambient system.

    Used to validate extension data over gradients, whose components are
    realized inside the ambient coordinates rather than in standard position.
    """

    def __init__(self, roots: Iterable[Root]):
        self.roots = tuple(sorted({tuple(r) for r in roots}))
        rset = set(self.roots)
        self.length_class = {}
        half_norms = set()
        for a in self.roots:
            half = tuple(x // 2 for x in a)
            if all(x % 2 == 0 for x in a) and half in rset:
                self.length_class[a] = DIVISIBLE
                half_norms.add(dot2(half, half))
        nd_norms = sorted(
            {dot2(a, a) for a in self.roots if a not in self.length_class}
        )
        for a in self.roots:
            if a in self.length_class:
                continue
            if half_norms:
                # non-reduced: the halves of divisible roots are the shorts,
                # even when they are the only non-divisible length present
                cls = SHORT if dot2(a, a) in half_norms else LONG
            elif len(nd_norms) == 1:
                cls = LONG
            else:
                cls = SHORT if dot2(a, a) == nd_norms[0] else LONG
            self.length_class[a] = cls

    def components(self) -> List["SubSystemView"]:
        """Irreducible components via non-orthogonality connectivity."""
        remaining = set(self.roots)
        comps = []
        while remaining:
            seed = next(iter(remaining))
            comp = {seed}
            frontier = [seed]
            while frontier:
                a = frontier.pop()
                for b in list(remaining):
                    if b not in comp and dot2(a, b) != 0:
                        comp.add(b)
                        frontier.append(b)
            remaining -= comp
            comps.append(SubSystemView(comp))
        return sorted(comps, key=lambda c: c.roots)

    @property
    def rank(self) -> int:
        H, _ = hermite_normal_form(self.roots)
        return sum(1 for r in H if any(r))

    def detect_family(self) -> Tuple[str, int]:
        """Abstract family of an irreducible component, from exact invariants."""
        n_roots = len(self.roots)
        if any(c == DIVISIBLE for c in self.length_class.values()):
            n = sum(1 for a in self.roots if self.length_class[a] == DIVISIBLE) // 2
            return "BC", n
        norms = sorted({dot2(a, a) for a in self.roots})
        rank = self.rank
        if len(norms) == 1:
            return ("A", 1) if n_roots == 2 else ("ADE", rank)
        ratio = norms[1] // norms[0]
        if ratio == 3:
            return "G", 2
        if rank == 2:
            return "B", 2  # B_2 and C_2 coincide
        shorts = sum(1 for a in self.roots if self.length_class[a] == SHORT)
        return ("B", rank) if shorts == 2 * rank else ("C", rank)
