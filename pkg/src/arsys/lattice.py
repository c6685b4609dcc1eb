"""Exact arithmetic on full-rank subgroups of Z^k and unions of their cosets.

Subgroups are stored by a row basis in Hermite normal form (HNF): upper
triangular, positive pivots on the diagonal, and every entry above a pivot
nonnegative and strictly smaller than it.  A ``CosetSet`` is a finite union
of cosets of one full-rank subgroup; it is the universal representation of
every translation set handled by this package.  All arithmetic is integer
arithmetic; nothing here ever touches floats.

The ambient rank k may be 0 (the zero lattice Z^0 = {()}), which models
finite systems with no translation directions.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Optional, Sequence, Tuple

from .errors import ValidationError

Vec = Tuple[int, ...]
Mat = Tuple[Vec, ...]


def vec_add(a: Vec, b: Vec) -> Vec:
    return tuple(x + y for x, y in zip(a, b))


def vec_sub(a: Vec, b: Vec) -> Vec:
    return tuple(x - y for x, y in zip(a, b))


def vec_neg(a: Vec) -> Vec:
    return tuple(-x for x in a)


def vec_scale(c: int, a: Vec) -> Vec:
    return tuple(c * x for x in a)


def is_prime(n: int) -> bool:
    """Trial-division primality test; the primes here stay tiny."""
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def _identity(n: int) -> list[list[int]]:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def hermite_normal_form(rows: Sequence[Sequence[int]], *, width: Optional[int] = None):
    """Row-style Hermite normal form with transformation matrix.

    Returns ``(H, U)`` with ``U`` unimodular and ``U * A = H`` where ``A``
    is the input stacked as rows.  ``H`` has its (left-to-right) pivot rows
    first and zero rows last; pivots are positive and entries above each
    pivot are reduced into ``[0, pivot)``.

    ``width`` fixes the number of columns when ``rows`` is empty.
    """
    m = len(rows)
    if m == 0:
        if width is None:
            raise ValidationError("cannot infer width of an empty matrix")
        return (), ()
    n = len(rows[0])
    if any(len(r) != n for r in rows):
        raise ValidationError("ragged matrix")
    H = [list(map(int, r)) for r in rows]
    U = _identity(m)

    def combine(i, q, j):
        # row_i -= q * row_j, applied to H and U in lockstep
        H[i] = [x - q * y for x, y in zip(H[i], H[j])]
        U[i] = [x - q * y for x, y in zip(U[i], U[j])]

    top = 0
    for col in range(n):
        if top == m:
            break
        # Euclidean elimination below `top` in this column.
        pivot_found = False
        while True:
            nz = [i for i in range(top, m) if H[i][col] != 0]
            if not nz:
                break
            piv = min(nz, key=lambda i: abs(H[i][col]))
            if piv != top:
                H[top], H[piv] = H[piv], H[top]
                U[top], U[piv] = U[piv], U[top]
            if H[top][col] < 0:
                H[top] = [-x for x in H[top]]
                U[top] = [-x for x in U[top]]
            done = True
            for i in range(top + 1, m):
                q = H[i][col] // H[top][col]
                if q:
                    combine(i, q, top)
                if H[i][col] != 0:
                    done = False
            if done:
                pivot_found = True
                break
        if not pivot_found:
            continue
        # Reduce the entries above the new pivot into [0, pivot).
        p = H[top][col]
        for i in range(top):
            q = H[i][col] // p
            if q:
                combine(i, q, top)
        top += 1
    return tuple(tuple(r) for r in H), tuple(tuple(r) for r in U)


def _det_int(rows: Sequence[Sequence[int]]) -> int:
    """Exact determinant via fraction-free elimination (tiny matrices)."""
    n = len(rows)
    if n == 0:
        return 1
    a = [[Fraction(x) for x in r] for r in rows]
    det = Fraction(1)
    for col in range(n):
        piv = next((i for i in range(col, n) if a[i][col] != 0), None)
        if piv is None:
            return 0
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            det = -det
        det *= a[col][col]
        inv = a[col][col]
        for i in range(col + 1, n):
            f = a[i][col] / inv
            if f:
                a[i] = [x - f * y for x, y in zip(a[i], a[col])]
    assert det.denominator == 1
    return int(det)


def _adjugate(rows: Mat) -> Mat:
    """Adjugate matrix (transpose of cofactors), exact."""
    n = len(rows)
    if n == 0:
        return ()

    def minor(r, c):
        sub = [[rows[i][j] for j in range(n) if j != c] for i in range(n) if i != r]
        return _det_int(sub)

    return tuple(
        tuple((-1) ** (i + j) * minor(j, i) for j in range(n)) for i in range(n)
    )


def _matmul(a: Sequence[Sequence[int]], b: Sequence[Sequence[int]]) -> Mat:
    if not a:
        return ()
    cols = len(b[0]) if b else 0
    return tuple(
        tuple(sum(ra[t] * b[t][j] for t in range(len(b))) for j in range(cols))
        for ra in a
    )


@dataclass(frozen=True)
class LatticeSubgroup:
    """Full-rank subgroup of Z^k, stored by its HNF row basis."""

    basis: Mat

    def __post_init__(self):
        k = len(self.basis)
        for i, row in enumerate(self.basis):
            if len(row) != k:
                raise ValidationError("basis must be square (full-rank subgroup)")
            if row[i] <= 0 or any(row[j] != 0 for j in range(i)):
                raise ValidationError("basis is not in Hermite normal form")
            for j in range(i):
                if not 0 <= self.basis[j][i] < row[i]:
                    raise ValidationError("basis is not in Hermite normal form")

    @staticmethod
    def from_rows(rows: Sequence[Sequence[int]], k: Optional[int] = None) -> "LatticeSubgroup":
        """Build from any generating rows; rejects rank-deficient input."""
        if not rows:
            if k == 0:
                return LatticeSubgroup(())
            raise ValidationError("full-rank subgroup needs k generators")
        k = len(rows[0])
        if k == 0:
            return LatticeSubgroup(())
        H, _ = hermite_normal_form(rows)
        top = [r for r in H if any(r)]
        if len(top) != k:
            raise ValidationError("generators do not span a full-rank subgroup")
        return LatticeSubgroup(tuple(top))

    @staticmethod
    def full(k: int) -> "LatticeSubgroup":
        return LatticeSubgroup(tuple(tuple(_identity(k)[i]) for i in range(k)))

    @property
    def k(self) -> int:
        return len(self.basis)

    @property
    def det(self) -> int:
        d = 1
        for i in range(self.k):
            d *= self.basis[i][i]
        return d

    index = det  # the index [Z^k : L] equals the determinant

    def reduce(self, v: Sequence[int]) -> Vec:
        """Canonical residue of ``v``: coordinate i lands in [0, basis[i][i])."""
        w = list(map(int, v))
        if len(w) != self.k:
            raise ValidationError("vector has wrong ambient rank")
        for i in range(self.k):
            q = w[i] // self.basis[i][i]
            if q:
                for j in range(i, self.k):
                    w[j] -= q * self.basis[i][j]
        return tuple(w)

    def contains(self, v: Sequence[int]) -> bool:
        return all(x == 0 for x in self.reduce(v))

    def contains_lattice(self, other: "LatticeSubgroup") -> bool:
        return all(self.contains(r) for r in other.basis)

    def residues(self) -> Iterator[Vec]:
        """All canonical residues of Z^k modulo this subgroup (det of them)."""
        ranges = [range(self.basis[i][i]) for i in range(self.k)]
        return iter(itertools.product(*ranges))

    def sum_with(self, other: "LatticeSubgroup") -> "LatticeSubgroup":
        if self.k == 0:
            return self
        return LatticeSubgroup.from_rows(self.basis + other.basis)

    def scale(self, c: int) -> "LatticeSubgroup":
        if c == 0:
            raise ValidationError("scaling a full-rank subgroup by 0")
        if self.k == 0:
            return self
        return LatticeSubgroup.from_rows(tuple(vec_scale(c, r) for r in self.basis))

    def intersect(self, other: "LatticeSubgroup") -> "LatticeSubgroup":
        """Exact intersection of two full-rank subgroups.

        u*A lies in L_B iff u*A*adj(B) == 0 mod det(B); the integer left
        kernel of [[A*adj(B)], [det(B)*I]] projects onto exactly those u.
        """
        if self.k == 0:
            return self
        A, B = self.basis, other.basis
        m = abs(other.det)
        M = _matmul(A, _adjugate(B))
        k = self.k
        stacked = list(M) + [vec_scale(m, row) for row in _identity(k)]
        H, U = hermite_normal_form(stacked)
        kernel_rows = [U[i][:k] for i in range(len(H)) if not any(H[i])]
        gens = [_matmul([u], A)[0] for u in kernel_rows]
        return LatticeSubgroup.from_rows(gens)

    def solve(self, target: Sequence[int]) -> Optional[Vec]:
        """Integer coefficients c with c*basis == target, or None."""
        y = []
        t = list(map(int, target))
        for i in range(self.k):
            if t[i] % self.basis[i][i] != 0:
                return None
            c = t[i] // self.basis[i][i]
            y.append(c)
            for j in range(i, self.k):
                t[j] -= c * self.basis[i][j]
        if any(t):
            return None
        return tuple(y)

    def to_json(self):
        return [list(r) for r in self.basis]


def lattice_residues(sub: LatticeSubgroup, mod: LatticeSubgroup) -> list[Vec]:
    """Canonical residues (mod ``mod``) of the elements of ``sub``.

    Requires ``mod`` to be a sublattice of ``sub``.
    """
    if not sub.contains_lattice(mod):
        raise ValidationError("mod is not a sublattice of sub")
    return sorted(r for r in mod.residues() if sub.contains(r))


def sublattices_of_prime_index(sub: LatticeSubgroup, q: int) -> list[LatticeSubgroup]:
    """All subgroups of ``sub`` of (prime) index q, via HNF shapes over the basis."""
    out = []
    for shape in enumerate_prime_maximal_subgroups(sub.k, q):
        rows = _matmul(shape.basis, sub.basis)
        out.append(LatticeSubgroup.from_rows(rows))
    return sorted(set(out), key=lambda L: L.basis)


def enumerate_prime_maximal_subgroups(k: int, q: int) -> list[LatticeSubgroup]:
    """All HNF matrices of determinant q (q prime): the maximal subgroups of Z^k.

    There are (q^k - 1)/(q - 1) of them: one diagonal entry equals q, the
    entries above it range over [0, q-1], everything else is the identity.
    """
    if not is_prime(q):
        raise ValidationError(f"index {q} is not prime")
    out = []
    for ell in range(k):
        above = itertools.product(range(q), repeat=ell)
        for col in above:
            rows = _identity(k)
            rows[ell][ell] = q
            for j, x in enumerate(col):
                rows[j][ell] = x
            out.append(LatticeSubgroup(tuple(tuple(r) for r in rows)))
    return out


@dataclass(frozen=True)
class CosetSet:
    """Finite union of cosets of one full-rank subgroup of Z^k.

    ``reps`` are canonical residues, pairwise distinct and sorted.  The empty
    set is a legal value (``reps == ()``).  Structural equality is meaningful
    after :func:`cs_canonicalize`, which enlarges the subgroup to the maximal
    period of the set.
    """

    subgroup: LatticeSubgroup
    reps: Mat

    @staticmethod
    def make(subgroup: LatticeSubgroup, reps: Iterable[Sequence[int]]) -> "CosetSet":
        rs = sorted({subgroup.reduce(r) for r in reps})
        return CosetSet(subgroup, tuple(rs))

    @staticmethod
    def empty(k: int) -> "CosetSet":
        return CosetSet(LatticeSubgroup.full(k), ())

    @staticmethod
    def group(subgroup: LatticeSubgroup) -> "CosetSet":
        return CosetSet(subgroup, ((0,) * subgroup.k,))

    @staticmethod
    def full(k: int) -> "CosetSet":
        return CosetSet.group(LatticeSubgroup.full(k))

    @property
    def k(self) -> int:
        return self.subgroup.k

    @property
    def is_empty(self) -> bool:
        return not self.reps

    @property
    def is_group(self) -> bool:
        return self.reps == ((0,) * self.k,)

    def contains(self, v: Sequence[int]) -> bool:
        return self.subgroup.reduce(v) in set(self.reps)

    def translate(self, v: Sequence[int]) -> "CosetSet":
        return CosetSet.make(self.subgroup, [vec_add(r, tuple(v)) for r in self.reps])

    def neg(self) -> "CosetSet":
        return CosetSet.make(self.subgroup, [vec_neg(r) for r in self.reps])

    def scale(self, c: int) -> "CosetSet":
        """The set {c*a}; c must be nonzero (0 collapses to a point)."""
        if self.is_empty:
            return self
        return CosetSet.make(
            self.subgroup.scale(abs(c)), [vec_scale(c, r) for r in self.reps]
        )

    def residues_mod(self, mod: LatticeSubgroup) -> list[Vec]:
        """Canonical residues of the set modulo ``mod`` (a common period)."""
        shifts = lattice_residues(self.subgroup, mod)
        return sorted({mod.reduce(vec_add(r, s)) for r in self.reps for s in shifts})

    def to_json(self):
        return {"subgroup": self.subgroup.to_json(), "reps": [list(r) for r in self.reps]}

    @staticmethod
    def from_json(obj) -> "CosetSet":
        sub = LatticeSubgroup.from_rows([tuple(r) for r in obj["subgroup"]],
                                        k=len(obj["subgroup"]))
        if not obj["reps"]:
            return CosetSet.empty(sub.k)
        return cs_canonicalize(CosetSet.make(sub, [tuple(r) for r in obj["reps"]]))


def cs_sum(a: CosetSet, b: CosetSet) -> CosetSet:
    """Elementwise sum set {x + y}: a coset union of the summed subgroup."""
    if a.k != b.k:
        raise ValidationError("ambient rank mismatch")
    if a.is_empty or b.is_empty:
        return CosetSet.empty(a.k)
    sub = a.subgroup.sum_with(b.subgroup)
    reps = [vec_add(r, s) for r in a.reps for s in b.reps]
    return cs_canonicalize(CosetSet.make(sub, reps))


def cs_intersect(a: CosetSet, b: CosetSet) -> CosetSet:
    """Exact intersection; may be empty."""
    if a.k != b.k:
        raise ValidationError("ambient rank mismatch")
    if a.is_empty or b.is_empty:
        return CosetSet.empty(a.k)
    k = a.k
    if k == 0:
        common = set(a.reps) & set(b.reps)
        return CosetSet(LatticeSubgroup.full(0), tuple(sorted(common)))
    inter = a.subgroup.intersect(b.subgroup)
    stacked = a.subgroup.basis + b.subgroup.basis
    H, U = hermite_normal_form(stacked)
    span = LatticeSubgroup(tuple(r for r in H if any(r)))
    hits = []
    for ra in a.reps:
        for rb in b.reps:
            y = span.solve(vec_sub(rb, ra))
            if y is None:
                continue
            z = [sum(y[i] * U[i][j] for i in range(k)) for j in range(2 * k)]
            u = z[:k]
            c = vec_add(ra, _matmul([u], a.subgroup.basis)[0])
            hits.append(c)
    if not hits:
        return CosetSet.empty(k)
    return cs_canonicalize(CosetSet.make(inter, hits))


def cs_canonicalize(a: CosetSet) -> CosetSet:
    """Enlarge the subgroup to the maximal period of the set; reduce and sort.

    After this call two CosetSets are equal as sets of vectors iff they are
    structurally equal.  Idempotent.
    """
    if a.is_empty:
        return CosetSet.empty(a.k)
    if a.k == 0:
        return a
    reps = list(a.reps)
    base = reps[0]
    shifts = []
    rep_set = set(reps)
    for r in reps[1:]:
        v = vec_sub(r, base)
        if {a.subgroup.reduce(vec_add(s, v)) for s in reps} == rep_set:
            shifts.append(v)
    if not shifts:
        return CosetSet.make(a.subgroup, reps)
    period = LatticeSubgroup.from_rows(a.subgroup.basis + tuple(shifts))
    return CosetSet.make(period, reps)


def cs_subset(a: CosetSet, b: CosetSet) -> bool:
    """Whether a ⊆ b as sets of vectors."""
    if a.is_empty:
        return True
    return cs_intersect(a, b) == cs_canonicalize(a)


def cs_equal(a: CosetSet, b: CosetSet) -> bool:
    return cs_canonicalize(a) == cs_canonicalize(b)
