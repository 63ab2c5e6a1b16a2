"""Even integral lattices and their isometries.

A lattice is a free Z-module with a nondegenerate symmetric integer Gram
matrix; it is even when every vector has even self-pairing.  ADE root
lattices follow the negative definite convention (Gram = minus the
Cartan matrix), so positive definite callers must twist by -1
explicitly.  B(d), defined for d = 3 mod 4, is the rank-two negative
definite lattice with Gram [[-(d+1)/2, 1], [1, -2]].

Vectors carry their home lattice and may have rational coordinates
(needed for dual and projection work); the real spinor norm of an
isometry comes from an exact Cartan-Dieudonne reflection factorization
over Q.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from .errors import (
    BadParameter,
    DegenerateComplement,
    DependentInput,
    MemberOfSummand,
    MixedLattices,
    NotDefinite,
    NotIsometry,
    SingularMatrix,
    ZeroVector,
)
from .exact import (
    IntMatrix,
    kernel_basis,
    rational_inverse,
    signature_of_symmetric,
    smith_normal_form,
    solve_rational,
)


class Lattice:
    """Immutable lattice; determinant, signature and parity are cached eagerly."""

    __slots__ = ("gram", "labels", "det", "signature", "even")

    def __init__(self, gram, labels=None):
        if not isinstance(gram, IntMatrix):
            gram = IntMatrix(gram)
        if not gram.is_symmetric():
            raise BadParameter("gram matrix must be symmetric")
        det = gram.det()
        if det == 0:
            raise SingularMatrix("gram matrix is degenerate")
        if labels is not None:
            labels = tuple(str(x) for x in labels)
            if len(labels) != gram.rows:
                raise BadParameter("one label per basis vector required")
        object.__setattr__(self, "gram", gram)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "det", det)
        object.__setattr__(self, "signature", signature_of_symmetric(gram))
        object.__setattr__(
            self, "even", all(gram.data[i][i] % 2 == 0 for i in range(gram.rows))
        )

    def __setattr__(self, name, value):
        raise AttributeError("Lattice is immutable")

    @property
    def rank(self) -> int:
        return self.gram.rows

    def __eq__(self, other):
        return isinstance(other, Lattice) and self.gram == other.gram

    def __hash__(self):
        return hash(self.gram)

    def __repr__(self):
        return f"Lattice(rank={self.rank}, det={self.det}, signature={self.signature})"

    def vector(self, coords) -> "LatticeVector":
        return LatticeVector(self, coords)

    def basis_vector(self, i: int) -> "LatticeVector":
        return LatticeVector(self, [int(i == j) for j in range(self.rank)])

    def basis(self):
        return [self.basis_vector(i) for i in range(self.rank)]

    def zero(self) -> "LatticeVector":
        return LatticeVector(self, [0] * self.rank)

    def twist(self, t: int) -> "Lattice":
        if t < 1:
            raise BadParameter("twist parameter must be a positive integer")
        return Lattice(self.gram.scaled(t), self.labels)


def _as_exact(x):
    if isinstance(x, Fraction):
        return x if x.denominator != 1 else int(x)
    if isinstance(x, int):
        return x
    raise BadParameter(f"coordinates must be ints or Fractions, got {type(x).__name__}")


@dataclass(frozen=True)
class LatticeVector:
    """Coordinate vector relative to the basis of its home lattice."""

    home: Lattice
    coords: tuple

    def __init__(self, home, coords):
        coords = tuple(_as_exact(x) for x in coords)
        if len(coords) != home.rank:
            raise BadParameter("coordinate length does not match lattice rank")
        object.__setattr__(self, "home", home)
        object.__setattr__(self, "coords", coords)

    @property
    def is_integral(self) -> bool:
        return all(isinstance(x, int) for x in self.coords)

    @property
    def is_zero(self) -> bool:
        return all(x == 0 for x in self.coords)

    def dot(self, other: "LatticeVector"):
        return pair(self, other)

    @property
    def norm(self):
        return pair(self, self)

    def __add__(self, other: "LatticeVector") -> "LatticeVector":
        if self.home != other.home:
            raise MixedLattices("vectors live in different lattices")
        return LatticeVector(self.home, [a + b for a, b in zip(self.coords, other.coords)])

    def __sub__(self, other: "LatticeVector") -> "LatticeVector":
        if self.home != other.home:
            raise MixedLattices("vectors live in different lattices")
        return LatticeVector(self.home, [a - b for a, b in zip(self.coords, other.coords)])

    def __neg__(self) -> "LatticeVector":
        return LatticeVector(self.home, [-a for a in self.coords])

    def __rmul__(self, c) -> "LatticeVector":
        c = _as_exact(c) if not isinstance(c, int) else c
        return LatticeVector(self.home, [c * a for a in self.coords])


def pair(v: LatticeVector, w: LatticeVector):
    """Bilinear pairing v^t G w through the home Gram matrix."""
    if v.home != w.home:
        raise MixedLattices("vectors live in different lattices")
    g = v.home.gram.data
    total = 0
    for i, a in enumerate(v.coords):
        if a:
            row = g[i]
            total += a * sum(row[j] * b for j, b in enumerate(w.coords) if b)
    return _as_exact(Fraction(total)) if isinstance(total, Fraction) else total


def divisibility(v: LatticeVector) -> int:
    """Positive generator of the pairing ideal (v, L)."""
    if not v.is_integral:
        raise BadParameter("divisibility requires an integral vector")
    if v.is_zero:
        raise ZeroVector("divisibility of the zero vector is undefined")
    pairings = v.home.gram.apply(v.coords)
    out = 0
    for x in pairings:
        out = gcd(out, int(x))
    return out


# ---------------------------------------------------------------------------
# standard lattices and sums


def make_standard(kind: str, n: int | None = None) -> Lattice:
    """Standard lattices: U, A(k), D(h), E(6|7|8), B(d), rank1(n)."""
    if kind == "U":
        return Lattice([[0, 1], [1, 0]], labels=("u", "v"))
    if kind == "A":
        if n is None or n < 1:
            raise BadParameter("A(k) requires k >= 1")
        return Lattice(_minus_cartan_chain(n))
    if kind == "D":
        if n is None or n < 4:
            raise BadParameter("D(h) requires h >= 4")
        g = _minus_cartan_chain(n)
        g[n - 1][n - 2] = g[n - 2][n - 1] = 0
        g[n - 1][n - 3] = g[n - 3][n - 1] = 1
        return Lattice(g)
    if kind == "E":
        if n not in (6, 7, 8):
            raise BadParameter("E(l) requires l in {6, 7, 8}")
        g = _minus_cartan_chain(n)
        g[n - 1][n - 2] = g[n - 2][n - 1] = 0
        g[n - 1][2] = g[2][n - 1] = 1
        return Lattice(g)
    if kind == "B":
        if n is None or n % 4 != 3 or n < 3:
            raise BadParameter("B(d) requires d = 3 mod 4")
        return Lattice([[-(n + 1) // 2, 1], [1, -2]], labels=("b1", "b2"))
    if kind == "rank1":
        if n is None or n == 0 or n % 2 != 0:
            raise BadParameter("rank1(n) requires a nonzero even integer")
        return Lattice([[n]])
    raise BadParameter(f"unknown standard lattice kind {kind!r}")


def _minus_cartan_chain(n: int):
    g = [[0] * n for _ in range(n)]
    for i in range(n):
        g[i][i] = -2
        if i + 1 < n:
            g[i][i + 1] = g[i + 1][i] = 1
    return g


def U() -> Lattice:
    return make_standard("U")


def A(k: int) -> Lattice:
    return make_standard("A", k)


def D(h: int) -> Lattice:
    return make_standard("D", h)


def E(l: int) -> Lattice:
    return make_standard("E", l)


def B(d: int) -> Lattice:
    return make_standard("B", d)


def rank1(n: int) -> Lattice:
    return make_standard("rank1", n)


def direct_sum(*parts: Lattice) -> Lattice:
    if not parts:
        raise BadParameter("empty direct sum")
    gram = IntMatrix.block_diagonal([p.gram for p in parts])
    labels = None
    if all(p.labels is not None for p in parts):
        cat = [lab for p in parts for lab in p.labels]
        if len(set(cat)) == len(cat):
            labels = tuple(cat)
    return Lattice(gram, labels)


def twist(L: Lattice, t: int) -> Lattice:
    return L.twist(t)


# ---------------------------------------------------------------------------
# sublattices, complements, rational splittings


class Sublattice:
    """A finite-rank sublattice of an ambient lattice, given by basis rows."""

    __slots__ = ("ambient", "basis_matrix", "lattice")

    def __init__(self, ambient: Lattice, basis_rows):
        if not isinstance(basis_rows, IntMatrix):
            basis_rows = IntMatrix(basis_rows)
        if basis_rows.cols != ambient.rank:
            raise BadParameter("basis rows must have ambient rank many columns")
        gram = basis_rows @ ambient.gram @ basis_rows.T
        rk = sum(1 for d in smith_normal_form(basis_rows).diag if d != 0)
        if rk != basis_rows.rows:
            raise DependentInput("sublattice basis is linearly dependent")
        if gram.det() == 0:
            raise DegenerateComplement("form restricted to sublattice is degenerate")
        object.__setattr__(self, "ambient", ambient)
        object.__setattr__(self, "basis_matrix", basis_rows)
        object.__setattr__(self, "lattice", Lattice(gram))

    def __setattr__(self, name, value):
        raise AttributeError("Sublattice is immutable")

    @property
    def rank(self) -> int:
        return self.basis_matrix.rows

    def basis(self):
        return [LatticeVector(self.ambient, row) for row in self.basis_matrix.data]

    def embed(self, coeffs) -> LatticeVector:
        """Ambient vector with the given coefficients on the sublattice basis."""
        n = self.ambient.rank
        out = [Fraction(0)] * n
        for c, row in zip(coeffs, self.basis_matrix.data):
            if c:
                for j in range(n):
                    out[j] += c * row[j]
        return LatticeVector(self.ambient, out)

    def coefficients_of(self, v: LatticeVector):
        """Coefficients on the sublattice basis, or None if v is outside the span."""
        if v.home != self.ambient:
            raise MixedLattices("vector lives in a different ambient lattice")
        sol = solve_rational(self.basis_matrix.T, v.coords)
        if sol is None:
            return None
        if self.embed(sol).coords != v.coords:
            return None
        return sol

    def is_primitive(self) -> bool:
        return all(d == 1 for d in smith_normal_form(self.basis_matrix).diag)


def span_sublattice(L: Lattice, vectors) -> Sublattice:
    rows = []
    for v in vectors:
        if v.home != L:
            raise MixedLattices("vector lives in a different lattice")
        if not v.is_integral:
            raise BadParameter("sublattice generators must be integral")
        rows.append(v.coords)
    return Sublattice(L, rows)


def orthogonal_complement(L: Lattice, vectors) -> Sublattice:
    """Primitive basis of the saturation of {x in L : (x, s) = 0 for s in S}.

    Raises DependentInput when S is dependent and DegenerateComplement
    when the restricted form degenerates (e.g. S contains an isotropic
    vector of U).
    """
    rows = []
    for v in vectors:
        if v.home != L:
            raise MixedLattices("vector lives in a different lattice")
        if not v.is_integral:
            raise BadParameter("complement generators must be integral")
        rows.append([int(x) for x in L.gram.apply(v.coords)])
    pairing = IntMatrix(rows)
    if sum(1 for d in smith_normal_form(pairing).diag if d != 0) != len(rows):
        raise DependentInput("input vectors are linearly dependent")
    return Sublattice(L, kernel_basis(pairing))


@dataclass(frozen=True)
class OrthogonalSplitting:
    """Primitive orthogonal pair M, N = M-perp inside an ambient lattice."""

    ambient: Lattice
    left: Sublattice
    right: Sublattice

    def __post_init__(self):
        if self.left.ambient != self.ambient or self.right.ambient != self.ambient:
            raise MixedLattices("summands live in a different ambient lattice")
        if self.left.rank + self.right.rank != self.ambient.rank:
            raise BadParameter("summands do not span the ambient lattice rationally")
        for u in self.left.basis():
            for w in self.right.basis():
                if pair(u, w) != 0:
                    raise BadParameter("summands are not orthogonal")
        if not self.left.is_primitive() or not self.right.is_primitive():
            raise BadParameter("summands must be primitive")


def splitting_from(L: Lattice, left_vectors) -> OrthogonalSplitting:
    """Splitting with M spanned (and saturated) by the given vectors."""
    right = orthogonal_complement(L, left_vectors)
    left = orthogonal_complement(L, right.basis())
    return OrthogonalSplitting(L, left, right)


def split_rational(split: OrthogonalSplitting, v: LatticeVector):
    """Exact decomposition v = v_M + v_N with v_M in M o Q, v_N in N o Q."""
    if v.home != split.ambient:
        raise MixedLattices("vector lives in a different lattice")
    n = split.ambient.rank
    cols = list(split.left.basis_matrix.data) + list(split.right.basis_matrix.data)
    coeff = solve_rational(IntMatrix(cols).T, v.coords)
    m_part = split.left.embed(coeff[: split.left.rank])
    n_part = split.right.embed(coeff[split.left.rank:])
    return m_part, n_part


def delta_prime_test(split: OrthogonalSplitting, delta: LatticeVector) -> bool:
    """True when both rational projections of delta have negative norm."""
    if not delta.is_integral:
        raise BadParameter("delta must be integral")
    d_m, d_n = split_rational(split, delta)
    if d_m.is_zero or d_n.is_zero:
        raise MemberOfSummand("delta lies in one of the summands")
    return d_m.norm < 0 and d_n.norm < 0


# ---------------------------------------------------------------------------
# isometries, reflections, spinor norms


@dataclass(frozen=True)
class Isometry:
    """Isometry of a lattice, acting on coordinate columns: v -> M v."""

    domain: Lattice
    matrix: IntMatrix

    def __post_init__(self):
        m = self.matrix
        if m.rows != m.cols or m.rows != self.domain.rank:
            raise NotIsometry("matrix shape does not match the lattice")
        if m.T @ self.domain.gram @ m != self.domain.gram:
            raise NotIsometry("matrix does not preserve the form")

    def __call__(self, v: LatticeVector) -> LatticeVector:
        if v.home != self.domain:
            raise MixedLattices("vector lives in a different lattice")
        return LatticeVector(self.domain, self.matrix.apply(v.coords))

    def compose(self, other: "Isometry") -> "Isometry":
        if other.domain != self.domain:
            raise MixedLattices("isometries of different lattices")
        return Isometry(self.domain, self.matrix @ other.matrix)

    @property
    def det(self) -> int:
        return self.matrix.det()

    @classmethod
    def identity(cls, L: Lattice) -> "Isometry":
        return cls(L, IntMatrix.identity(L.rank))

    @classmethod
    def minus_identity(cls, L: Lattice) -> "Isometry":
        return cls(L, -IntMatrix.identity(L.rank))


def reflection(L: Lattice, v: LatticeVector) -> Isometry:
    """Reflection in a vector of nonzero norm; must map L to itself."""
    if v.home != L:
        raise MixedLattices("vector lives in a different lattice")
    nv = v.norm
    if nv == 0:
        raise BadParameter("cannot reflect in an isotropic vector")
    n = L.rank
    cols = []
    for j in range(n):
        e = L.basis_vector(j)
        c = Fraction(2 * pair(e, v), nv)
        col = [Fraction(e.coords[i]) - c * v.coords[i] for i in range(n)]
        if any(x.denominator != 1 for x in map(Fraction, col)):
            raise NotIsometry("reflection does not preserve the lattice")
        cols.append([int(x) for x in col])
    return Isometry(L, IntMatrix(cols).T)


def _rat_apply(mat, vec):
    return tuple(sum(a * x for a, x in zip(row, vec)) for row in mat)


def _form_value(L, x, y):
    g = L.gram.data
    return sum(
        x[i] * g[i][j] * y[j] for i in range(len(x)) for j in range(len(y))
    )


def reflection_factorization(g: Isometry):
    """Cartan-Dieudonne factorization of g into reflections over Q.

    Returns rational ambient vectors v_1, ..., v_m (each of nonzero norm)
    with g = rho_{v_1} o ... o rho_{v_m}; the empty list for the identity.
    The isotropic pitfall (g(x) - x of norm zero) falls back to the
    standard two-reflection step via g(x) + x.
    """
    L = g.domain
    n = L.rank
    h = [[Fraction(x) for x in row] for row in g.matrix.data]
    basis = [tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n)]
    refs = []

    def reflect_matrix(v):
        nv = _form_value(L, v, v)
        cols = []
        for j in range(n):
            e = tuple(Fraction(int(i == j)) for i in range(n))
            c = Fraction(2 * _form_value(L, e, v), nv)
            cols.append([e[i] - c * v[i] for i in range(n)])
        # columns -> matrix rows
        return [[cols[j][i] for j in range(n)] for i in range(n)]

    def mat_mul(a, b):
        bt = list(zip(*b))
        return [[sum(x * y for x, y in zip(row, col)) for col in bt] for row in a]

    while basis:
        moved = None
        for x in basis:
            if _rat_apply(h, x) != x:
                moved = True
                break
        if not moved:
            break
        # pick an anisotropic x in the current invariant subspace
        x = next((b for b in basis if _form_value(L, b, b) != 0), None)
        if x is None:
            px = next(
                (b1, b2)
                for i, b1 in enumerate(basis)
                for b2 in basis[i + 1:]
                if _form_value(L, b1, b2) != 0
            )
            x = tuple(a + b for a, b in zip(*px))
        hx = _rat_apply(h, x)
        if hx != x:
            v = tuple(a - b for a, b in zip(hx, x))
            if _form_value(L, v, v) != 0:
                refs.append(v)
                h = mat_mul(reflect_matrix(v), h)
            else:
                w = tuple(a + b for a, b in zip(hx, x))
                # (g(x)+x)^2 = 4 x^2 != 0 whenever (g(x)-x)^2 = 0 and x^2 != 0
                refs.append(w)
                refs.append(x)
                h = mat_mul(reflect_matrix(x), mat_mul(reflect_matrix(w), h))
        # restrict to x-perp inside the current subspace
        vals = [_form_value(L, b, x) for b in basis]
        i0 = next(i for i, val in enumerate(vals) if val != 0)
        new_basis = []
        for i, b in enumerate(basis):
            if i == i0:
                continue
            f = Fraction(vals[i], 1) / vals[i0]
            new_basis.append(tuple(a - f * c for a, c in zip(b, basis[i0])))
        basis = new_basis
    return refs


def spinor_norm(g: Isometry) -> int:
    """Real spinor norm: product of signs of -v^2/2 over a reflection factorization."""
    sn = 1
    for v in reflection_factorization(g):
        if _form_value(g.domain, v, v) > 0:
            sn = -sn
    return sn


@dataclass(frozen=True)
class MembershipFlags:
    det: int
    spinor: int
    disc_action: str  # "id", "-id" or "other"
    in_o_plus: bool
    stable: bool
    in_o_tilde_plus: bool
    in_so_tilde_plus: bool
    in_o_hat_plus: bool
    in_so_hat_plus: bool


def _acts_as(g: Isometry, sign: int) -> bool:
    # g acts as sign*id on L*/L iff (g - sign*id) maps L* into L
    n = g.domain.rank
    ginv = rational_inverse(g.domain.gram)
    m = [
        [Fraction(g.matrix.data[i][j] - sign * int(i == j)) for j in range(n)]
        for i in range(n)
    ]
    for j in range(n):
        col = [sum(m[i][k] * ginv[k][j] for k in range(n)) for i in range(n)]
        if any(Fraction(x).denominator != 1 for x in col):
            return False
    return True


def group_membership(g: Isometry) -> MembershipFlags:
    """Spinor, determinant and discriminant-action flags for an isometry.

    O+ means real spinor norm +1; "stable" means the induced action on
    the discriminant group is the identity.  The hatted groups relax the
    action to minus the identity, with the determinant pairing of the
    special hatted group.
    """
    det = g.det
    sn = spinor_norm(g)
    if _acts_as(g, 1):
        action = "id"
    elif _acts_as(g, -1):
        action = "-id"
    else:
        action = "other"
    in_o_plus = sn == 1
    stable = action == "id"
    in_o_tilde = in_o_plus and stable
    return MembershipFlags(
        det=det,
        spinor=sn,
        disc_action=action,
        in_o_plus=in_o_plus,
        stable=stable,
        in_o_tilde_plus=in_o_tilde,
        in_so_tilde_plus=in_o_tilde and det == 1,
        in_o_hat_plus=in_o_plus and action in ("id", "-id"),
        in_so_hat_plus=in_o_plus
        and ((action == "id" and det == 1) or (action == "-id" and det == -1)),
    )


# ---------------------------------------------------------------------------
# rank-2 canonical forms (Gauss reduction)


def reduced_binary(gram: IntMatrix) -> IntMatrix:
    """Canonical Gauss-reduced representative of a definite binary form.

    Negative definite input is reduced through its positive definite
    flip, so two rank-2 definite lattices are isometric iff their
    reduced Grams are equal.
    """
    if gram.rows != 2 or not gram.is_symmetric():
        raise BadParameter("reduced_binary needs a symmetric 2x2 matrix")
    a, b, c = gram.data[0][0], gram.data[0][1], gram.data[1][1]
    if a == 0 or a * c - b * b <= 0:
        raise NotDefinite("binary form is not definite")
    neg = a < 0
    if neg:
        a, b, c = -a, -b, -c
    while True:
        if 2 * b > a or 2 * b <= -a:
            k = -((a - 2 * b) // (2 * a))
            c += k * k * a - 2 * k * b
            b -= k * a
            continue
        if a > c:
            a, c = c, a
            b = -b
            continue
        break
    if (a == c or 2 * b == a) and b < 0:
        b = -b
    if neg:
        a, b, c = -a, -b, -c
    return IntMatrix([[a, b], [b, c]])


def rank2_isometric(L1: Lattice, L2: Lattice) -> bool:
    """Isometry test for definite rank-2 lattices via Gauss reduction."""
    return reduced_binary(L1.gram) == reduced_binary(L2.gram)


# ---------------------------------------------------------------------------
# names and JSON


_TERM_RE = re.compile(
    r"^(?P<count>\d+)?(?P<atom>U|A\d+|D\d+|E[678]|B\d+|<-?\d+>)(?:\((?P<twist>\d+)\))?$"
)


def parse_name(name: str) -> Lattice:
    """Parse lattice names like "U+U+E8+E8+<-2>+<-6>", "2E8+2A1" or "U(2)"."""
    parts = []
    for term in name.replace(" ", "").split("+"):
        if not term:
            raise BadParameter(f"empty term in lattice name {name!r}")
        m = _TERM_RE.match(term)
        if not m:
            raise BadParameter(f"cannot parse lattice term {term!r}")
        count = int(m.group("count") or 1)
        atom = m.group("atom")
        if atom == "U":
            base = U()
        elif atom.startswith("<"):
            base = rank1(int(atom[1:-1]))
        else:
            base = make_standard(atom[0], int(atom[1:]))
        if m.group("twist"):
            base = base.twist(int(m.group("twist")))
        parts.extend([base] * count)
    return direct_sum(*parts)


def lattice_to_json(L: Lattice) -> str:
    obj = {"rank": L.rank, "gram": L.gram.to_lists()}
    if L.labels is not None:
        obj["labels"] = list(L.labels)
    return json.dumps(obj, sort_keys=True)


def lattice_from_json(text: str) -> Lattice:
    obj = json.loads(text)
    gram = obj["gram"]
    if len(gram) != obj.get("rank", len(gram)):
        raise BadParameter("rank does not match gram size")
    return Lattice(gram, labels=obj.get("labels"))


def load_lattice(spec: str) -> Lattice:
    """Accept a builtin name, a JSON string, or a path to a JSON file."""
    s = spec.strip()
    if s.startswith("{"):
        return lattice_from_json(s)
    try:
        return parse_name(s)
    except BadParameter:
        with open(s, "r", encoding="utf-8") as fh:
            return lattice_from_json(fh.read())
