"""Finite quadratic forms (discriminant forms of even lattices).

A form lives on a finite abelian group in invariant-factor shape
Z/d1 + ... + Z/dr (d1 | d2 | ...), with q taking values in Q/2Z and the
associated bilinear form b in Q/Z.  Elements are plain coefficient
tuples reduced modulo the invariant factors; all values are exact
Fractions with canonical representatives (q in [0,2), b in [0,1)).

Forms built from a lattice keep enough provenance to map rational dual
vectors to classes and back; forms built as perp-quotients H^perp/H keep
the transform data needed to project classes of the parent group.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from math import gcd, lcm, prod

from .errors import GroupTooLarge, NotIsotropic, OddLattice
from .exact import (
    IntMatrix,
    hnf_rows,
    kernel_basis,
    rational_inverse,
    smith_normal_form,
)

ENUM_BOUND = 10**6


def _mod2(x) -> Fraction:
    return Fraction(x) % 2


def _mod1(x) -> Fraction:
    return Fraction(x) % 1


class FiniteQuadraticForm:
    """Finite abelian group with a Q/2Z-valued quadratic form."""

    __slots__ = ("orders", "qdiag", "bmat", "source")

    def __init__(self, orders, qdiag, bmat, source=None):
        orders = tuple(int(d) for d in orders)
        if any(d < 2 for d in orders):
            raise ValueError("invariant factors must be >= 2")
        if any(orders[i + 1] % orders[i] for i in range(len(orders) - 1)):
            raise ValueError("orders must form a divisibility chain")
        r = len(orders)
        qdiag = tuple(_mod2(x) for x in qdiag)
        if len(qdiag) != r:
            raise ValueError("one q value per generator required")
        full = [[Fraction(0)] * r for _ in range(r)]
        for i in range(r):
            full[i][i] = _mod1(qdiag[i])
            for j in range(r):
                if i != j:
                    full[i][j] = _mod1(bmat[i][j])
        for i in range(r):
            for j in range(r):
                if full[i][j] != full[j][i]:
                    raise ValueError("bilinear matrix must be symmetric")
                if _mod1(orders[i] * full[i][j]) != 0:
                    raise ValueError("bilinear value incompatible with orders")
        for i in range(r):
            if _mod2(orders[i] * orders[i] * qdiag[i]) != 0 or _mod1(orders[i] * qdiag[i]) != 0:
                raise ValueError("q value incompatible with generator order")
        object.__setattr__(self, "orders", orders)
        object.__setattr__(self, "qdiag", qdiag)
        object.__setattr__(self, "bmat", tuple(tuple(row) for row in full))
        object.__setattr__(self, "source", source)

    def __setattr__(self, name, value):
        raise AttributeError("FiniteQuadraticForm is immutable")

    # group structure -------------------------------------------------

    @property
    def rank(self) -> int:
        return len(self.orders)

    @property
    def cardinality(self) -> int:
        return prod(self.orders)

    @property
    def zero(self) -> tuple:
        return (0,) * self.rank

    def reduce(self, x) -> tuple:
        return tuple(int(a) % d for a, d in zip(x, self.orders))

    def add(self, x, y) -> tuple:
        return tuple((a + b) % d for a, b, d in zip(x, y, self.orders))

    def neg(self, x) -> tuple:
        return tuple((-a) % d for a, d in zip(x, self.orders))

    def smul(self, n: int, x) -> tuple:
        return tuple((n * a) % d for a, d in zip(x, self.orders))

    def order_of(self, x) -> int:
        out = 1
        for a, d in zip(x, self.orders):
            out = lcm(out, d // gcd(d, a))
        return out

    def elements(self, bound: int = ENUM_BOUND):
        if self.cardinality > bound:
            raise GroupTooLarge(
                f"group of order {self.cardinality} exceeds enumeration bound {bound}"
            )
        return product(*[range(d) for d in self.orders])

    # form values ------------------------------------------------------

    def q(self, x) -> Fraction:
        x = self.reduce(x)
        total = Fraction(0)
        for i, a in enumerate(x):
            if a:
                total += a * a * self.qdiag[i]
                for j in range(i + 1, len(x)):
                    if x[j]:
                        total += 2 * a * x[j] * self.bmat[i][j]
        return _mod2(total)

    def b(self, x, y) -> Fraction:
        x = self.reduce(x)
        y = self.reduce(y)
        total = Fraction(0)
        for i, a in enumerate(x):
            if a:
                for j, c in enumerate(y):
                    if c:
                        total += a * c * self.bmat[i][j]
        return _mod1(total)

    def is_isotropic(self, x) -> bool:
        return self.q(x) == 0

    # equality is structural: same presentation, not mere isometry
    def __eq__(self, other):
        return (
            isinstance(other, FiniteQuadraticForm)
            and self.orders == other.orders
            and self.qdiag == other.qdiag
            and self.bmat == other.bmat
        )

    def __hash__(self):
        return hash((self.orders, self.qdiag, self.bmat))

    def __repr__(self):
        qs = ", ".join(str(x) for x in self.qdiag)
        return f"FiniteQuadraticForm(orders={list(self.orders)}, q=[{qs}])"

    # lattice provenance ----------------------------------------------

    def lift(self, x):
        """Rational dual-vector representative in the source lattice, if any."""
        src = self.source
        if src is None or src[0] != "lattice":
            raise ValueError("form has no lattice provenance")
        lifts = src[2]
        n = len(lifts[0]) if lifts else src[1].rank
        out = [Fraction(0)] * n
        for a, vec in zip(self.reduce(x), lifts):
            if a:
                for i in range(n):
                    out[i] += a * vec[i]
        return tuple(out)

    def class_of(self, coords) -> tuple:
        """Class in this form of a rational vector lying in the dual lattice."""
        src = self.source
        if src is None or src[0] != "lattice":
            raise ValueError("form has no lattice provenance")
        lattice = src[1]
        umat = src[3]
        kept = src[4]
        pairings = lattice.gram.apply(coords)
        ints = []
        for x in pairings:
            f = Fraction(x)
            if f.denominator != 1:
                raise ValueError("vector is not in the dual lattice")
            ints.append(int(f))
        y = umat.apply(ints)
        full_orders = src[5]
        return tuple(y[i] % full_orders[i] for i in kept)


def discriminant_form(lattice) -> FiniteQuadraticForm:
    """Discriminant form A_L = L*/L of an even lattice, with provenance."""
    if not lattice.even:
        raise OddLattice("discriminant form requires an even lattice")
    gram = lattice.gram
    n = gram.rows
    snf = smith_normal_form(gram)
    ginv = rational_inverse(gram)
    uinv_rat = rational_inverse(snf.left)
    uinv = [[int(x) for x in row] for row in uinv_rat]
    kept = [i for i, d in enumerate(snf.diag) if d > 1]
    lifts = []
    for i in kept:
        vec = tuple(
            sum(ginv[r][k] * uinv[k][i] for k in range(n)) for r in range(n)
        )
        lifts.append(vec)

    def form_value(x, y):
        g = gram.data
        return sum(x[i] * g[i][j] * y[j] for i in range(n) for j in range(n))

    orders = tuple(snf.diag[i] for i in kept)
    qdiag = [_mod2(form_value(v, v)) for v in lifts]
    r = len(kept)
    bmat = [[Fraction(0)] * r for _ in range(r)]
    for i in range(r):
        for j in range(r):
            bmat[i][j] = _mod1(form_value(lifts[i], lifts[j]))
    source = ("lattice", lattice, tuple(lifts), snf.left, tuple(kept), snf.diag)
    return FiniteQuadraticForm(orders, qdiag, bmat, source=source)


def trivial_form() -> FiniteQuadraticForm:
    return FiniteQuadraticForm((), (), ())


def direct_sum_form(*forms: FiniteQuadraticForm) -> FiniteQuadraticForm:
    """Orthogonal direct sum, renormalized to invariant-factor shape."""
    gens = []
    for f_idx, f in enumerate(forms):
        for i in range(f.rank):
            gens.append((f_idx, i))
    orders = [forms[f].orders[i] for f, i in gens]
    m = len(gens)

    def qval(i):
        f, gi = gens[i]
        return forms[f].qdiag[gi]

    def bval(i, j):
        fi, gi = gens[i]
        fj, gj = gens[j]
        if fi != fj:
            return Fraction(0)
        return forms[fi].bmat[gi][gj]

    if m == 0:
        return trivial_form()
    quotient = _row_quotient(
        IntMatrix.identity(m), IntMatrix.diagonal(orders)
    )
    kept = [i for i, d in enumerate(quotient.orders) if d > 1]
    new_orders = [quotient.orders[i] for i in kept]
    gen_rows = [quotient.generator_rows.data[i] for i in kept]

    def q_of_row(row):
        total = Fraction(0)
        for i, a in enumerate(row):
            if a:
                total += a * a * qval(i)
                for j in range(i + 1, m):
                    if row[j]:
                        total += 2 * a * row[j] * bval(i, j)
        return total

    def b_of_rows(r1, r2):
        total = Fraction(0)
        for i, a in enumerate(r1):
            if a:
                for j, c in enumerate(r2):
                    if c:
                        total += a * c * bval(i, j)
        return total

    qd = [q_of_row(row) for row in gen_rows]
    bm = [[b_of_rows(r1, r2) for r2 in gen_rows] for r1 in gen_rows]
    return FiniteQuadraticForm(new_orders, qd, bm)


# ---------------------------------------------------------------------------
# row-lattice quotients (shared by direct sums and perp quotients)


@dataclass(frozen=True)
class _RowQuotient:
    ambient_rows: IntMatrix  # P: basis of the ambient row lattice
    vmat: IntMatrix
    generator_rows: IntMatrix  # V^{-1} @ P, one row per invariant factor
    orders: tuple
    _pinv: tuple  # rational inverse of P, rows of Fractions

    def class_coords(self, row) -> tuple:
        """Coordinates of an ambient-lattice row modulo the sublattice."""
        y = [
            sum(Fraction(row[k]) * self._pinv[k][j] for k in range(len(row)))
            for j in range(len(row))
        ]
        if any(x.denominator != 1 for x in y):
            raise ValueError("row is not in the ambient row lattice")
        y = [int(x) for x in y]
        z = self.vmat.T.apply(y)  # row-vector times V
        return tuple(int(a) % d for a, d in zip(z, self.orders))


def _row_quotient(P: IntMatrix, sub_rows: IntMatrix) -> _RowQuotient:
    """Quotient of the row lattice of P by the row lattice of sub_rows."""
    pinv = rational_inverse(P)
    n = P.rows
    srows = []
    for row in sub_rows.data:
        y = [sum(Fraction(row[k]) * pinv[k][j] for k in range(n)) for j in range(n)]
        if any(x.denominator != 1 for x in y):
            raise ValueError("sublattice is not contained in the ambient lattice")
        srows.append([int(x) for x in y])
    s = IntMatrix(hnf_rows(srows))
    if s.rows != n:
        raise ValueError("sublattice must have finite index")
    snf = smith_normal_form(s)
    vinv = IntMatrix([[int(x) for x in row] for row in rational_inverse(snf.right)])
    gen_rows = vinv @ P
    return _RowQuotient(P, snf.right, gen_rows, snf.diag, tuple(tuple(r) for r in pinv))


# ---------------------------------------------------------------------------
# subgroups


@dataclass(frozen=True)
class FqfSubgroup:
    form: FiniteQuadraticForm
    elements: tuple  # sorted element tuples, closed under addition
    generators: tuple

    @property
    def order(self) -> int:
        return len(self.elements)

    def contains(self, x) -> bool:
        return self.form.reduce(x) in set(self.elements)


def subgroup_span(form: FiniteQuadraticForm, gens) -> FqfSubgroup:
    gens = [form.reduce(g) for g in gens]
    elems = {form.zero}
    frontier = [form.zero]
    while frontier:
        cur = frontier.pop()
        for g in gens:
            nxt = form.add(cur, g)
            if nxt not in elems:
                elems.add(nxt)
                frontier.append(nxt)
    canonical = _minimal_generators(form, sorted(elems))
    return FqfSubgroup(form, tuple(sorted(elems)), tuple(canonical))


def _minimal_generators(form, sorted_elems):
    target = set(sorted_elems)
    span = {form.zero}
    gens = []
    for e in sorted_elems:
        if e in span:
            continue
        gens.append(e)
        grow = [e]
        while grow:
            cur = grow.pop()
            for s in list(span):
                nxt = form.add(cur, s)
                if nxt not in span:
                    span.add(nxt)
                    grow.append(nxt)
        if span == target:
            break
    return gens


def trivial_subgroup(form: FiniteQuadraticForm) -> FqfSubgroup:
    return FqfSubgroup(form, (form.zero,), ())


# ---------------------------------------------------------------------------
# isotropic enumeration


def isotropic_elements(form: FiniteQuadraticForm, bound: int = ENUM_BOUND) -> list:
    """All x with q(x) = 0 in Q/2Z, by exhaustive scan (includes 0)."""
    return [x for x in form.elements(bound) if form.q(x) == 0]


def mod_pm1(form: FiniteQuadraticForm, elems) -> list:
    """One representative per {x, -x} orbit, the lexicographically smaller."""
    reps = []
    seen = set()
    for x in elems:
        x = form.reduce(x)
        if x in seen:
            continue
        mx = form.neg(x)
        seen.add(x)
        seen.add(mx)
        reps.append(min(x, mx))
    return sorted(reps)


def isotropic_subgroups(form: FiniteQuadraticForm, bound: int = ENUM_BOUND) -> list:
    """All subgroups on which q vanishes identically, smallest first."""
    iso = isotropic_elements(form, bound)
    iso_set = set(iso)
    trivial = trivial_subgroup(form)
    found = {trivial.elements: trivial}
    frontier = [trivial]
    while frontier:
        nxt = []
        for sub in frontier:
            have = set(sub.elements)
            for e in iso:
                if e in have:
                    continue
                bigger = subgroup_span(form, list(sub.generators) + [e])
                if bigger.elements in found:
                    continue
                if all(x in iso_set for x in bigger.elements):
                    found[bigger.elements] = bigger
                    nxt.append(bigger)
        frontier = nxt
    return sorted(found.values(), key=lambda s: (s.order, s.elements))


def perp_quotient(
    form: FiniteQuadraticForm, subgroup: FqfSubgroup, bound: int = ENUM_BOUND
) -> FiniteQuadraticForm:
    """H^perp/H with the induced form; requires H isotropic.

    H^perp = {x : b(x, h) = 0 for all h in H}; the result order is
    |A| / |H|^2 and the induced q is well defined because q vanishes
    on H.
    """
    if subgroup.form != form:
        raise ValueError("subgroup belongs to a different form")
    if any(form.q(x) != 0 for x in subgroup.elements):
        raise NotIsotropic("subgroup is not isotropic")
    n = form.rank
    if n == 0:
        return trivial_form()

    # integer model: P = preimage in Z^n of H^perp, PH = preimage of H
    constraints = []
    for h in subgroup.generators:
        row = [form.b(_unit(n, i), h) for i in range(n)]
        den = lcm(*[f.denominator for f in row]) if row else 1
        constraints.append(([int(f * den) for f in row], den))
    if constraints:
        m = len(constraints)
        aug = []
        for j, (crow, den) in enumerate(constraints):
            aug.append(crow + [den if k == j else 0 for k in range(m)])
        ker = kernel_basis(IntMatrix(aug))
        proj = [list(r[:n]) for r in ker.data]
    else:
        proj = [list(r) for r in IntMatrix.identity(n).data]
    p_rows = hnf_rows(proj + IntMatrix.diagonal(form.orders).to_lists())
    ph_rows = hnf_rows(
        [list(g) for g in subgroup.generators]
        + IntMatrix.diagonal(form.orders).to_lists()
    )
    rq = _row_quotient(IntMatrix(p_rows), IntMatrix(ph_rows))
    kept = [i for i, d in enumerate(rq.orders) if d > 1]
    orders = [rq.orders[i] for i in kept]
    gen_elems = [form.reduce(rq.generator_rows.data[i]) for i in kept]
    expected = form.cardinality // (subgroup.order ** 2)
    if prod(orders) != expected:
        raise AssertionError("perp quotient order mismatch")
    qd = [form.q(x) for x in gen_elems]
    bm = [[form.b(x, y) for y in gen_elems] for x in gen_elems]
    source = ("quotient", form, subgroup, rq, tuple(kept))
    return FiniteQuadraticForm(orders, qd, bm, source=source)


def project_to_quotient(quotient: FiniteQuadraticForm, x) -> tuple:
    """Class in H^perp/H of an element x of H^perp in the parent form."""
    src = quotient.source
    if src is None or src[0] != "quotient":
        raise ValueError("form is not a perp quotient")
    _, parent, subgroup, rq, kept = src
    coords = rq.class_coords(list(parent.reduce(x)))
    return tuple(coords[i] for i in kept)


def _unit(n, i):
    return tuple(int(j == i) for j in range(n))


# ---------------------------------------------------------------------------
# isometries between forms, orthogonal groups, embeddings


def _signature_buckets(form: FiniteQuadraticForm, bound: int):
    buckets = {}
    for x in form.elements(bound):
        key = (form.order_of(x), form.q(x))
        buckets.setdefault(key, []).append(x)
    return buckets


def _span_size(form: FiniteQuadraticForm, gens, orders) -> int:
    span = {form.zero}
    for g, d in zip(gens, orders):
        layer = list(span)
        cur = form.zero
        for _ in range(1, d):
            cur = form.add(cur, g)
            for s in layer:
                span.add(form.add(cur, s))
    return len(span)


def _hom_search(a: FiniteQuadraticForm, b: FiniteQuadraticForm, need_size: int,
                bound: int, find_all: bool):
    """Backtracking search for q- and b-preserving maps generator-wise.

    Generator images must match exact order and q value; the candidate
    is accepted when the generated subgroup has ``need_size`` elements.
    """
    buckets = _signature_buckets(b, bound)
    gens = [_unit(a.rank, i) for i in range(a.rank)]
    results = []

    def extend(i, images):
        if i == a.rank:
            if _span_size(b, images, a.orders) == need_size:
                results.append(tuple(images))
                return not find_all
            return False
        key = (a.orders[i], a.qdiag[i])
        for y in buckets.get(key, ()):
            ok = True
            for j in range(i):
                if b.b(images[j], y) != a.bmat[j][i]:
                    ok = False
                    break
            if ok:
                images.append(y)
                if extend(i + 1, images):
                    return True
                images.pop()
        return False

    extend(0, [])
    return results


def are_isometric(
    a: FiniteQuadraticForm, b: FiniteQuadraticForm, bound: int = ENUM_BOUND
):
    """Isometry test; returns (flag, witness images of a's generators)."""
    if a.cardinality != b.cardinality or sorted(a.orders) != sorted(b.orders):
        return False, None
    if a.cardinality > bound:
        raise GroupTooLarge("form too large for isometry search")
    res = _hom_search(a, b, b.cardinality, bound, find_all=False)
    if res:
        return True, res[0]
    return False, None


def orthogonal_group(form: FiniteQuadraticForm, bound: int = ENUM_BOUND) -> list:
    """All q-preserving automorphisms, as tuples of generator images."""
    if form.cardinality > bound:
        raise GroupTooLarge("form too large for automorphism enumeration")
    return sorted(_hom_search(form, form, form.cardinality, bound, find_all=True))


def embeds(
    a: FiniteQuadraticForm, b: FiniteQuadraticForm, bound: int = ENUM_BOUND
) -> bool:
    """True when an injective q-preserving homomorphism a -> b exists."""
    if a.cardinality > b.cardinality:
        return False
    if b.cardinality > bound:
        raise GroupTooLarge("target form too large for embedding search")
    return bool(_hom_search(a, b, a.cardinality, bound, find_all=False))


def apply_map(form: FiniteQuadraticForm, images, x) -> tuple:
    """Evaluate a generator-image map at an arbitrary element."""
    out = form.zero
    for a, img in zip(form.reduce(x), images):
        if a:
            out = form.add(out, form.smul(a, img))
    return out


def compose_maps(form: FiniteQuadraticForm, f, g) -> tuple:
    """Composition f o g of two generator-image maps on the same form."""
    return tuple(apply_map(form, f, img) for img in g)


def identity_map(form: FiniteQuadraticForm) -> tuple:
    return tuple(_unit(form.rank, i) for i in range(form.rank))


# ---------------------------------------------------------------------------
# JSON


def _sym_q(x: Fraction) -> Fraction:
    r = _mod2(x)
    return r - 2 if r > 1 else r


def _sym_b(x: Fraction) -> Fraction:
    r = _mod1(x)
    return r - 1 if r > Fraction(1, 2) else r


def form_to_json(form: FiniteQuadraticForm) -> str:
    obj = {
        "orders": list(form.orders),
        "q": [str(_sym_q(x)) for x in form.qdiag],
        "b": [[str(_sym_b(x)) for x in row] for row in form.bmat],
    }
    return json.dumps(obj, sort_keys=True)


def form_from_json(text: str) -> FiniteQuadraticForm:
    obj = json.loads(text)
    orders = obj["orders"]
    qd = [Fraction(s) for s in obj["q"]]
    bm = [[Fraction(s) for s in row] for row in obj["b"]]
    return FiniteQuadraticForm(orders, qd, bm)
