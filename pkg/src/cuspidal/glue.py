"""Even overlattices from isotropic glue, roots, and ADE classification.

An isotropic subgroup H of the discriminant form of an even lattice R
determines the even overlattice L_H, the preimage of H in R*; its
discriminant form is H^perp/H (Brieskorn) and det L_H = det R / |H|^2.

Root enumeration uses exact Fincke-Pohst: LLL preconditioning, then a
depth-first search with rational quadratic-completion bounds.  Norm -2
vectors of a negative definite lattice always form an ADE root system;
components are classified by the shape of their simple-root graph.

The image of O(E) in O(A_E) is generated, for overlattices with full
root rank, by diagram automorphisms, permutations of isomorphic
components and sign flips of declared non-root rank-1 summands, all
restricted to the glue stabilizer; Weyl reflections act trivially on the
discriminant form and are omitted.  Whether this generated subgroup
always equals the full image of tau is recorded as an assumption, so
dependent counts are reported as conditional.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from math import isqrt, lcm

from .errors import (
    BadParameter,
    NonIntegralGlue,
    NotIsotropic,
    NotNegativeDefinite,
    RootsNotFullRank,
)
from .exact import IntMatrix, hnf_rows, lll_reduce
from .fqf import (
    FiniteQuadraticForm,
    apply_map,
    compose_maps,
    discriminant_form,
    identity_map,
    perp_quotient,
    project_to_quotient,
    subgroup_span,
    trivial_subgroup,
)
from .lattice import Isometry, Lattice, LatticeVector, direct_sum, make_standard


# ---------------------------------------------------------------------------
# root-spec strings and glue data


@dataclass(frozen=True)
class Component:
    kind: str  # "A", "D", "E" or "unit"
    param: int  # ADE rank, or the norm of a rank-1 summand
    offset: int

    @property
    def rank(self) -> int:
        return 1 if self.kind == "unit" else self.param


_SPEC_TERM = re.compile(r"^(?P<count>\d+)?(?P<atom>A\d+|D\d+|E[678]|<-?\d+>)$")


def parse_root_spec(spec: str) -> list:
    """Expand strings like "2E8+2A1" or "E6+A11+<-4>" into (kind, param) pairs."""
    out = []
    for term in spec.replace(" ", "").split("+"):
        m = _SPEC_TERM.match(term)
        if not m:
            raise BadParameter(f"cannot parse root-system term {term!r}")
        count = int(m.group("count") or 1)
        atom = m.group("atom")
        if atom.startswith("<"):
            out.extend([("unit", int(atom[1:-1]))] * count)
        else:
            out.extend([(atom[0], int(atom[1:]))] * count)
    return out


def root_sum_base(spec: str):
    """Lattice and component layout for a root-spec string."""
    parts = parse_root_spec(spec)
    lattices = []
    comps = []
    offset = 0
    for kind, param in parts:
        lat = (
            make_standard("rank1", param)
            if kind == "unit"
            else make_standard(kind, param)
        )
        comps.append(Component(kind, param, offset))
        offset += lat.rank
        lattices.append(lat)
    return direct_sum(*lattices), tuple(comps)


@dataclass(frozen=True)
class GlueData:
    base: Lattice
    components: tuple
    disc: FiniteQuadraticForm
    glue: FqfSubgroup

    def __post_init__(self):
        if self.glue.form != self.disc:
            raise BadParameter("glue subgroup does not live in the base discriminant")
        if any(self.disc.q(x) != 0 for x in self.glue.elements):
            raise NotIsotropic("glue subgroup is not isotropic")


def make_glue(spec: str, glue_gens=()) -> GlueData:
    base, comps = root_sum_base(spec)
    disc = discriminant_form(base)
    sub = (
        subgroup_span(disc, glue_gens) if glue_gens else trivial_subgroup(disc)
    )
    return GlueData(base, comps, disc, sub)


# ---------------------------------------------------------------------------
# overlattices


@dataclass(frozen=True)
class Overlattice:
    glue: GlueData
    lattice: Lattice
    basis_in_base: tuple  # rows of Fractions: overlattice basis in R coords
    base_in_overlattice: IntMatrix  # rows: R basis in overlattice coords


def overlattice(gd: GlueData) -> Overlattice:
    """Even overlattice determined by the glue: preimage of H in R*."""
    base = gd.base
    n = base.rank
    rows = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    for g in gd.glue.generators:
        rows.append(list(gd.disc.lift(g)))
    den = 1
    for row in rows:
        for x in row:
            den = lcm(den, Fraction(x).denominator)
    int_rows = [[int(x * den) for x in row] for row in rows]
    basis = hnf_rows(int_rows)
    if len(basis) != n:
        raise NonIntegralGlue("glue lifts do not span a finite-index overlattice")
    brows = [[Fraction(x, den) for x in row] for row in basis]
    gram = [
        [
            sum(
                brows[i][a] * base.gram.data[a][b] * brows[j][b]
                for a in range(n)
                for b in range(n)
            )
            for j in range(n)
        ]
        for i in range(n)
    ]
    for i in range(n):
        for j in range(n):
            if gram[i][j].denominator != 1:
                raise NonIntegralGlue("glue produces non-integral pairings")
        if int(gram[i][i]) % 2:
            raise NotIsotropic("glue produces an odd overlattice")
    over = Lattice([[int(x) for x in row] for row in gram])
    # base basis in overlattice coordinates: e_i = (row i of B^-1) . B
    bmat_inv = _rat_inv(brows)
    incl = []
    for i in range(n):
        row = bmat_inv[i]
        if any(x.denominator != 1 for x in row):
            raise NonIntegralGlue("base does not embed integrally")
        incl.append([int(x) for x in row])
    return Overlattice(gd, over, tuple(tuple(r) for r in brows), IntMatrix(incl))


def _rat_inv(rows):
    n = len(rows)
    M = [
        [Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
        for i, row in enumerate(rows)
    ]
    for c in range(n):
        p = next(i for i in range(c, n) if M[i][c] != 0)
        M[c], M[p] = M[p], M[c]
        pv = M[c][c]
        M[c] = [x / pv for x in M[c]]
        for i in range(n):
            if i != c and M[i][c] != 0:
                f = M[i][c]
                M[i] = [x - f * y for x, y in zip(M[i], M[c])]
    return [row[n:] for row in M]


# ---------------------------------------------------------------------------
# short vectors (exact Fincke-Pohst)


def _floor_add_sqrt(f: Fraction, r: Fraction) -> int:
    """floor(f + sqrt(r)) with exact arithmetic, r >= 0."""
    sf = isqrt(r.numerator * r.denominator) // r.denominator
    k = (f.numerator // f.denominator) + sf
    while True:
        t = (k + 1) - f
        if t <= 0 or t * t <= r:
            k += 1
        else:
            return k


def short_vectors(L: Lattice, norm: int) -> list:
    """All vectors of the given negative norm, one per {v, -v} pair.

    The representative kept has positive first nonzero coordinate in the
    LLL-reduced basis; results are sorted by original coordinates.
    """
    n = L.rank
    if L.signature != (0, n):
        raise NotNegativeDefinite("short vector enumeration needs a negative definite lattice")
    if norm >= 0:
        raise BadParameter("norm must be negative")
    if norm % 2 and L.even:
        return []
    red, T = lll_reduce(L.gram)
    target = Fraction(-norm)
    # quadratic completion of the positive definite flip of red
    M = [[Fraction(-red.data[i][j]) for j in range(n)] for i in range(n)]
    d = [Fraction(0)] * n
    mcoef = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        d[i] = M[i][i]
        row_i = list(M[i])
        for j in range(i + 1, n):
            mcoef[i][j] = row_i[j] / d[i]
        for k in range(i + 1, n):
            for l in range(k, n):
                M[k][l] -= row_i[k] * row_i[l] / d[i]
                M[l][k] = M[k][l]

    sols = []
    x = [0] * n

    def dfs(i: int, rem: Fraction):
        if i < 0:
            if rem == 0:
                sols.append(tuple(x))
            return
        c = sum(mcoef[i][j] * x[j] for j in range(i + 1, n))
        bound = rem / d[i]
        hi = _floor_add_sqrt(-c, bound)
        lo = -_floor_add_sqrt(c, bound)
        for xi in range(lo, hi + 1):
            x[i] = xi
            t = xi + c
            rem2 = rem - d[i] * t * t
            if rem2 >= 0:
                dfs(i - 1, rem2)
        x[i] = 0

    dfs(n - 1, target)
    out = []
    seen = set()
    for s in sols:
        if all(v == 0 for v in s):
            continue
        lead = next(v for v in s if v != 0)
        rep = s if lead > 0 else tuple(-v for v in s)
        if rep in seen:
            continue
        seen.add(rep)
        out.append(tuple(int(v) for v in T.apply(rep)))
    out.sort()
    return [LatticeVector(L, coords) for coords in out]


# ---------------------------------------------------------------------------
# root systems


_ROOT_COUNTS = {"A": lambda k: k * (k + 1), "D": lambda h: 2 * h * (h - 1),
                "E": lambda l: {6: 72, 7: 126, 8: 240}[l]}


@dataclass(frozen=True)
class RootSystem:
    components: tuple  # sorted tuple of (letter, rank)
    total_roots: int

    def spec_string(self) -> str:
        if not self.components:
            return "0"
        groups = []
        order = {"E": 0, "D": 1, "A": 2}
        for letter, rank in sorted(
            self.components, key=lambda c: (order[c[0]], -c[1])
        ):
            groups.append((letter, rank))
        parts = []
        i = 0
        while i < len(groups):
            j = i
            while j < len(groups) and groups[j] == groups[i]:
                j += 1
            count = j - i
            atom = f"{groups[i][0]}{groups[i][1]}"
            parts.append(atom if count == 1 else f"{count}{atom}")
            i = j
        return "+".join(parts)


def root_system_from_spec(spec: str) -> RootSystem:
    comps = []
    total = 0
    for kind, param in parse_root_spec(spec):
        if kind == "unit":
            continue
        comps.append((kind, param))
        total += _ROOT_COUNTS[kind](param)
    return RootSystem(tuple(sorted(comps)), total)


def root_system(L: Lattice) -> RootSystem:
    """ADE decomposition of the norm -2 vectors of a negative definite lattice."""
    pos = [v.coords for v in short_vectors(L, -2)]
    if not pos:
        return RootSystem((), 0)
    pos_set = set(pos)

    def vsub(a, b):
        return tuple(x - y for x, y in zip(a, b))

    simple = []
    for a in pos:
        decomposable = any(b != a and vsub(a, b) in pos_set for b in pos)
        if not decomposable:
            simple.append(a)

    g = L.gram
    def pairing(a, b):
        return sum(a[i] * g.data[i][j] * b[j] for i in range(L.rank) for j in range(L.rank))

    m = len(simple)
    adj = {i: [] for i in range(m)}
    for i in range(m):
        for j in range(i + 1, m):
            if pairing(simple[i], simple[j]) != 0:
                adj[i].append(j)
                adj[j].append(i)

    seen = set()
    comps = []
    for start in range(m):
        if start in seen:
            continue
        stack = [start]
        nodes = []
        seen.add(start)
        while stack:
            v = stack.pop()
            nodes.append(v)
            for w in adj[v]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        comps.append(sorted(nodes))

    out = []
    for nodes in comps:
        out.append(_classify_component(nodes, adj))
    total = sum(_ROOT_COUNTS[letter](rank) for letter, rank in out)
    if total != 2 * len(pos):
        raise AssertionError("root component counts do not match the enumeration")
    return RootSystem(tuple(sorted(out)), total)


def _classify_component(nodes, adj) -> tuple:
    n = len(nodes)
    node_set = set(nodes)
    deg = {v: sum(1 for w in adj[v] if w in node_set) for v in nodes}
    maxdeg = max(deg.values())
    if maxdeg <= 2:
        return ("A", n)
    if maxdeg == 3 and sum(1 for v in nodes if deg[v] == 3) == 1:
        center = next(v for v in nodes if deg[v] == 3)
        arms = []
        for nb in adj[center]:
            length = 1
            prev, cur = center, nb
            while True:
                nxt = [w for w in adj[cur] if w != prev and w in node_set]
                if not nxt:
                    break
                prev, cur = cur, nxt[0]
                length += 1
            arms.append(length)
        arms.sort()
        if arms[0] == 1 and arms[1] == 1:
            return ("D", n)
        if arms == [1, 2, 2]:
            return ("E", 6)
        if arms == [1, 2, 3]:
            return ("E", 7)
        if arms == [1, 2, 4]:
            return ("E", 8)
    raise AssertionError("component is not a simply-laced Dynkin diagram")


# ---------------------------------------------------------------------------
# image of tau: O(E) -> O(A_E) via diagram/permutation/unit generators


@dataclass(frozen=True)
class TauImage:
    quotient_form: FiniteQuadraticForm  # A_E = H^perp/H
    maps: tuple  # induced maps on A_E, as tuples of generator images
    conditional: bool
    note: str

    @property
    def size(self) -> int:
        return len(self.maps)


_TAU_NOTE = (
    "computed from diagram automorphisms, permutations of isomorphic "
    "components and unit sign flips stabilizing the glue; assumes these "
    "generate the full image of O(E) on the discriminant form"
)


def _diagram_permutations(comp: Component, n: int) -> list:
    """Index permutations generating the diagram automorphisms of one component."""
    off, k = comp.offset, comp.rank
    perms = []

    def swap(pairs):
        p = list(range(n))
        for a, b in pairs:
            p[a], p[b] = p[b], p[a]
        return p

    if comp.kind == "A" and k >= 2:
        perms.append(swap([(off + i, off + k - 1 - i) for i in range(k // 2)]))
    elif comp.kind == "D":
        if k == 4:
            # tips 0, 2, 3 around center 1
            perms.append(swap([(off + 2, off + 3)]))
            perms.append(swap([(off + 0, off + 2)]))
        else:
            perms.append(swap([(off + k - 2, off + k - 1)]))
    elif comp.kind == "E" and k == 6:
        perms.append(swap([(off + 0, off + 4), (off + 1, off + 3)]))
    return perms


def tau_generator_isometries(gd: GlueData) -> list:
    """Base-lattice isometries generating the non-Weyl automorphism candidates."""
    base = gd.base
    n = base.rank
    if sum(c.rank for c in gd.components) != n:
        raise RootsNotFullRank("components do not span the base lattice")
    mats = []
    for comp in gd.components:
        for p in _diagram_permutations(comp, n):
            mats.append(_perm_matrix(p))
        if comp.kind == "unit":
            flip = [[int(i == j) for j in range(n)] for i in range(n)]
            flip[comp.offset][comp.offset] = -1
            mats.append(IntMatrix(flip))
    for i, ci in enumerate(gd.components):
        for cj in gd.components[i + 1:]:
            if (ci.kind, ci.param) != (cj.kind, cj.param):
                continue
            p = list(range(n))
            for t in range(ci.rank):
                p[ci.offset + t], p[cj.offset + t] = p[cj.offset + t], p[ci.offset + t]
            mats.append(_perm_matrix(p))
            break  # adjacent transpositions of equals generate the symmetric group
    return [Isometry(base, m) for m in mats]


def _perm_matrix(p) -> IntMatrix:
    n = len(p)
    m = [[0] * n for _ in range(n)]
    for src, dst in enumerate(p):
        m[dst][src] = 1
    return IntMatrix(m)


def _disc_action(gd: GlueData, iso: Isometry) -> tuple:
    disc = gd.disc
    images = []
    for i in range(disc.rank):
        lift = disc.lift(tuple(int(j == i) for j in range(disc.rank)))
        moved = iso.matrix.apply(lift)
        images.append(disc.class_of(moved))
    return tuple(images)


def image_of_tau(gd: GlueData, quotient: FiniteQuadraticForm | None = None) -> TauImage:
    """Subgroup of O(A_E) induced by the computed automorphism candidates.

    ``quotient`` may be the already-computed perp quotient of the glue;
    it must carry quotient provenance so classes can be projected.
    """
    disc = gd.disc
    if quotient is None:
        quotient = perp_quotient(disc, gd.glue)
    gens = [_disc_action(gd, iso) for iso in tau_generator_isometries(gd)]
    # close the candidate actions into a finite subgroup of O(A_R)
    group = {identity_map(disc)}
    frontier = list(group)
    while frontier:
        cur = frontier.pop()
        for g in gens:
            nxt = compose_maps(disc, g, cur)
            if nxt not in group:
                group.add(nxt)
                frontier.append(nxt)
    glue_set = set(gd.glue.elements)
    stab = [
        f
        for f in group
        if {apply_map(disc, f, h) for h in glue_set} == glue_set
    ]
    gen_lifts = _quotient_generator_lifts(quotient)
    induced = set()
    for f in stab:
        images = tuple(
            project_to_quotient(quotient, apply_map(disc, f, z)) for z in gen_lifts
        )
        induced.add(images)
    for f in induced:
        for x in quotient.elements():
            if quotient.q(apply_map(quotient, f, x)) != quotient.q(x):
                raise AssertionError("induced map does not preserve q")
    return TauImage(quotient, tuple(sorted(induced)), True, _TAU_NOTE)


def _quotient_generator_lifts(quotient: FiniteQuadraticForm) -> list:
    src = quotient.source
    if src is None or src[0] != "quotient":
        raise BadParameter("form is not a perp quotient")
    _, parent, _, rq, kept = src
    return [parent.reduce(rq.generator_rows.data[i]) for i in kept]
