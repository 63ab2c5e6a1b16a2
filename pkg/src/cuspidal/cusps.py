"""Baily-Borel boundary enumeration for <2d>-polarized K3[2] period domains.

The ambient lattice is U^3 + E8^2 + <-2>.  A polarization of degree 2d
embeds either split (divisibility 1, complement U^2+E8^2+<-2>+<-2d>) or,
when d = 3 mod 4, non-split (divisibility 2, complement U^2+E8^2+B_d).

Zero-dimensional boundary points correspond to isotropic classes of the
complement's discriminant form modulo +-1.  Writing d = d'*k^2 with d'
square-free, their number is k+1 in the split case with d' = 3 mod 4 and
floor((k+2)/2) otherwise; the trivial class is counted (it corresponds
to the divisibility-1 primitive isotropic vectors).  Orbit
representatives are labelled (m, n) with m | K, gcd(m, n) = 1 and
0 <= n <= m/2.

One-dimensional components are parametrized, for square-free d, by pairs
(E, l) with E a rank-18 negative definite lattice in the genus of the
complement's transverse part and l a class in O(A_E)/Im tau.  Candidate
lattices E must be supplied (the built-in list covers split d = 1, the
thirteen known rows); Im tau is computed from diagram, permutation and
unit automorphisms and every dependent count is flagged conditional.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, isqrt

from .errors import (
    BadCase,
    BadIndex,
    BadParameter,
    HypothesisFailed,
    NotSquareFree,
)
from .exact import IntMatrix, smith_normal_form
from . import fqf
from . import glue as glue_mod
from .fqf import FiniteQuadraticForm, FqfSubgroup, discriminant_form, trivial_form
from .lattice import (
    Lattice,
    LatticeVector,
    Sublattice,
    direct_sum,
    divisibility,
    make_standard,
    parse_name,
    rank2_isometric,
)


def squarefree_decompose(d: int):
    """d = d' * k^2 with d' square-free; returns (d', k)."""
    k = 1
    m = d
    f = 2
    while f * f <= m:
        e = 0
        while m % f == 0:
            m //= f
            e += 1
        k *= f ** (e // 2)
        f += 1
    dprime = d // (k * k)
    return dprime, k


@dataclass(frozen=True)
class PolarizationCase:
    """Degree-2d polarization with a chosen embedding type."""

    d: int
    embedding: str  # "split" or "nonsplit"
    dprime: int = field(init=False)
    k: int = field(init=False)
    K: int = field(init=False)

    def __post_init__(self):
        if self.d < 1:
            raise BadCase("d must be a positive integer")
        if self.embedding not in ("split", "nonsplit"):
            raise BadCase(f"unknown embedding {self.embedding!r}")
        if self.embedding == "nonsplit" and self.d % 4 != 3:
            raise BadCase("non-split embeddings require d = 3 mod 4")
        dprime, k = squarefree_decompose(self.d)
        object.__setattr__(self, "dprime", dprime)
        object.__setattr__(self, "k", k)
        big = 2 * k if (self.embedding == "split" and dprime % 4 == 3) else k
        object.__setattr__(self, "K", big)

    @property
    def split(self) -> bool:
        return self.embedding == "split"


# ---------------------------------------------------------------------------
# discriminant model (distinguished generators)


@dataclass(frozen=True)
class DiscModel:
    """A_N with the distinguished classes used by all closed formulas."""

    case: PolarizationCase
    form: FiniteQuadraticForm
    t_class: tuple  # class of t/2d (split) or of t = h/d - w2 (nonsplit)
    e_class: tuple | None  # class of e/2 in the split case


def disc_model(case: PolarizationCase) -> DiscModel:
    """A_N built from the core block; unimodular summands contribute nothing."""
    if case.split:
        core = direct_sum(make_standard("rank1", -2 * case.d), make_standard("rank1", -2))
        form = discriminant_form(core)
        t_cls = form.class_of((Fraction(1, 2 * case.d), 0))
        e_cls = form.class_of((0, Fraction(1, 2)))
        return DiscModel(case, form, t_cls, e_cls)
    core = make_standard("B", case.d)
    form = discriminant_form(core)
    # t = (2 b1 + b2)/d generates A_N with q(t) = -2/d
    t_cls = form.class_of((Fraction(2, case.d), Fraction(1, case.d)))
    return DiscModel(case, form, t_cls, None)


# ---------------------------------------------------------------------------
# the explicit polarized embedding in U^3 + E8^2 + <-2>


@dataclass(frozen=True)
class PolarizedEmbedding:
    case: PolarizationCase
    ambient: Lattice
    h: LatticeVector
    complement: Sublattice
    disc: FiniteQuadraticForm
    t_class: tuple
    e_class: tuple | None


def k3_square_lattice() -> Lattice:
    return parse_name("U+U+U+E8+E8+<-2>")


def build_polarized(case: PolarizationCase) -> PolarizedEmbedding:
    """Explicit h and N inside U^3 + E8^2 + <-2>, checked by Gram computation.

    Basis order: v1, w1, v2, w2, v3, w3, two E8 blocks, e.
    """
    L = k3_square_lattice()
    n = L.rank
    d = case.d

    def unit(i):
        return [int(j == i) for j in range(n)]

    if case.split:
        h = L.vector([1, d] + [0] * (n - 2))
        rows = [[1, -d] + [0] * (n - 2)]  # t = v1 - d w1, norm -2d
        rows += [unit(i) for i in range(2, n - 1)]
        rows += [unit(n - 1)]  # e last
        expected_div = 1
    else:
        hcoe = [2, (d + 1) // 2] + [0] * (n - 3) + [1]
        h = L.vector(hcoe)
        b1 = [1, -(d + 1) // 4] + [0] * (n - 2)
        b2 = [0, 1] + [0] * (n - 3) + [1]
        rows = [b1, b2] + [unit(i) for i in range(2, n - 1)]
        expected_div = 2

    if h.norm != 2 * d:
        raise AssertionError("polarization square is not 2d")
    if divisibility(h) != expected_div:
        raise AssertionError("polarization divisibility mismatch")
    sub = Sublattice(L, rows)
    for b in sub.basis():
        if b.dot(h) != 0:
            raise AssertionError("complement basis is not orthogonal to h")
    if not sub.is_primitive():
        raise AssertionError("complement basis is not primitive")
    gram = sub.lattice.gram
    if case.split:
        if gram.data[0][0] != -2 * d or gram.data[n - 2][n - 2] != -2:
            raise AssertionError("distinguished generators have wrong norms")
    else:
        if not rank2_isometric(
            Lattice([[gram.data[0][0], gram.data[0][1]], [gram.data[1][0], gram.data[1][1]]]),
            make_standard("B", d),
        ):
            raise AssertionError("B_d block mismatch")
    form = discriminant_form(sub.lattice)
    rank_n = sub.rank
    if case.split:
        t_cls = form.class_of([Fraction(1, 2 * d)] + [0] * (rank_n - 1))
        e_cls = form.class_of([0] * (rank_n - 1) + [Fraction(1, 2)])
    else:
        t_cls = form.class_of([Fraction(2, d), Fraction(1, d)] + [0] * (rank_n - 2))
        e_cls = None
    return PolarizedEmbedding(case, L, h, sub, form, t_cls, e_cls)


# ---------------------------------------------------------------------------
# zero-dimensional cusps


def nu_formula(case: PolarizationCase) -> int:
    if case.split and case.dprime % 4 == 3:
        return case.k + 1
    return (case.k + 2) // 2


def nu_enumerate(case: PolarizationCase, bound: int = fqf.ENUM_BOUND) -> int:
    model = disc_model(case)
    iso = fqf.isotropic_elements(model.form, bound)
    return len(fqf.mod_pm1(model.form, iso))


@dataclass(frozen=True)
class NuResult:
    case: PolarizationCase
    formula: int | None
    enumerated: int | None

    @property
    def agree(self) -> bool | None:
        if self.formula is None or self.enumerated is None:
            return None
        return self.formula == self.enumerated

    @property
    def value(self) -> int:
        return self.formula if self.formula is not None else self.enumerated


def nu(case: PolarizationCase, mode: str = "both", bound: int = fqf.ENUM_BOUND) -> NuResult:
    if mode not in ("formula", "enumerate", "both"):
        raise BadParameter(f"unknown nu mode {mode!r}")
    f = nu_formula(case) if mode in ("formula", "both") else None
    e = nu_enumerate(case, bound) if mode in ("enumerate", "both") else None
    return NuResult(case, f, e)


def _divisors(n: int):
    out = [m for m in range(1, n + 1) if n % m == 0]
    return out


def valid_orders(case: PolarizationCase) -> list:
    """Orders m of the isotropic subgroups H_m, i.e. divisors of K."""
    return _divisors(case.K)


def _order_pattern(case: PolarizationCase, m: int) -> str:
    if m not in valid_orders(case):
        raise BadIndex(f"m={m} does not index an isotropic subgroup for this case")
    if case.k % m == 0:
        return "t"
    # remaining divisors of K = 2k: even m with m/2 | k, split d' = 3 mod 4 only
    return "t+e"


def _element_of_order(model: DiscModel, m: int, n: int) -> tuple:
    case = model.case
    pattern = _order_pattern(case, m)
    form = model.form
    if case.split:
        step = 2 * case.d // m  # t/m = step * (t/2d)
        x = form.smul(n * step, model.t_class)
        if pattern == "t+e":
            x = form.add(x, form.smul(n, model.e_class))
        return x
    return form.smul(n * (case.d // m), model.t_class)


@dataclass(frozen=True)
class OrbitRep:
    m: int
    n: int
    element: tuple


def orbit_reps(case: PolarizationCase, bound: int = fqf.ENUM_BOUND) -> list:
    """Representatives x_{m,n} of I_1(A_N)/{+-1}, verified exhaustive."""
    model = disc_model(case)
    form = model.form
    reps = []
    for m in valid_orders(case):
        for n in range(0, m // 2 + 1):
            if gcd(m, n) != 1:
                continue
            x = _element_of_order(model, m, n)
            if form.q(x) != 0:
                raise AssertionError(f"x_({m},{n}) is not isotropic")
            if form.order_of(x) != m:
                raise AssertionError(f"x_({m},{n}) does not have order {m}")
            reps.append(OrbitRep(m, n, x))
    canon = sorted(min(r.element, form.neg(r.element)) for r in reps)
    brute = fqf.mod_pm1(form, fqf.isotropic_elements(form, bound))
    if canon != sorted(brute):
        raise AssertionError("orbit representatives do not exhaust the isotropic classes")
    if len(set(canon)) != len(reps):
        raise AssertionError("orbit representatives collide")
    return sorted(reps, key=lambda r: (r.m, r.n))


def h_subgroup(case: PolarizationCase, m: int, model: DiscModel | None = None) -> FqfSubgroup:
    """The isotropic subgroup H_m of A_N."""
    if model is None:
        model = disc_model(case)
    gen = _element_of_order(model, m, 1) if m > 1 else model.form.zero
    return fqf.subgroup_span(model.form, [gen])


def predicted_AE(case: PolarizationCase, m: int) -> FiniteQuadraticForm:
    """The printed discriminant form of E = S-perp/S for H_S = H_m."""
    pattern = _order_pattern(case, m)
    d = case.d
    if case.split:
        if pattern == "t":
            a = 2 * d // (m * m)
            return FiniteQuadraticForm(
                (2, a),
                (Fraction(-1, 2), Fraction(-m * m, 2 * d)),
                [[0, 0], [0, 0]],
            )
        a = 4 * d // (m * m)
        qv = Fraction(-(m * m + 4 * d), 8 * d)
        if a == 1:
            return trivial_form()
        return FiniteQuadraticForm((a,), (qv,), [[0]])
    a = d // (m * m)
    if a == 1:
        return trivial_form()
    return FiniteQuadraticForm((a,), (Fraction(-2 * m * m, d),), [[0]])


def det_E(case: PolarizationCase, m: int) -> int:
    return (4 * case.d if case.split else case.d) // (m * m)


def t_set(case: PolarizationCase, m: int, bound: int = fqf.ENUM_BOUND) -> list:
    """All delta in [0, m) whose T(m, delta) is compatible with the splitting.

    T(m, delta) has Gram [[0, m], [m, 2*delta]]; delta is kept when the
    discriminant form of T(m, delta) plus the predicted A_E is isometric
    to A_N.  Requires gcd(m, det E) = 1.
    """
    de = det_E(case, m)
    if gcd(m, de) != 1:
        raise HypothesisFailed(f"gcd(m, det E) = gcd({m}, {de}) != 1")
    model = disc_model(case)
    pred = predicted_AE(case, m)
    out = []
    for delta in range(m):
        t_gram = IntMatrix([[0, m], [m, 2 * delta]])
        t_disc = discriminant_form(Lattice(t_gram))
        total = fqf.direct_sum_form(t_disc, pred)
        if fqf.are_isometric(total, model.form, bound)[0]:
            out.append((delta, t_gram))
    return out


# ---------------------------------------------------------------------------
# one-dimensional cusps


@dataclass(frozen=True)
class Candidate:
    """Declared root decomposition of a candidate lattice E (plus display data)."""

    roots: str
    niemeier: str | None = None
    glue_gens: tuple | None = None


TABLE1_ROWS = (
    Candidate("2E8+2A1", "3E8"),
    Candidate("D16+2A1", "E8+D16"),
    Candidate("E8+D10", "E8+D16"),
    Candidate("E7+D10+A1", "2E7+D10"),
    Candidate("2E7+D4", "2E7+D10"),
    Candidate("A17+A1", "E7+A17"),
    Candidate("D18", "D24"),
    Candidate("D12+D6", "2D12"),
    Candidate("2A1+2D8", "3D8"),
    Candidate("A3+A15", "D9+A15"),
    Candidate("E6+A11+<-4>", "E6+D7+A11"),
    Candidate("3D6", "4D6"),
    Candidate("2A9", "D6+2A9"),
)


@dataclass(frozen=True)
class OneDimRow:
    candidate: Candidate
    genus_ok: bool
    roots_ok: bool
    computed_roots: str | None
    o_ae: int | None
    im_tau: int | None
    classes: int | None
    note: str | None = None

    @property
    def ok(self) -> bool:
        return self.genus_ok and self.roots_ok


def _realize_candidate(case: PolarizationCase, cand: Candidate, bound: int) -> OneDimRow:
    target_det = det_E(case, 1)
    target_form = predicted_AE(case, 1)
    gd0 = glue_mod.make_glue(cand.roots)
    base_det = abs(gd0.base.det)
    if gd0.base.rank != 18:
        return OneDimRow(cand, False, False, None, None, None, None, "rank is not 18")
    if base_det % target_det:
        return OneDimRow(cand, False, False, None, None, None, None, "determinant mismatch")
    h2 = base_det // target_det
    h_order = isqrt(h2)
    if h_order * h_order != h2:
        return OneDimRow(cand, False, False, None, None, None, None,
                         "no glue order gives the target determinant")
    declared = glue_mod.root_system_from_spec(cand.roots)
    if cand.glue_gens is not None:
        subgroups = [fqf.subgroup_span(gd0.disc, cand.glue_gens)]
    else:
        subgroups = [
            s for s in fqf.isotropic_subgroups(gd0.disc, bound) if s.order == h_order
        ]
    fallback = None
    for s in subgroups:
        quotient = fqf.perp_quotient(gd0.disc, s)
        if not fqf.are_isometric(quotient, target_form, bound)[0]:
            continue
        gd = glue_mod.GlueData(gd0.base, gd0.components, gd0.disc, s)
        over = glue_mod.overlattice(gd)
        if over.lattice.signature != (0, 18):
            continue
        rs = glue_mod.root_system(over.lattice)
        tau = glue_mod.image_of_tau(gd, quotient)
        o_ae = len(fqf.orthogonal_group(tau.quotient_form, bound))
        row = OneDimRow(
            cand,
            True,
            rs.components == declared.components,
            rs.spec_string(),
            o_ae,
            tau.size,
            o_ae // tau.size,
        )
        if row.roots_ok:
            return row
        fallback = row
    if fallback is not None:
        return fallback
    return OneDimRow(cand, False, False, None, None, None, None,
                     "no isotropic glue realizes the target genus")


def one_dim_cusps(
    case: PolarizationCase, candidates=None, bound: int = fqf.ENUM_BOUND
) -> list:
    """Per-candidate one-dimensional boundary data; counts are conditional.

    Candidates must be supplied except for the built-in split d = 1 list;
    genus completeness is never assumed, so the total is only a sum over
    verified rows.
    """
    if case.k != 1:
        raise NotSquareFree(f"d = {case.d} is not square-free")
    if candidates is None:
        if case.split and case.d == 1:
            candidates = TABLE1_ROWS
        else:
            raise BadParameter(
                "no built-in candidate list for this case; supply candidates"
            )
    return [_realize_candidate(case, c, bound) for c in candidates]


# ---------------------------------------------------------------------------
# reports


@dataclass(frozen=True)
class CuspReport:
    case: PolarizationCase
    nu_result: NuResult
    reps: tuple
    one_dim: tuple | None = None

    def to_obj(self) -> dict:
        zero = {
            "formula": self.nu_result.formula,
            "enumerated": self.nu_result.enumerated,
            "reps": [[r.m, r.n] for r in self.reps],
        }
        obj = {
            "case": {"d": self.case.d, "embedding": self.case.embedding},
            "zero_dim": zero,
        }
        if self.one_dim is not None:
            rows = []
            for row in self.one_dim:
                rows.append(
                    {
                        "roots": row.computed_roots or row.candidate.roots,
                        "genus_ok": row.ok,
                        "o_ae": row.o_ae,
                        "im_tau": row.im_tau,
                        "classes": row.classes,
                        "conditional": True,
                    }
                )
            total = sum(r.classes for r in self.one_dim if r.ok and r.classes)
            obj["one_dim"] = {"candidates": rows, "total": total}
        return obj


def zero_dim_report(case: PolarizationCase, mode: str = "both",
                    bound: int = fqf.ENUM_BOUND) -> CuspReport:
    return CuspReport(case, nu(case, mode, bound), tuple(orbit_reps(case, bound)))


def full_report(case: PolarizationCase, candidates=None,
                bound: int = fqf.ENUM_BOUND) -> CuspReport:
    return CuspReport(
        case,
        nu(case, "both", bound),
        tuple(orbit_reps(case, bound)),
        tuple(one_dim_cusps(case, candidates, bound)),
    )


# ---------------------------------------------------------------------------
# the cubic-scroll verification fixture (Hassett-Tschinkel ample cones)


def example_c12() -> dict:
    """Verification data for the rank-2 polarized family <6> + <-4>.

    Uses the printed coordinates g = 2v1 + 14w1 - 5e, tau = v2 - 2w2,
    delta = 4(v1 - w1) + 6(v2 + w2) - 5e and beta1 = -3g + tau, and checks
    the complement against U + E8^2 + B3 + <4> at the genus level.
    """
    from .lattice import delta_prime_test, pair, split_rational, splitting_from

    L = k3_square_lattice()
    n = L.rank

    def vec(v1=0, w1=0, v2=0, w2=0, e=0):
        c = [0] * n
        c[0], c[1], c[2], c[3], c[n - 1] = v1, w1, v2, w2, e
        return L.vector(c)

    g = vec(v1=2, w1=14, e=-5)
    tau = vec(v2=1, w2=-2)
    delta = vec(v1=4, w1=-4, v2=6, w2=6, e=-5)
    beta1 = -3 * g + tau

    split = splitting_from(L, [g, tau])
    comp = split.right.lattice
    model = parse_name("U+E8+E8+B3+<4>")
    genus_match = (
        comp.signature == model.signature
        and abs(comp.det) == abs(model.det)
        and fqf.are_isometric(discriminant_form(comp), discriminant_form(model))[0]
    )
    d_m, d_n = split_rational(split, delta)
    target_dm = Fraction(-1, 3) * g + Fraction(3, 2) * tau
    return {
        "g2": g.norm,
        "tau2": tau.norm,
        "g_tau": pair(g, tau),
        "complement_signature": comp.signature,
        "complement_det": comp.det,
        "complement_genus_matches_U_E8_E8_B3_4": genus_match,
        "delta2": delta.norm,
        "delta_div": divisibility(delta),
        "delta_m_matches": d_m.coords == target_dm.coords,
        "delta_m2": d_m.norm,
        "delta_n2": d_n.norm,
        "delta_prime": delta_prime_test(split, delta),
        "beta1_delta": pair(beta1, delta),
    }


def example_c12_ok(data: dict | None = None) -> bool:
    data = data if data is not None else example_c12()
    return (
        data["g2"] == 6
        and data["tau2"] == -4
        and data["g_tau"] == 0
        and data["complement_signature"] == (2, 19)
        and abs(data["complement_det"]) == 12
        and data["complement_genus_matches_U_E8_E8_B3_4"]
        and data["delta2"] == -10
        and data["delta_div"] == 2
        and data["delta_m_matches"]
        and data["delta_m2"] == Fraction(-25, 3)
        and data["delta_n2"] == Fraction(-5, 3)
        and data["delta_prime"] is True
        and data["beta1_delta"] == 0
    )
