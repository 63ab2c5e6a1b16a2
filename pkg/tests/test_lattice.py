import json
import random
from fractions import Fraction

import pytest

from cuspidal import lattice as lat
from cuspidal.errors import (
    BadParameter,
    DegenerateComplement,
    DependentInput,
    MemberOfSummand,
    NotIsometry,
    ZeroVector,
)
from cuspidal.exact import smith_normal_form


def k3_square():
    return lat.parse_name("U+U+U+E8+E8+<-2>")


def ambient_vec(L, v1=0, w1=0, v2=0, w2=0, e=0):
    c = [0] * L.rank
    c[0], c[1], c[2], c[3], c[L.rank - 1] = v1, w1, v2, w2, e
    return L.vector(c)


class TestConstructors:
    def test_standard_determinants(self):
        for k in range(1, 25):
            assert lat.A(k).det == (-1) ** k * (k + 1)
        for h in range(4, 25):
            assert lat.D(h).det == (-1) ** h * 4
        assert lat.E(6).det == 3
        assert lat.E(7).det == -2
        assert lat.E(8).det == 1
        assert lat.U().det == -1
        for d in (3, 7, 11, 15, 19):
            assert lat.B(d).det == d

    def test_b3_gram(self):
        assert lat.B(3).gram.to_lists() == [[-2, 1], [1, -2]]

    def test_u_signature(self):
        assert lat.U().signature == (1, 1)

    def test_e8_negative_definite_even(self):
        e8 = lat.E(8)
        assert e8.signature == (0, 8) and e8.even and e8.rank == 8

    def test_bad_parameters(self):
        with pytest.raises(BadParameter):
            lat.B(5)
        with pytest.raises(BadParameter):
            lat.D(3)
        with pytest.raises(BadParameter):
            lat.rank1(3)
        with pytest.raises(BadParameter):
            lat.make_standard("E", 5)

    def test_direct_sum_and_twist(self):
        n = lat.parse_name("U+U+E8+E8+<-2>+<-2>")
        assert (n.rank, n.det, n.signature) == (22, 4, (2, 20))
        u2 = lat.twist(lat.U(), 2)
        assert u2.gram.to_lists() == [[0, 2], [2, 0]] and u2.det == -4
        with pytest.raises(BadParameter):
            lat.direct_sum()

    def test_k3_square_lattice(self):
        L = k3_square()
        assert (L.rank, L.det, L.signature) == (23, 2, (3, 20))


class TestVectors:
    def test_nonsplit_generator_norm_and_divisibility(self):
        # h = 2w1 + (d+1)/2 w2 + e for d = 3 inside U + <-2>
        m = lat.parse_name("U+<-2>")
        h = m.vector((2, 2, 1))
        assert h.norm == 6
        assert lat.divisibility(h) == 2

    def test_divisibility_of_unimodular_basis(self):
        assert lat.divisibility(lat.E(8).basis_vector(0)) == 1

    def test_divisibility_errors(self):
        with pytest.raises(ZeroVector):
            lat.divisibility(lat.U().zero())
        with pytest.raises(BadParameter):
            lat.divisibility(lat.U().vector((Fraction(1, 2), 0)))

    def test_class_of_square_minus_ten(self):
        L = k3_square()
        delta = ambient_vec(L, v1=4, w1=-4, v2=6, w2=6, e=-5)
        assert delta.norm == -10
        assert lat.divisibility(delta) == 2


class TestComplements:
    def test_bd_complement(self):
        m = lat.parse_name("U+<-2>")
        h = m.vector((2, 2, 1))
        comp = lat.orthogonal_complement(m, [h])
        assert comp.rank == 2
        assert lat.rank2_isometric(comp.lattice, lat.B(3))
        assert comp.is_primitive()

    def test_rank21_complement(self):
        L = k3_square()
        g = ambient_vec(L, v1=2, w1=14, e=-5)
        tau = ambient_vec(L, v2=1, w2=-2)
        comp = lat.orthogonal_complement(L, [g, tau])
        assert comp.rank == 21
        assert comp.lattice.signature == (2, 19)
        assert abs(comp.lattice.det) == 12

    def test_isotropic_member_degenerates(self):
        u = lat.U()
        with pytest.raises(DegenerateComplement):
            lat.orthogonal_complement(u, [u.basis_vector(0)])

    def test_dependent_input(self):
        m = lat.parse_name("U+<-2>")
        h = m.vector((2, 2, 1))
        with pytest.raises(DependentInput):
            lat.orthogonal_complement(m, [h, m.vector((4, 4, 2))])

    def test_complement_always_primitive(self):
        random.seed(5)
        L = lat.parse_name("U+A2+<-2>")
        for _ in range(25):
            v = L.vector([random.randint(-3, 3) for _ in range(L.rank)])
            if v.is_zero or v.norm == 0:
                continue
            try:
                comp = lat.orthogonal_complement(L, [v])
            except DegenerateComplement:
                continue
            assert all(d == 1 for d in smith_normal_form(comp.basis_matrix).diag)


class TestSplitting:
    def setup_method(self):
        self.L = k3_square()
        self.g = ambient_vec(self.L, v1=2, w1=14, e=-5)
        self.tau = ambient_vec(self.L, v2=1, w2=-2)
        self.split = lat.splitting_from(self.L, [self.g, self.tau])

    def test_projection_values(self):
        delta = ambient_vec(self.L, v1=4, w1=-4, v2=6, w2=6, e=-5)
        d_m, d_n = lat.split_rational(self.split, delta)
        expect = Fraction(-1, 3) * self.g + Fraction(3, 2) * self.tau
        assert d_m.coords == expect.coords
        assert d_m.norm == Fraction(-25, 3)
        assert d_n.norm == Fraction(-5, 3)
        assert (d_m + d_n).coords == delta.coords

    def test_projection_idempotent(self):
        g_m, g_n = lat.split_rational(self.split, self.g)
        assert g_n.is_zero and g_m.coords == self.g.coords

    def test_norm_additivity(self):
        random.seed(2)
        for _ in range(20):
            v = self.L.vector([random.randint(-2, 2) for _ in range(23)])
            a, b = lat.split_rational(self.split, v)
            assert a.norm + b.norm == v.norm

    def test_delta_prime(self):
        delta = ambient_vec(self.L, v1=4, w1=-4, v2=6, w2=6, e=-5)
        assert lat.delta_prime_test(self.split, delta) is True

    def test_member_of_summand(self):
        with pytest.raises(MemberOfSummand):
            lat.delta_prime_test(self.split, self.tau)

    def test_positive_projection_fails(self):
        # v1 + w1 has norm 2 > 0 and nonzero parts in both summands
        v = ambient_vec(self.L, v1=1, w1=1)
        a, b = lat.split_rational(self.split, v)
        if not a.is_zero and not b.is_zero and a.norm > 0:
            assert lat.delta_prime_test(self.split, v) is False


class TestIsometries:
    def test_reflection_spinor_signs(self):
        e8 = lat.E(8)
        assert lat.spinor_norm(lat.reflection(e8, e8.basis_vector(0))) == 1
        u = lat.U()
        w = u.vector((1, 1))  # norm +2
        assert lat.spinor_norm(lat.reflection(u, w)) == -1

    def test_minus_id_on_two_torsion(self):
        L = lat.parse_name("<-2>+<-2>")
        flags = lat.group_membership(lat.Isometry.minus_identity(L))
        assert flags.det == 1 and flags.spinor == 1
        assert flags.disc_action == "id"
        assert flags.in_so_tilde_plus

    def test_identity_in_every_subgroup(self):
        L = lat.parse_name("U+A2")
        flags = lat.group_membership(lat.Isometry.identity(L))
        assert flags.in_o_plus and flags.stable and flags.in_o_tilde_plus
        assert flags.in_so_tilde_plus and flags.in_o_hat_plus and flags.in_so_hat_plus

    def test_minus_id_spinor_matches_positive_part(self):
        # sn(-id) = (-1)^{r} for signature (r, s)
        assert lat.spinor_norm(lat.Isometry.minus_identity(lat.U())) == -1
        assert lat.spinor_norm(lat.Isometry.minus_identity(lat.A(2))) == 1

    def test_not_isometry(self):
        from cuspidal.exact import IntMatrix

        with pytest.raises(NotIsometry):
            lat.Isometry(lat.U(), IntMatrix([[1, 1], [0, 1]]))

    def test_hat_membership(self):
        # -id acts as -id on A_L of <-8>, with det -1 in rank 1
        L = lat.rank1(-8)
        flags = lat.group_membership(lat.Isometry.minus_identity(L))
        assert flags.disc_action == "-id"
        assert flags.det == -1
        assert flags.in_o_hat_plus and flags.in_so_hat_plus
        assert not flags.in_o_tilde_plus

    def test_factorization_round_trip(self):
        random.seed(11)
        L = lat.parse_name("U+A2")
        cands = [v for v in L.basis() if v.norm != 0]
        cands.append(L.vector((1, 1, 0, 0)))
        cands.append(L.vector((1, -1, 0, 0)))
        for _ in range(15):
            g = lat.Isometry.identity(L)
            for _ in range(random.randint(0, 4)):
                g = g.compose(lat.reflection(L, random.choice(cands)))
            refs = lat.reflection_factorization(g)
            acc = lat.Isometry.identity(L)
            mat = [[Fraction(int(i == j)) for j in range(L.rank)] for i in range(L.rank)]
            for v in refs:
                nv = sum(
                    v[i] * L.gram.data[i][j] * v[j]
                    for i in range(L.rank)
                    for j in range(L.rank)
                )
                assert nv != 0
            assert lat.spinor_norm(g) in (1, -1)
            assert (-1) ** len(refs) == g.det


class TestBinaryForms:
    def test_sign_of_off_diagonal_is_absorbed(self):
        a = lat.Lattice([[-2, 1], [1, -2]])
        b = lat.Lattice([[-2, -1], [-1, -2]])
        assert lat.rank2_isometric(a, b)

    def test_distinct_forms(self):
        assert not lat.rank2_isometric(lat.B(3), lat.B(7))

    def test_reduction_canonical(self):
        red = lat.reduced_binary(lat.Lattice([[-4, -2], [-2, -2]]).gram)
        assert red.to_lists() == [[-2, 0], [0, -2]]


class TestNamesAndJson:
    def test_parse_with_counts_and_twists(self):
        a = lat.parse_name("2E8+2A1")
        assert a.rank == 18 and a.det == 4
        b = lat.parse_name("U(2)")
        assert b.gram.to_lists() == [[0, 2], [2, 0]]

    def test_parse_errors(self):
        with pytest.raises(BadParameter):
            lat.parse_name("Q5")
        with pytest.raises(BadParameter):
            lat.parse_name("U++U")

    def test_json_round_trip(self):
        L = lat.parse_name("U+<-2>")
        text = lat.lattice_to_json(L)
        back = lat.lattice_from_json(text)
        assert back.gram == L.gram
        obj = json.loads(text)
        assert obj["rank"] == 3 and obj["gram"] == L.gram.to_lists()

    def test_load_lattice_from_file(self, tmp_path):
        p = tmp_path / "lat.json"
        p.write_text(lat.lattice_to_json(lat.B(7)))
        assert lat.load_lattice(str(p)).gram == lat.B(7).gram
