import math

import pytest
from hypothesis import given, settings, strategies as st

from cuspidal.errors import NotDefinite, SingularMatrix
from cuspidal.exact import (
    IntMatrix,
    hnf_rows,
    kernel_basis,
    lll_reduce,
    rational_inverse,
    signature_of_symmetric,
    smith_normal_form,
    solve_rational,
)

U_GRAM = IntMatrix([[0, 1], [1, 0]])
E8_GRAM = IntMatrix(
    [
        [-2, 1, 0, 0, 0, 0, 0, 0],
        [1, -2, 1, 0, 0, 0, 0, 0],
        [0, 1, -2, 1, 0, 0, 0, 1],
        [0, 0, 1, -2, 1, 0, 0, 0],
        [0, 0, 0, 1, -2, 1, 0, 0],
        [0, 0, 0, 0, 1, -2, 1, 0],
        [0, 0, 0, 0, 0, 1, -2, 0],
        [0, 0, 1, 0, 0, 0, 0, -2],
    ]
)


def square_ints(n_max=5, lo=-9, hi=9):
    return st.integers(1, n_max).flatmap(
        lambda n: st.lists(
            st.lists(st.integers(lo, hi), min_size=n, max_size=n),
            min_size=n,
            max_size=n,
        )
    )


def symmetric_ints(n_max=5, lo=-6, hi=6):
    def sym(rows):
        n = len(rows)
        return [[rows[min(i, j)][max(i, j)] for j in range(n)] for i in range(n)]

    return square_ints(n_max, lo, hi).map(sym)


def unimodular_from_ops(n, ops):
    m = [[int(i == j) for j in range(n)] for i in range(n)]
    for i, j, c in ops:
        i, j, c = i % n, j % n, c
        if i != j:
            for k in range(n):
                m[i][k] += c * m[j][k]
    return IntMatrix(m)


class TestSmith:
    def test_hyperbolic_plane(self):
        assert smith_normal_form(U_GRAM).diag == (1, 1)

    def test_diagonal_input(self):
        assert smith_normal_form(IntMatrix([[-2, 0], [0, -6]])).diag == (2, 6)

    def test_b3(self):
        # 2x2 row/column reduction by hand gives diag (1, 3)
        s = smith_normal_form(IntMatrix([[-2, 1], [1, -2]]))
        assert s.diag == (1, 3)

    @given(square_ints())
    def test_decomposition_invariants(self, rows):
        a = IntMatrix(rows)
        s = smith_normal_form(a)
        assert s.left @ a @ s.right == s.diagonal_matrix()
        assert abs(s.left.det()) == 1
        assert abs(s.right.det()) == 1
        nonzero = [d for d in s.diag if d]
        assert all(nonzero[i + 1] % nonzero[i] == 0 for i in range(len(nonzero) - 1))
        assert list(s.diag[len(nonzero):]) == [0] * (len(s.diag) - len(nonzero))

    @given(square_ints())
    def test_diag_product_is_det(self, rows):
        a = IntMatrix(rows)
        assert math.prod(smith_normal_form(a).diag) == abs(a.det())


class TestSignature:
    def test_examples(self):
        assert signature_of_symmetric(U_GRAM) == (1, 1)
        assert signature_of_symmetric(E8_GRAM) == (0, 8)

    def test_k3_square_lattice(self):
        blocks = [U_GRAM, U_GRAM, U_GRAM, E8_GRAM, E8_GRAM, IntMatrix([[-2]])]
        g = IntMatrix.block_diagonal(blocks)
        assert signature_of_symmetric(g) == (3, 20)

    def test_singular_raises(self):
        with pytest.raises(SingularMatrix):
            signature_of_symmetric(IntMatrix([[1, 1], [1, 1]]))

    def test_matches_minor_oracle(self):
        # Jacobi: when all leading minors are nonzero, negatives are sign changes
        g = IntMatrix([[2, 1, 0], [1, -3, 2], [0, 2, 1]])
        minors = [1]
        for k in range(1, 4):
            minors.append(IntMatrix([row[:k] for row in g.to_lists()[:k]]).det())
        changes = sum(1 for k in range(1, 4) if minors[k] * minors[k - 1] < 0)
        assert signature_of_symmetric(g) == (3 - changes, changes)

    @given(
        symmetric_ints(),
        st.lists(
            st.tuples(st.integers(0, 4), st.integers(0, 4), st.integers(-2, 2)),
            max_size=8,
        ),
    )
    def test_congruence_invariance(self, rows, ops):
        g = IntMatrix(rows)
        if g.det() == 0:
            return
        t = unimodular_from_ops(g.rows, ops)
        assert signature_of_symmetric(t.T @ g @ t) == signature_of_symmetric(g)


class TestLLL:
    def test_rank_one(self):
        red, t = lll_reduce(IntMatrix([[-2]]))
        assert red == IntMatrix([[-2]]) and t == IntMatrix([[1]])

    def test_binary_orthogonalized(self):
        # determinant 4 forces diag(-2, -2); a basis change is expected
        red, t = lll_reduce(IntMatrix([[-4, -2], [-2, -2]]))
        assert red.data[0][1] == 0
        assert sorted([red.data[0][0], red.data[1][1]]) == [-2, -2]
        assert abs(t.det()) == 1

    def test_e8_stable(self):
        red, t = lll_reduce(E8_GRAM)
        assert all(red.data[i][i] == -2 for i in range(8))
        assert abs(t.det()) == 1

    def test_indefinite_rejected(self):
        with pytest.raises(NotDefinite):
            lll_reduce(U_GRAM)

    @given(
        symmetric_ints(n_max=4, lo=-3, hi=3),
        st.lists(
            st.tuples(st.integers(0, 3), st.integers(0, 3), st.integers(-2, 2)),
            max_size=6,
        ),
    )
    def test_preserves_det_and_signature(self, rows, ops):
        n = len(rows)
        # build a definite gram: G = -(T^t T + I scaled)
        t = unimodular_from_ops(n, ops)
        spd = t.T @ t
        g = IntMatrix([[-(spd.data[i][j] + (2 if i == j else 0)) for j in range(n)]
                       for i in range(n)])
        red, tr = lll_reduce(g)
        assert red.det() == g.det()
        assert signature_of_symmetric(red) == signature_of_symmetric(g) == (0, n)
        assert tr.T @ g @ tr == red


class TestSolve:
    def test_identity(self):
        assert solve_rational(IntMatrix.identity(2), (3, 4)) == (3, 4)

    def test_dual_of_u(self):
        assert solve_rational(U_GRAM, (1, 0)) == (0, 1)

    def test_dual_of_minus_two(self):
        from fractions import Fraction

        assert solve_rational(IntMatrix([[-2]]), (1,)) == (Fraction(-1, 2),)

    def test_no_solution(self):
        assert solve_rational(IntMatrix([[1], [1]]), (1, 2)) is None

    @given(square_ints(n_max=4), st.lists(st.integers(-5, 5), min_size=4, max_size=4))
    def test_solution_satisfies_system(self, rows, b):
        a = IntMatrix(rows)
        b = b[: a.rows]
        x = solve_rational(a, b)
        if x is not None:
            assert list(a.apply(x)) == [v for v in b]


class TestKernelAndHnf:
    def test_kernel_is_saturated(self):
        k = kernel_basis(IntMatrix([[2, 4, 6]]))
        # saturation: SNF invariant factors of the basis are all 1
        assert all(d == 1 for d in smith_normal_form(k).diag)
        for row in k.data:
            assert sum(a * b for a, b in zip((2, 4, 6), row)) == 0

    def test_hnf_pivots(self):
        basis = hnf_rows([[2, 0], [0, 2], [1, 1]])
        assert basis == [[1, 1], [0, 2]]

    def test_rational_inverse(self):
        inv = rational_inverse(U_GRAM)
        assert [[int(x) for x in row] for row in inv] == [[0, 1], [1, 0]]
