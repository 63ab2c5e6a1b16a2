"""Exact integer and rational linear algebra.

Everything here works with arbitrary-precision Python ints and
``fractions.Fraction``; no floating point appears in any result path.
Matrices are small (rank <= 24 in all callers), so the algorithms favour
simplicity over asymptotics: Bareiss for determinants, textbook Smith
normal form with transform matrices, congruence diagonalization for
signatures, and exact Gram-matrix LLL at delta = 99/100.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import NotDefinite, SingularMatrix

LLL_DELTA = Fraction(99, 100)


class IntMatrix:
    """Immutable dense integer matrix."""

    __slots__ = ("data",)

    def __init__(self, rows):
        data = tuple(tuple(int(x) for x in row) for row in rows)
        if data and any(len(r) != len(data[0]) for r in data):
            raise ValueError("ragged rows")
        object.__setattr__(self, "data", data)

    def __setattr__(self, name, value):
        raise AttributeError("IntMatrix is immutable")

    @property
    def rows(self) -> int:
        return len(self.data)

    @property
    def cols(self) -> int:
        return len(self.data[0]) if self.data else 0

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def diagonal(cls, entries) -> "IntMatrix":
        entries = list(entries)
        n = len(entries)
        return cls([[entries[i] if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def block_diagonal(cls, blocks) -> "IntMatrix":
        blocks = list(blocks)
        n = sum(b.rows for b in blocks)
        out = [[0] * n for _ in range(n)]
        off = 0
        for b in blocks:
            if b.rows != b.cols:
                raise ValueError("block_diagonal needs square blocks")
            for i in range(b.rows):
                for j in range(b.cols):
                    out[off + i][off + j] = b.data[i][j]
            off += b.rows
        return cls(out)

    def __getitem__(self, ij):
        i, j = ij
        return self.data[i][j]

    def row(self, i):
        return self.data[i]

    def __eq__(self, other):
        return isinstance(other, IntMatrix) and self.data == other.data

    def __hash__(self):
        return hash(self.data)

    def __repr__(self):
        return f"IntMatrix({[list(r) for r in self.data]})"

    def __neg__(self) -> "IntMatrix":
        return IntMatrix([[-x for x in r] for r in self.data])

    def __add__(self, other: "IntMatrix") -> "IntMatrix":
        return IntMatrix(
            [[a + b for a, b in zip(ra, rb)] for ra, rb in zip(self.data, other.data)]
        )

    def scaled(self, t: int) -> "IntMatrix":
        return IntMatrix([[t * x for x in r] for r in self.data])

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise ValueError("shape mismatch")
        bt = list(zip(*other.data))
        return IntMatrix(
            [[sum(a * b for a, b in zip(row, col)) for col in bt] for row in self.data]
        )

    def transpose(self) -> "IntMatrix":
        return IntMatrix(list(zip(*self.data))) if self.data else IntMatrix([])

    @property
    def T(self) -> "IntMatrix":
        return self.transpose()

    def is_symmetric(self) -> bool:
        return self.rows == self.cols and all(
            self.data[i][j] == self.data[j][i]
            for i in range(self.rows)
            for j in range(i)
        )

    def apply(self, vec):
        """Matrix times column vector; entries may be ints or Fractions."""
        if len(vec) != self.cols:
            raise ValueError("shape mismatch")
        return tuple(sum(a * x for a, x in zip(row, vec)) for row in self.data)

    def det(self) -> int:
        """Determinant by fraction-free Bareiss elimination."""
        n = self.rows
        if n != self.cols:
            raise ValueError("determinant of non-square matrix")
        if n == 0:
            return 1
        m = [list(r) for r in self.data]
        sign = 1
        prev = 1
        for k in range(n - 1):
            if m[k][k] == 0:
                for i in range(k + 1, n):
                    if m[i][k] != 0:
                        m[k], m[i] = m[i], m[k]
                        sign = -sign
                        break
                else:
                    return 0
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
                m[i][k] = 0
            prev = m[k][k]
        return sign * m[n - 1][n - 1]

    def to_lists(self):
        return [list(r) for r in self.data]


@dataclass(frozen=True)
class SmithDecomposition:
    """left @ A @ right equals the (rectangular) diagonal matrix of ``diag``."""

    left: IntMatrix
    diag: tuple
    right: IntMatrix

    def diagonal_matrix(self) -> IntMatrix:
        m = self.left.rows
        n = self.right.rows
        out = [[0] * n for _ in range(m)]
        for i, d in enumerate(self.diag):
            out[i][i] = d
        return IntMatrix(out)


def _xgcd(a: int, b: int):
    """g, x, y with g = gcd(a, b) = x*a + y*b and g >= 0."""
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def smith_normal_form(A: IntMatrix) -> SmithDecomposition:
    """Smith normal form with unimodular transform matrices.

    Returns left, diag, right with left @ A @ right diagonal, diagonal
    entries nonnegative and satisfying d1 | d2 | ... followed by zeros.
    """
    m, n = A.rows, A.cols
    S = [list(r) for r in A.data]
    L = [[int(i == j) for j in range(m)] for i in range(m)]
    Rt = [[int(i == j) for j in range(n)] for i in range(n)]  # R transposed

    def row_swap(i, j):
        S[i], S[j] = S[j], S[i]
        L[i], L[j] = L[j], L[i]

    def row_add(dst, src, c):
        if c:
            S[dst] = [a + c * b for a, b in zip(S[dst], S[src])]
            L[dst] = [a + c * b for a, b in zip(L[dst], L[src])]

    def row_neg(i):
        S[i] = [-a for a in S[i]]
        L[i] = [-a for a in L[i]]

    def col_swap(i, j):
        for row in S:
            row[i], row[j] = row[j], row[i]
        Rt[i], Rt[j] = Rt[j], Rt[i]

    def col_add(dst, src, c):
        if c:
            for row in S:
                row[dst] += c * row[src]
            Rt[dst] = [a + c * b for a, b in zip(Rt[dst], Rt[src])]

    t = 0
    top = min(m, n)
    while t < top:
        best = None
        for i in range(t, m):
            for j in range(t, n):
                if S[i][j] and (best is None or abs(S[i][j]) < abs(S[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        if best[0] != t:
            row_swap(best[0], t)
        if best[1] != t:
            col_swap(best[1], t)
        while True:
            dirty = False
            for i in range(t + 1, m):
                if S[i][t]:
                    row_add(i, t, -(S[i][t] // S[t][t]))
                    if S[i][t]:
                        row_swap(i, t)
                        dirty = True
            for j in range(t + 1, n):
                if S[t][j]:
                    col_add(j, t, -(S[t][j] // S[t][t]))
                    if S[t][j]:
                        col_swap(j, t)
                        dirty = True
            if not dirty:
                break
        t += 1

    rank = t
    for i in range(rank):
        if S[i][i] < 0:
            row_neg(i)
    # enforce the divisibility chain with unimodular 2x2 mixes on diag pairs
    changed = True
    while changed:
        changed = False
        for i in range(rank - 1):
            for j in range(i + 1, rank):
                a, b = S[i][i], S[j][j]
                if b % a == 0:
                    continue
                changed = True
                g, x, y = _xgcd(a, b)
                ai, bi = a // g, b // g
                row_add(i, j, 1)  # row i now (a at col i, b at col j)
                # columns (i, j) <- (x*ci + y*cj, -bi*ci + ai*cj), det = 1
                for row in S:
                    ci, cj = row[i], row[j]
                    row[i] = x * ci + y * cj
                    row[j] = -bi * ci + ai * cj
                ri, rj = Rt[i], Rt[j]
                Rt[i] = [x * u + y * v for u, v in zip(ri, rj)]
                Rt[j] = [-bi * u + ai * v for u, v in zip(ri, rj)]
                row_add(j, i, -(S[j][i] // S[i][i]))
                if S[i][i] < 0:
                    row_neg(i)
                if S[j][j] < 0:
                    row_neg(j)
    diag = tuple(S[i][i] for i in range(top))
    return SmithDecomposition(IntMatrix(L), diag, IntMatrix(Rt).transpose())


def signature_of_symmetric(A: IntMatrix) -> tuple:
    """Exact signature (positives, negatives) of a nonsingular symmetric matrix.

    Congruence diagonalization over Q (Lagrange); the trailing Schur
    complement at each step keeps everything symmetric.  Raises
    SingularMatrix on degenerate input.
    """
    if not A.is_symmetric():
        raise ValueError("matrix is not symmetric")
    n = A.rows
    M = [[Fraction(x) for x in row] for row in A.data]
    pos = neg = 0
    for t in range(n):
        if M[t][t] == 0:
            k = next((i for i in range(t + 1, n) if M[i][i] != 0), None)
            if k is None:
                pair = next(
                    ((i, j) for i in range(t, n) for j in range(i + 1, n) if M[i][j]),
                    None,
                )
                if pair is None:
                    raise SingularMatrix("degenerate symmetric form")
                i, j = pair
                for c in range(n):
                    M[i][c] += M[j][c]
                for r in range(n):
                    M[r][i] += M[r][j]
                k = i
            M[t], M[k] = M[k], M[t]
            for row in M:
                row[t], row[k] = row[k], row[t]
        p = M[t][t]
        if p > 0:
            pos += 1
        else:
            neg += 1
        for i in range(t + 1, n):
            f = M[i][t] / p
            if f:
                for j in range(t + 1, n):
                    M[i][j] -= f * M[t][j]
        for i in range(t + 1, n):
            M[i][t] = Fraction(0)
            M[t][i] = Fraction(0)
    return (pos, neg)


def _gram_schmidt(gram):
    """mu, norms from a Gram matrix, or None when not positive definite."""
    n = len(gram)
    mu = [[Fraction(0)] * n for _ in range(n)]
    norms = [Fraction(0)] * n
    for i in range(n):
        norms[i] = Fraction(gram[i][i])
        for j in range(i):
            v = Fraction(gram[i][j])
            for k in range(j):
                v -= mu[i][k] * mu[j][k] * norms[k]
            mu[i][j] = v / norms[j]
            norms[i] -= mu[i][j] ** 2 * norms[j]
        if norms[i] <= 0:
            return None
    return mu, norms


def lll_reduce(A: IntMatrix) -> tuple:
    """LLL-reduce the basis of a definite Gram matrix, delta = 99/100.

    Returns (reduced_gram, T) with T unimodular and reduced_gram = T^t A T,
    both with the sign convention of the input.  Exact arithmetic
    throughout; raises NotDefinite on indefinite or degenerate input.
    """
    if not A.is_symmetric():
        raise ValueError("matrix is not symmetric")
    n = A.rows
    if n == 0:
        return A, IntMatrix.identity(0)
    neg = A.data[0][0] < 0
    G = [list(r) for r in (-A if neg else A).data]
    basis = [[int(i == j) for j in range(n)] for i in range(n)]  # rows = coeffs

    gs = _gram_schmidt(G)
    if gs is None:
        raise NotDefinite("gram matrix is not definite")
    mu, norms = gs

    def translate(k, j, q):
        # b_k <- b_k - q b_j; update basis, G and mu in place
        basis[k] = [a - q * b for a, b in zip(basis[k], basis[j])]
        for c in range(n):
            G[k][c] -= q * G[j][c]
        for r in range(n):
            G[r][k] -= q * G[r][j] if r != k else 0
        G[k][k] -= q * G[k][j]
        for c in range(j):
            mu[k][c] -= q * mu[j][c]
        mu[k][j] -= q

    k = 1
    while k < n:
        for j in range(k - 1, -1, -1):
            q = round(mu[k][j])
            if q:
                translate(k, j, q)
        if norms[k] >= (LLL_DELTA - mu[k][k - 1] ** 2) * norms[k - 1]:
            k += 1
        else:
            basis[k], basis[k - 1] = basis[k - 1], basis[k]
            G[k], G[k - 1] = G[k - 1], G[k]
            for row in G:
                row[k], row[k - 1] = row[k - 1], row[k]
            gs = _gram_schmidt(G)
            if gs is None:
                raise NotDefinite("gram matrix is not definite")
            mu, norms = gs
            k = max(k - 1, 1)

    T = IntMatrix(basis).transpose()
    red = T.T @ A @ T
    return red, T


def solve_rational(A: IntMatrix, b) -> tuple | None:
    """Solve A x = b exactly over Q; None when inconsistent.

    Underdetermined systems get free variables set to 0.  Entries of b
    may be ints or Fractions.
    """
    m, n = A.rows, A.cols
    M = [[Fraction(x) for x in row] + [Fraction(b[i])] for i, row in enumerate(A.data)]
    pivots = []
    r = 0
    for c in range(n):
        if r == m:
            break
        p = next((i for i in range(r, m) if M[i][c] != 0), None)
        if p is None:
            continue
        M[r], M[p] = M[p], M[r]
        pv = M[r][c]
        M[r] = [x / pv for x in M[r]]
        for i in range(m):
            if i != r and M[i][c] != 0:
                f = M[i][c]
                M[i] = [x - f * y for x, y in zip(M[i], M[r])]
        pivots.append(c)
        r += 1
    if any(M[i][n] != 0 for i in range(r, m)):
        return None
    x = [Fraction(0)] * n
    for i, c in enumerate(pivots):
        x[c] = M[i][n]
    return tuple(x)


def rational_inverse(A: IntMatrix):
    """Inverse of a nonsingular integer matrix, as rows of Fractions."""
    n = A.rows
    if n != A.cols:
        raise ValueError("inverse of non-square matrix")
    M = [
        [Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
        for i, row in enumerate(A.data)
    ]
    for c in range(n):
        p = next((i for i in range(c, n) if M[i][c] != 0), None)
        if p is None:
            raise SingularMatrix("matrix is singular")
        M[c], M[p] = M[p], M[c]
        pv = M[c][c]
        M[c] = [x / pv for x in M[c]]
        for i in range(n):
            if i != c and M[i][c] != 0:
                f = M[i][c]
                M[i] = [x - f * y for x, y in zip(M[i], M[c])]
    return [row[n:] for row in M]


def kernel_basis(A: IntMatrix) -> IntMatrix:
    """Basis (rows) of the saturated integer kernel {x : A x = 0}.

    The SNF right-transform columns matching zero invariant factors form
    a primitive basis, so the result is saturated in Z^cols.
    """
    snf = smith_normal_form(A)
    n = A.cols
    rank = sum(1 for d in snf.diag if d != 0)
    return IntMatrix(
        [tuple(snf.right.data[i][j] for i in range(n)) for j in range(rank, n)]
    )


def hnf_rows(rows) -> list:
    """Row-style Hermite normal form basis of the span of integer ``rows``.

    Pivots positive, entries above each pivot reduced into [0, pivot);
    zero rows dropped.  Returns a list of lists.
    """
    pool = [list(map(int, r)) for r in rows if any(r)]
    if not pool:
        return []
    ncols = len(pool[0])
    basis = []
    for col in range(ncols):
        if not pool:
            break
        cand = [r for r in pool if r[col] != 0]
        rest = [r for r in pool if r[col] == 0]
        if cand:
            piv = cand[0]
            for r in cand[1:]:
                if r[col] % piv[col] == 0:
                    q = r[col] // piv[col]
                    r[:] = [a - q * b for a, b in zip(r, piv)]
                else:
                    g, x, y = _xgcd(piv[col], r[col])
                    pj, rj = piv[col] // g, r[col] // g
                    new_piv = [x * a + y * b for a, b in zip(piv, r)]
                    r[:] = [-rj * a + pj * b for a, b in zip(piv, r)]
                    piv[:] = new_piv
                if any(r):
                    rest.append(r)
            basis.append(piv)
        pool = rest
    for idx in range(len(basis) - 1, -1, -1):
        row = basis[idx]
        j = next(i for i, x in enumerate(row) if x)
        if row[j] < 0:
            row[:] = [-x for x in row]
        for above in basis[:idx]:
            q = above[j] // row[j]
            if q:
                above[:] = [a - q * b for a, b in zip(above, row)]
    return basis
