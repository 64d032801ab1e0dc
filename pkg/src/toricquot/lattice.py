"""Exact integer linear algebra: Hermite and Smith normal forms, integer kernels.

All arithmetic uses Python integers, so nothing overflows no matter how large
the unimodular transforms grow.

Conventions
-----------
Hermite normal form is row style: ``U @ A = H`` with ``H`` in row echelon
form, every pivot positive, and the entries above a pivot reduced into
``[0, pivot)``.  Zero rows of ``H`` sit at the bottom.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd
from typing import Iterable, Sequence

__all__ = [
    "IntMatrix",
    "SmithDecomposition",
    "hermite_normal_form",
    "smith_normal_form",
    "rational_kernel",
    "rank",
    "determinant",
    "is_unimodular",
    "primitive",
    "inverse_unimodular",
]


@dataclass(frozen=True)
class IntMatrix:
    """Immutable integer matrix with an explicit shape (so 0-row matrices keep their width)."""

    rows: int
    cols: int
    entries: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if len(self.entries) != self.rows:
            raise ValueError(f"expected {self.rows} rows, got {len(self.entries)}")
        for row in self.entries:
            if len(row) != self.cols:
                raise ValueError(f"ragged row of length {len(row)}, expected {self.cols}")
            for e in row:
                if not isinstance(e, int) or isinstance(e, bool):
                    raise TypeError(f"non-integer entry {e!r}")

    @classmethod
    def from_rows(cls, rows: Iterable[Sequence[int]], cols: int | None = None) -> "IntMatrix":
        data = []
        for row in rows:
            out = []
            for e in row:
                if isinstance(e, float):
                    if not e.is_integer():
                        raise TypeError(f"non-integer entry {e!r}")
                    e = int(e)
                out.append(int(e))
            data.append(tuple(out))
        if cols is None:
            if not data:
                raise ValueError("cols must be given for a matrix with no rows")
            cols = len(data[0])
        return cls(len(data), cols, tuple(data))

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls(n, n, tuple(tuple(int(i == j) for j in range(n)) for i in range(n)))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "IntMatrix":
        return cls(rows, cols, tuple((0,) * cols for _ in range(rows)))

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def __getitem__(self, idx):
        i, j = idx
        return self.entries[i][j]

    def tolist(self) -> list[list[int]]:
        return [list(r) for r in self.entries]

    @property
    def T(self) -> "IntMatrix":
        return IntMatrix(
            self.cols,
            self.rows,
            tuple(tuple(self.entries[i][j] for i in range(self.rows)) for j in range(self.cols)),
        )

    def column(self, j: int) -> tuple[int, ...]:
        return tuple(r[j] for r in self.entries)

    def select_columns(self, cols: Sequence[int]) -> "IntMatrix":
        return IntMatrix(self.rows, len(cols), tuple(tuple(r[j] for j in cols) for r in self.entries))

    def select_rows(self, rows: Sequence[int]) -> "IntMatrix":
        return IntMatrix(len(rows), self.cols, tuple(self.entries[i] for i in rows))

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        ocols = other.T.entries
        return IntMatrix(
            self.rows,
            other.cols,
            tuple(tuple(sum(a * b for a, b in zip(r, c)) for c in ocols) for r in self.entries),
        )

    def vecmul(self, c: Sequence[int]) -> tuple[int, ...]:
        """Row vector times matrix, ``c @ self``."""
        if len(c) != self.rows:
            raise ValueError(f"vector of length {len(c)} against {self.rows} rows")
        return tuple(sum(c[i] * self.entries[i][j] for i in range(self.rows)) for j in range(self.cols))

    def is_zero(self) -> bool:
        return all(e == 0 for r in self.entries for e in r)

    def __repr__(self):
        return f"IntMatrix({self.tolist()!r}, shape={self.shape})"


def _as_matrix(A) -> IntMatrix:
    if isinstance(A, IntMatrix):
        return A
    return IntMatrix.from_rows(A)


def _identity_rows(n: int) -> list[list[int]]:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (g, s, t) with s*a + t*b = g = gcd(a, b) >= 0."""
    s0, s1, t0, t1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    if a < 0:
        a, s0, t0 = -a, -s0, -t0
    return a, s0, t0


def hermite_normal_form(A) -> tuple[IntMatrix, IntMatrix]:
    """Row-style Hermite normal form.

    Returns ``(H, U)`` with ``U`` unimodular and ``U @ A == H`` exactly.

    >>> H, U = hermite_normal_form([[2, 4], [1, 3]])
    >>> H.tolist()
    [[1, 1], [0, 2]]
    """
    A = _as_matrix(A)
    m, n = A.shape
    H = [list(r) for r in A.entries]
    U = _identity_rows(m)
    pivot_row = 0
    for col in range(n):
        if pivot_row >= m:
            break
        # fold every lower entry of this column into the pivot row via 2x2 unimodular steps
        for i in range(pivot_row + 1, m):
            b = H[i][col]
            if b == 0:
                continue
            a = H[pivot_row][col]
            g, s, t = _xgcd(a, b)
            ag, bg = a // g, b // g
            rp, ri = H[pivot_row], H[i]
            H[pivot_row] = [s * x + t * y for x, y in zip(rp, ri)]
            H[i] = [-bg * x + ag * y for x, y in zip(rp, ri)]
            up, ui = U[pivot_row], U[i]
            U[pivot_row] = [s * x + t * y for x, y in zip(up, ui)]
            U[i] = [-bg * x + ag * y for x, y in zip(up, ui)]
        p = H[pivot_row][col]
        if p == 0:
            continue
        if p < 0:
            H[pivot_row] = [-x for x in H[pivot_row]]
            U[pivot_row] = [-x for x in U[pivot_row]]
            p = -p
        for i in range(pivot_row):
            q = H[i][col] // p
            if q:
                H[i] = [x - q * y for x, y in zip(H[i], H[pivot_row])]
                U[i] = [x - q * y for x, y in zip(U[i], U[pivot_row])]
        pivot_row += 1
    return IntMatrix.from_rows(H, n), IntMatrix.from_rows(U, m)


@dataclass(frozen=True)
class SmithDecomposition:
    """``U @ A @ V == D`` with ``U``, ``V`` unimodular and ``D`` diagonal, d_1 | d_2 | ..."""

    U: IntMatrix
    D: IntMatrix
    V: IntMatrix

    @property
    def diagonal(self) -> tuple[int, ...]:
        return tuple(self.D[i, i] for i in range(min(self.D.shape)))

    @property
    def rank(self) -> int:
        return sum(1 for d in self.diagonal if d != 0)

    @property
    def invariant_factors(self) -> tuple[int, ...]:
        """Nonzero diagonal entries."""
        return tuple(d for d in self.diagonal if d != 0)

    @property
    def torsion(self) -> tuple[int, ...]:
        """Invariant factors greater than one."""
        return tuple(d for d in self.diagonal if d > 1)


def smith_normal_form(A) -> SmithDecomposition:
    """Smith normal form with both transforms.

    >>> smith_normal_form([[2, 0], [0, 3]]).diagonal
    (1, 6)
    """
    A = _as_matrix(A)
    m, n = A.shape
    D = [list(r) for r in A.entries]
    U = _identity_rows(m)
    V = _identity_rows(n)

    def swap_rows(i, j):
        D[i], D[j] = D[j], D[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for r in D:
            r[i], r[j] = r[j], r[i]
        for r in V:
            r[i], r[j] = r[j], r[i]

    def add_row(dst, src, q):
        # row_dst += q * row_src
        D[dst] = [x + q * y for x, y in zip(D[dst], D[src])]
        U[dst] = [x + q * y for x, y in zip(U[dst], U[src])]

    def add_col(dst, src, q):
        for r in D:
            r[dst] += q * r[src]
        for r in V:
            r[dst] += q * r[src]

    for t in range(min(m, n)):
        best = None
        for i in range(t, m):
            for j in range(t, n):
                if D[i][j] and (best is None or abs(D[i][j]) < abs(D[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        swap_rows(t, best[0])
        swap_cols(t, best[1])
        while True:
            p = D[t][t]
            for i in range(t + 1, m):
                if D[i][t]:
                    add_row(i, t, -(D[i][t] // p))
            for j in range(t + 1, n):
                if D[t][j]:
                    add_col(j, t, -(D[t][j] // p))
            # remainders are strictly smaller than |p|; move the smallest into the pivot
            cand = None
            for i in range(t + 1, m):
                if D[i][t] and (cand is None or abs(D[i][t]) < cand[0]):
                    cand = (abs(D[i][t]), "r", i)
            for j in range(t + 1, n):
                if D[t][j] and (cand is None or abs(D[t][j]) < cand[0]):
                    cand = (abs(D[t][j]), "c", j)
            if cand is not None:
                if cand[1] == "r":
                    swap_rows(t, cand[2])
                else:
                    swap_cols(t, cand[2])
                continue
            bad = next(
                (i for i in range(t + 1, m) for j in range(t + 1, n) if D[i][j] % p),
                None,
            )
            if bad is None:
                break
            add_row(t, bad, 1)
        if D[t][t] < 0:
            D[t] = [-x for x in D[t]]
            U[t] = [-x for x in U[t]]
    return SmithDecomposition(
        IntMatrix.from_rows(U, m), IntMatrix.from_rows(D, n), IntMatrix.from_rows(V, n)
    )


def primitive(v: Sequence[int]) -> tuple[int, ...]:
    """Divide out the content and make the first nonzero entry positive."""
    g = 0
    for e in v:
        g = gcd(g, e)
    if g == 0:
        return tuple(v)
    out = [e // g for e in v]
    first = next(e for e in out if e)
    if first < 0:
        out = [-e for e in out]
    return tuple(out)


def rank(A) -> int:
    H, _ = hermite_normal_form(A)
    return sum(1 for r in H.entries if any(r))


def rational_kernel(A) -> list[tuple[int, ...]]:
    """Z-basis of the left kernel lattice ``{c in Z^k : c @ A = 0}``.

    The basis is returned in Hermite normal form, so it is canonical and every
    vector is primitive with a positive leading entry.
    """
    A = _as_matrix(A)
    H, U = hermite_normal_form(A)
    r = sum(1 for row in H.entries if any(row))
    kernel_rows = U.entries[r:]
    if not kernel_rows:
        return []
    K, _ = hermite_normal_form(IntMatrix.from_rows(kernel_rows, A.rows))
    return [primitive(row) for row in K.entries if any(row)]


def determinant(A) -> int:
    """Exact determinant by fraction-free (Bareiss) elimination."""
    A = _as_matrix(A)
    if A.rows != A.cols:
        raise ValueError("determinant of a non-square matrix")
    n = A.rows
    if n == 0:
        return 1
    M = [list(r) for r in A.entries]
    sign, prev = 1, 1
    for k in range(n - 1):
        if M[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if M[i][k]), None)
            if swap is None:
                return 0
            M[k], M[swap] = M[swap], M[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) // prev
        prev = M[k][k]
    return sign * M[n - 1][n - 1]


def is_unimodular(A) -> bool:
    A = _as_matrix(A)
    return A.rows == A.cols and determinant(A) in (1, -1)


def inverse_unimodular(A) -> IntMatrix:
    """Exact inverse of a unimodular matrix (Gauss-Jordan over the rationals)."""
    from fractions import Fraction

    A = _as_matrix(A)
    if not is_unimodular(A):
        raise ValueError("matrix is not unimodular")
    n = A.rows
    M = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(A.entries)]
    for c in range(n):
        p = next(i for i in range(c, n) if M[i][c] != 0)
        M[c], M[p] = M[p], M[c]
        piv = M[c][c]
        M[c] = [x / piv for x in M[c]]
        for i in range(n):
            if i != c and M[i][c] != 0:
                f = M[i][c]
                M[i] = [x - f * y for x, y in zip(M[i], M[c])]
    out = []
    for row in M:
        inv = row[n:]
        if any(x.denominator != 1 for x in inv):
            raise ArithmeticError("non-integral inverse of a unimodular matrix")
        out.append([int(x) for x in inv])
    return IntMatrix.from_rows(out, n)
