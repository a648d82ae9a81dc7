"""Exact linear algebra over Q.

Matrices are tuples of row tuples of ``Fraction``; a matrix with zero
columns still carries its row count (``((),) * n``).  Everything here is a
pure function returning fresh immutable values.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

Matrix = tuple[tuple[Fraction, ...], ...]
Vector = tuple[Fraction, ...]


def q(x) -> Fraction:
    """Coerce ints, Fractions and ``"p/q"`` strings to a Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not scalars")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"cannot read {x!r} as an exact rational")


def fmt(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def mat(rows: Iterable[Iterable]) -> Matrix:
    out = tuple(tuple(q(v) for v in row) for row in rows)
    if len({len(r) for r in out}) > 1:
        raise ValueError("ragged matrix")
    return out


def vec(entries: Iterable) -> Vector:
    return tuple(q(v) for v in entries)


def shape(A: Matrix, ncols: int | None = None) -> tuple[int, int]:
    if not A:
        return (0, ncols or 0)
    return (len(A), len(A[0]))


def zeros(r: int, c: int) -> Matrix:
    z = Fraction(0)
    return tuple(tuple(z for _ in range(c)) for _ in range(r))


def identity(n: int) -> Matrix:
    return tuple(tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n))


def transpose(A: Matrix, ncols: int | None = None) -> Matrix:
    r, c = shape(A, ncols)
    return tuple(tuple(A[i][j] for i in range(r)) for j in range(c))


def matmul(A: Matrix, B: Matrix, inner: int | None = None, ncols: int | None = None) -> Matrix:
    """Product of an r x k and a k x c matrix.

    ``inner``/``ncols`` are only needed when a factor has no rows.
    """
    r = len(A)
    k = len(A[0]) if A else (inner or 0)
    c = len(B[0]) if B else (ncols or 0)
    if B and len(B) != k:
        raise ValueError(f"shape mismatch {r}x{k} @ {len(B)}x{c}")
    Bt = list(zip(*B)) if B else [()] * c
    zero = Fraction(0)
    out = []
    for row in A:
        nz = [(j, a) for j, a in enumerate(row) if a]
        out.append(tuple(sum((a * col[j] for j, a in nz), zero) for col in Bt))
    return tuple(out)


def matvec(A: Matrix, v: Sequence[Fraction]) -> Vector:
    zero = Fraction(0)
    return tuple(sum((a * x for a, x in zip(row, v) if a and x), zero) for row in A)


def add(A: Matrix, B: Matrix) -> Matrix:
    return tuple(tuple(a + b for a, b in zip(ra, rb)) for ra, rb in zip(A, B))


def sub(A: Matrix, B: Matrix) -> Matrix:
    return tuple(tuple(a - b for a, b in zip(ra, rb)) for ra, rb in zip(A, B))


def scale(c, A: Matrix) -> Matrix:
    c = q(c)
    return tuple(tuple(c * a for a in row) for row in A)


def is_zero(A: Matrix) -> bool:
    return all(not a for row in A for a in row)


def hstack(blocks: Sequence[Matrix], nrows: int) -> Matrix:
    return tuple(tuple(x for B in blocks for x in (B[i] if B else ())) for i in range(nrows))


def columns(A: Matrix, ncols: int | None = None) -> list[Vector]:
    return list(transpose(A, ncols))


def from_columns(cols: Sequence[Sequence[Fraction]], nrows: int) -> Matrix:
    if not cols:
        return tuple(() for _ in range(nrows))
    return transpose(tuple(tuple(c) for c in cols))


def rref(A: Matrix, ncols: int | None = None) -> tuple[Matrix, tuple[int, ...]]:
    """Reduced row echelon form and pivot columns."""
    r, c = shape(A, ncols)
    M = [list(row) for row in A]
    pivots: list[int] = []
    row = 0
    for col in range(c):
        if row == r:
            break
        piv = next((i for i in range(row, r) if M[i][col]), None)
        if piv is None:
            continue
        M[row], M[piv] = M[piv], M[row]
        inv = 1 / M[row][col]
        M[row] = [x * inv for x in M[row]]
        for i in range(r):
            if i != row and M[i][col]:
                f = M[i][col]
                M[i] = [x - f * y for x, y in zip(M[i], M[row])]
        pivots.append(col)
        row += 1
    return tuple(tuple(x) for x in M), tuple(pivots)


def rank(A: Matrix, ncols: int | None = None) -> int:
    return len(rref(A, ncols)[1])


def nullspace(A: Matrix, ncols: int | None = None) -> list[Vector]:
    """Basis of {x : Ax = 0}, one vector per free column."""
    r, c = shape(A, ncols)
    R, piv = rref(A, c)
    free = [j for j in range(c) if j not in piv]
    basis = []
    for f in free:
        x = [Fraction(0)] * c
        x[f] = Fraction(1)
        for i, p in enumerate(piv):
            x[p] = -R[i][f]
        basis.append(tuple(x))
    return basis


def column_basis(A: Matrix, ncols: int | None = None) -> Matrix:
    """Columns of A at the pivot positions: a basis of the column space."""
    r, c = shape(A, ncols)
    _, piv = rref(A, c)
    cols = columns(A, c)
    return from_columns([cols[j] for j in piv], r)


def complement_basis(B: Matrix, n: int) -> Matrix:
    """Standard basis vectors spanning a complement of the column span of B.

    The choice is the set of non-pivot coordinates of rref(B^T), so it is
    deterministic.
    """
    k = len(B[0]) if B and B[0] else 0
    if k == 0:
        return identity(n)
    _, piv = rref(transpose(B), n)
    I = identity(n)
    return from_columns([I[j] for j in range(n) if j not in piv], n)


def solve(A: Matrix, b: Sequence[Fraction], ncols: int | None = None) -> Vector | None:
    """One solution of Ax = b, or None if inconsistent."""
    r, c = shape(A, ncols)
    aug = tuple(tuple(row) + (bi,) for row, bi in zip(A, b))
    R, piv = rref(aug, c + 1)
    if c in piv:
        return None
    x = [Fraction(0)] * c
    for i, p in enumerate(piv):
        x[p] = R[i][c]
    return tuple(x)


def solve_matrix(A: Matrix, B: Matrix, ncols: int | None = None) -> Matrix | None:
    """X with AX = B (column by column), or None."""
    r, c = shape(A, ncols)
    sols = []
    for col in columns(B):
        x = solve(A, col, c)
        if x is None:
            return None
        sols.append(x)
    return from_columns(sols, c)


def inverse(A: Matrix) -> Matrix:
    n = len(A)
    aug = tuple(tuple(row) + tuple(irow) for row, irow in zip(A, identity(n)))
    R, piv = rref(aug, 2 * n)
    if piv[:n] != tuple(range(n)):
        raise ZeroDivisionError("matrix is singular")
    return tuple(row[n:] for row in R)


def det(A: Matrix) -> Fraction:
    n = len(A)
    M = [list(r) for r in A]
    out = Fraction(1)
    for col in range(n):
        piv = next((i for i in range(col, n) if M[i][col]), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            M[col], M[piv] = M[piv], M[col]
            out = -out
        out *= M[col][col]
        for i in range(col + 1, n):
            if M[i][col]:
                f = M[i][col] / M[col][col]
                M[i] = [x - f * y for x, y in zip(M[i], M[col])]
    return out


def span_contains(B: Matrix, v: Sequence[Fraction], n: int) -> bool:
    k = len(B[0]) if B and B[0] else 0
    if k == 0:
        return all(not x for x in v)
    return solve(B, v, k) is not None


def subspace_contains(B: Matrix, C: Matrix, n: int) -> bool:
    """Column span of C inside column span of B."""
    return all(span_contains(B, c, n) for c in columns(C) if C and C[0])


class SparseSystem:
    """Homogeneous linear system kept in reduced echelon form as rows arrive.

    Rows are dicts ``{column: coefficient}``.  Used for the large but very
    sparse constraint systems of the form solver.
    """

    def __init__(self, nvars: int):
        self.nvars = nvars
        self.rows: dict[int, dict[int, Fraction]] = {}  # pivot column -> row

    def add(self, row: dict[int, Fraction]) -> bool:
        """Add an equation; return True if it was independent."""
        r = {j: c for j, c in row.items() if c}
        # stored rows are fully reduced, so one pass clears every pivot
        for p in [p for p in r if p in self.rows]:
            f = r[p]
            for j, c in self.rows[p].items():
                v = r.get(j, 0) - f * c
                if v:
                    r[j] = v
                else:
                    r.pop(j, None)
        if not r:
            return False
        p = min(r)
        inv = 1 / r[p]
        r = {j: c * inv for j, c in r.items()}
        for other in self.rows.values():
            f = other.get(p)
            if f:
                for j, c in r.items():
                    v = other.get(j, 0) - f * c
                    if v:
                        other[j] = v
                    else:
                        other.pop(j, None)
        self.rows[p] = r
        return True

    @property
    def rank(self) -> int:
        return len(self.rows)

    def nullspace(self) -> list[Vector]:
        free = [j for j in range(self.nvars) if j not in self.rows]
        out = []
        for f in free:
            x = [Fraction(0)] * self.nvars
            x[f] = Fraction(1)
            for p, row in self.rows.items():
                c = row.get(f)
                if c:
                    x[p] = -c
            out.append(tuple(x))
        return out
