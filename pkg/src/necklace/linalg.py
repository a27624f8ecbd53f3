"""Exact linear algebra over Q(i).

Matrices are lists of rows of :class:`Scalar`.  Ranks come from two
independent eliminations: Gauss-Jordan over the field and a fraction-free
Bareiss pass over Z[i] after clearing denominators row by row.
"""

from __future__ import annotations

from collections.abc import Sequence
from math import lcm

from .scalars import ONE, ZERO, Scalar, as_scalar

Matrix = list[list[Scalar]]

__all__ = [
    "Matrix",
    "bareiss_rank",
    "column_space_basis",
    "conjugate_matrix",
    "is_zero_matrix",
    "matmul",
    "matvec",
    "nullspace",
    "rank",
    "rref",
    "solve",
    "to_matrix",
    "zeros",
]


def to_matrix(rows: Sequence[Sequence]) -> Matrix:
    return [[as_scalar(x) for x in row] for row in rows]


def zeros(m: int, n: int) -> Matrix:
    return [[ZERO] * n for _ in range(m)]


def matmul(a: Matrix, b: Matrix, inner: int | None = None) -> Matrix:
    n = len(b[0]) if b else 0
    k = len(b) if inner is None else inner
    out = zeros(len(a), n)
    for i, row in enumerate(a):
        for t in range(k):
            x = row[t]
            if x.is_zero():
                continue
            brow = b[t]
            orow = out[i]
            for j in range(n):
                if not brow[j].is_zero():
                    orow[j] = orow[j] + x * brow[j]
    return out


def matvec(a: Matrix, v: Sequence[Scalar]) -> list[Scalar]:
    out = []
    for row in a:
        acc = ZERO
        for x, y in zip(row, v):
            if not x.is_zero() and not y.is_zero():
                acc = acc + x * y
        out.append(acc)
    return out


def is_zero_matrix(a: Matrix) -> bool:
    return all(x.is_zero() for row in a for x in row)


def conjugate_matrix(a: Matrix) -> Matrix:
    return [[x.conjugate() for x in row] for row in a]


def rref(a: Matrix) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form and pivot columns (left to right)."""
    m = [list(row) for row in a]
    rows = len(m)
    cols = len(m[0]) if m else 0
    pivots: list[int] = []
    r = 0
    for col in range(cols):
        if r == rows:
            break
        piv = next((i for i in range(r, rows) if not m[i][col].is_zero()), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = m[r][col].inverse()
        m[r] = [x * inv for x in m[r]]
        for i in range(rows):
            if i != r and not m[i][col].is_zero():
                f = m[i][col]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(col)
        r += 1
    return m, pivots


def rank(a: Matrix) -> int:
    if not a or not a[0]:
        return 0
    return len(rref(a)[1])


def _clear_denominators(row: list[Scalar]) -> list[Scalar]:
    d = 1
    for x in row:
        d = lcm(d, x.re.denominator, x.im.denominator)
    return [x * d for x in row]


def bareiss_rank(a: Matrix) -> int:
    """Rank by fraction-free elimination; all intermediate entries stay in Z[i]."""
    if not a or not a[0]:
        return 0
    m = [_clear_denominators(list(row)) for row in a]
    rows, cols = len(m), len(m[0])
    prev = ONE
    r = 0
    for col in range(cols):
        if r == rows:
            break
        piv = next((i for i in range(r, rows) if not m[i][col].is_zero()), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        p = m[r][col]
        for i in range(r + 1, rows):
            f = m[i][col]
            new = []
            for j in range(cols):
                v = (p * m[i][j] - f * m[r][j]) / prev
                if v.re.denominator != 1 or v.im.denominator != 1:
                    raise ArithmeticError("fraction-free step left Z[i]")
                new.append(v)
            m[i] = new
        prev = p
        r += 1
    return r


def nullspace(a: Matrix, ncols: int | None = None) -> list[list[Scalar]]:
    """Basis of ``{x : a x = 0}``: one vector per free column, with that entry 1."""
    n = ncols if ncols is not None else (len(a[0]) if a else 0)
    if not a:
        return [[ONE if i == j else ZERO for i in range(n)] for j in range(n)]
    R, pivots = rref(a)
    free = [j for j in range(n) if j not in pivots]
    basis = []
    for fcol in free:
        v = [ZERO] * n
        v[fcol] = ONE
        for row, pc in enumerate(pivots):
            v[pc] = -R[row][fcol]
        basis.append(v)
    return basis


def solve(a: Matrix, b: Sequence[Scalar], ncols: int | None = None) -> list[Scalar] | None:
    """A solution of ``a x = b`` with free variables set to 0, or ``None``."""
    n = ncols if ncols is not None else (len(a[0]) if a else 0)
    if not a:
        return [ZERO] * n if all(x.is_zero() for x in b) else None
    aug = [list(row) + [as_scalar(v)] for row, v in zip(a, b)]
    R, pivots = rref(aug)
    if n in pivots:
        return None
    x = [ZERO] * n
    for row, pc in enumerate(pivots):
        x[pc] = R[row][n]
    return x


def column_space_basis(a: Matrix) -> list[int]:
    """Indices of a maximal independent set of columns."""
    if not a or not a[0]:
        return []
    return rref(a)[1]
