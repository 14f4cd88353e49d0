"""Exact linear algebra over Q and over Q[x] (fraction-free).

Rational matrices are lists of lists of ``Fraction``.  Polynomial matrices are
lists of lists of :class:`Polynomial`; their rank and solutions are computed
over the field of rational functions by Bareiss elimination, which only ever
needs exact polynomial division.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations
from typing import Sequence

from .polycore import Polynomial, VarSpace

Matrix = list[list[Fraction]]


def to_fractions(rows) -> Matrix:
    return [[Fraction(v) for v in row] for row in rows]


def rref(rows) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form and the pivot columns."""
    m = to_fractions(rows)
    nrows = len(m)
    ncols = len(m[0]) if m else 0
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, nrows) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = 1 / m[r][c]
        m[r] = [v * inv for v in m[r]]
        for i in range(nrows):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return m, pivots


def rank(rows) -> int:
    if not rows or not rows[0]:
        return 0
    return len(rref(rows)[1])


def nullspace(rows, ncols: int | None = None) -> Matrix:
    """Basis of {v : M v = 0}, one vector per free column, in RREF normal form."""
    if not rows:
        n = ncols or 0
        return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    ncols = len(rows[0])
    r, pivots = rref(rows)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for i, p in enumerate(pivots):
            v[p] = -r[i][f]
        basis.append(v)
    return basis


def solve(rows, rhs) -> list[Fraction] | None:
    """One solution of M v = rhs (free variables set to 0), or None."""
    ncols = len(rows[0])
    aug = [list(row) + [b] for row, b in zip(rows, rhs)]
    r, pivots = rref(aug)
    if ncols in pivots:
        return None
    v = [Fraction(0)] * ncols
    for i, p in enumerate(pivots):
        v[p] = r[i][ncols]
    return v


def inverse(rows) -> Matrix:
    n = len(rows)
    aug = [list(row) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(rows)]
    r, pivots = rref(aug)
    if pivots[:n] != list(range(n)) or len(pivots) < n:
        raise ValueError("matrix is singular")
    return [row[n:] for row in r]


def matmul(a, b) -> Matrix:
    return [[sum((x * y for x, y in zip(row, col)), Fraction(0)) for col in zip(*b)] for row in a]


def transpose(a):
    return [list(col) for col in zip(*a)]


def identity(n: int) -> Matrix:
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


def complete_rows(rows) -> Matrix:
    """Extend independent rows to a basis by appending standard unit rows."""
    out = [list(map(Fraction, r)) for r in rows]
    n = len(out[0])
    for i in range(n):
        if len(out) == n:
            break
        e = [Fraction(int(j == i)) for j in range(n)]
        if rank(out + [e]) > len(out):
            out.append(e)
    return out


# -- polynomial matrices -------------------------------------------------


def _bareiss(m: list[list[Polynomial]], space: VarSpace):
    """In-place fraction-free echelon form; returns (pivot_rows, pivot_cols).

    ``pivot_rows`` are indices into the *original* row order.
    """
    nrows = len(m)
    ncols = len(m[0]) if m else 0
    order = list(range(nrows))
    prev = space.one()
    r = 0
    pcols = []
    for c in range(ncols):
        piv = next((i for i in range(r, nrows) if not m[i][c].is_zero()), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        order[r], order[piv] = order[piv], order[r]
        pr = m[r]
        for i in range(r + 1, nrows):
            row = m[i]
            lead = row[c]
            for j in range(c + 1, ncols):
                num = pr[c] * row[j] - lead * pr[j]
                q = num.exact_div(prev)
                if q is None:  # pragma: no cover - Bareiss division is exact
                    raise ArithmeticError("inexact Bareiss division")
                row[j] = q
            row[c] = space.zero()
        prev = pr[c]
        pcols.append(c)
        r += 1
        if r == nrows:
            break
    return order[:r], pcols


def poly_rank(rows: Sequence[Sequence[Polynomial]], space: VarSpace) -> int:
    """Rank over the rational-function field Q(x)."""
    if not rows or not rows[0]:
        return 0
    m = [list(r) for r in rows]
    return len(_bareiss(m, space)[1])


def poly_pivots(rows, space: VarSpace) -> tuple[list[int], list[int]]:
    if not rows or not rows[0]:
        return [], []
    m = [list(r) for r in rows]
    return _bareiss(m, space)


def poly_det(rows: Sequence[Sequence[Polynomial]], space: VarSpace) -> Polynomial:
    n = len(rows)
    if n == 0:
        return space.one()
    m = [list(r) for r in rows]
    order = list(range(n))
    prev = space.one()
    sign = 1
    for c in range(n):
        piv = next((i for i in range(c, n) if not m[i][c].is_zero()), None)
        if piv is None:
            return space.zero()
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            order[c], order[piv] = order[piv], order[c]
            sign = -sign
        for i in range(c + 1, n):
            for j in range(c + 1, n):
                q = (m[c][c] * m[i][j] - m[i][c] * m[c][j]).exact_div(prev)
                if q is None:  # pragma: no cover
                    raise ArithmeticError("inexact Bareiss division")
                m[i][j] = q
            m[i][c] = space.zero()
        prev = m[c][c]
    d = m[n - 1][n - 1]
    return d if sign > 0 else -d


def poly_solve(rows, rhs, space: VarSpace):
    """Solve M v = rhs over Q(x).

    Returns ``(numerators, denominator)`` with ``v = numerators / denominator``
    (free unknowns set to zero), or ``None`` when the system is inconsistent.
    """
    ncols = len(rows[0])
    prow, pcol = poly_pivots(rows, space)
    rho = len(pcol)
    if rho == 0:
        den = space.one()
        num = [space.zero()] * ncols
    else:
        sub = [[rows[i][j] for j in pcol] for i in prow]
        den = poly_det(sub, space)
        num = [space.zero()] * ncols
        for t, j in enumerate(pcol):
            replaced = [[rhs[i] if s == t else sub[a][s] for s in range(rho)] for a, i in enumerate(prow)]
            num[j] = poly_det(replaced, space)
    for row, b in zip(rows, rhs):
        acc = -b * den
        for a, v in zip(row, num):
            if not a.is_zero() and not v.is_zero():
                acc = acc + a * v
        if not acc.is_zero():
            return None
    return num, den


def poly_nullspace(rows, space: VarSpace):
    """Basis of the kernel over Q(x), each vector with polynomial entries."""
    ncols = len(rows[0])
    prow, pcol = poly_pivots(rows, space)
    free = [c for c in range(ncols) if c not in pcol]
    basis = []
    for f in free:
        rhs = [-r[f] for r in rows]
        sol = poly_solve(rows, rhs, space)
        num, den = sol
        v = list(num)
        v[f] = den
        basis.append(v)
    return basis


def minors(rows, size: int, space: VarSpace):
    """All ``size`` x ``size`` minors as ``((row_idx, col_idx), det)``."""
    nrows, ncols = len(rows), len(rows[0])
    for ri in combinations(range(nrows), size):
        for ci in combinations(range(ncols), size):
            yield (ri, ci), poly_det([[rows[i][j] for j in ci] for i in ri], space)


def eval_matrix(rows, point) -> Matrix:
    return [[p.eval(point) for p in row] for row in rows]
