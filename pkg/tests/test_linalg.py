from fractions import Fraction

import numpy as np
import sympy as sp
from hypothesis import given
from hypothesis import strategies as st

from oracles import to_sympy
from partpoisson import linalg
from partpoisson.polycore import VarSpace
from strategies import polynomials, small_rationals

matrices = st.integers(1, 4).flatmap(
    lambda r: st.integers(1, 4).flatmap(
        lambda c: st.lists(st.lists(small_rationals, min_size=c, max_size=c), min_size=r, max_size=r)))


@given(matrices)
def test_rank_matches_numpy(m):
    assert linalg.rank(m) == np.linalg.matrix_rank(np.array(m, dtype=float))


@given(matrices)
def test_nullspace_is_kernel(m):
    ns = linalg.nullspace(m, len(m[0]))
    assert len(ns) == len(m[0]) - linalg.rank(m)
    for v in ns:
        assert all(sum(a * b for a, b in zip(row, v)) == 0 for row in m)


@given(matrices, st.lists(small_rationals, min_size=4, max_size=4))
def test_solve_consistent_or_none(m, b):
    b = b[: len(m)]
    x = linalg.solve(m, b)
    if x is None:
        assert linalg.rank(m) < linalg.rank([row + [bi] for row, bi in zip(m, b)])
    else:
        assert [sum(a * xi for a, xi in zip(row, x)) for row in m] == b


def test_complete_rows_gives_basis():
    rows = [[1, 2, 0], [0, 0, 1]]
    full = linalg.complete_rows(rows)
    assert len(full) == 3 and linalg.rank(full) == 3
    assert full[:2] == [[Fraction(1), Fraction(2), Fraction(0)], [Fraction(0), Fraction(0), Fraction(1)]]


S2 = VarSpace.standard(2)
poly_square = st.integers(1, 3).flatmap(
    lambda n: st.lists(st.lists(polynomials(S2, 2, 3), min_size=n, max_size=n), min_size=n, max_size=n))


@given(poly_square)
def test_poly_det_matches_sympy(m):
    syms = sp.symbols(S2.all_names)
    expected = sp.expand(sp.Matrix([[to_sympy(v, syms) for v in r] for r in m]).det())
    assert sp.expand(to_sympy(linalg.poly_det(m, S2), syms) - expected) == 0


@given(poly_square)
def test_poly_rank_matches_sympy(m):
    syms = sp.symbols(S2.all_names)
    expected = sp.Matrix([[to_sympy(v, syms) for v in r] for r in m]).rank(simplify=True)
    assert linalg.poly_rank(m, S2) == expected


@given(poly_square)
def test_poly_nullspace_vectors_annihilate(m):
    for v in linalg.poly_nullspace(m, S2):
        assert any(not c.is_zero() for c in v)
        for row in m:
            acc = S2.zero()
            for a, b in zip(row, v):
                acc = acc + a * b
            assert acc.is_zero()


def test_poly_solve_cramer():
    x1, x2 = S2.coords()
    rows = [[x1, S2.one()], [S2.zero(), x2]]
    num, den = linalg.poly_solve(rows, [S2.one(), x2], S2)
    # x1 a + b = 1, x2 b = x2  ->  b = 1, a = 0
    assert [n.exact_div(den) for n in num] == [S2.zero(), S2.one()]
    assert linalg.poly_solve([[x1], [x2]], [S2.one(), S2.zero()], S2) is None


def test_minors_of_cross_product_matrix():
    S3 = VarSpace.standard(3)
    x1, x2, x3 = S3.coords()
    z = S3.zero()
    rows = [[z, x3, -x2], [-x3, z, x1], [x2, -x1, z]]
    found = {d for _, d in linalg.minors(rows, 2, S3)}
    assert x1**2 in found and x3**2 in found
    assert linalg.poly_det(rows, S3).is_zero()
