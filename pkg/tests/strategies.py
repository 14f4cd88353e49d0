"""Hypothesis strategies for small exact polynomials and tensors."""

from fractions import Fraction

from hypothesis import strategies as st

from partpoisson.polycore import Polynomial, VarSpace

small_rationals = st.builds(Fraction, st.integers(-4, 4), st.integers(1, 3))


def polynomials(space: VarSpace, max_degree: int = 3, max_terms: int = 4):
    exps = st.lists(st.integers(0, max_degree), min_size=space.nvars, max_size=space.nvars).map(tuple)
    exps = exps.filter(lambda e: sum(e) <= max_degree)
    return st.dictionaries(exps, small_rationals, max_size=max_terms).map(lambda t: Polynomial(space, t))


def points(space: VarSpace):
    return st.lists(small_rationals, min_size=space.nvars, max_size=space.nvars)


def linear_polys(space: VarSpace):
    return polynomials(space, max_degree=1, max_terms=space.nvars + 1)
