import pytest
from hypothesis import given
from hypothesis import strategies as st

from partpoisson.fields import (
    Bivector,
    OneForm,
    OneOneTensor,
    TwoForm,
    VecField,
    apply_bivector,
    apply_oneone,
    apply_oneone_transpose,
    apply_twoform,
    d_oneform,
    d_twoform,
    differential,
    is_closed,
    lie_bracket,
    lie_derivative_oneform,
    lie_derivative_oneone,
    pairing,
)
from partpoisson.polycore import DimensionError, VarSpace
from strategies import polynomials

S2 = VarSpace.standard(2)
S3 = VarSpace.standard(3)
x1, x2, x3 = S3.coords()


def fields(space, deg=2):
    return st.lists(polynomials(space, deg, 3), min_size=space.dim, max_size=space.dim).map(lambda c: VecField(space, c))


def forms(space, deg=2):
    return st.lists(polynomials(space, deg, 3), min_size=space.dim, max_size=space.dim).map(lambda c: OneForm(space, c))


def oneones(space, deg=1):
    return st.lists(st.lists(polynomials(space, deg, 2), min_size=space.dim, max_size=space.dim),
                    min_size=space.dim, max_size=space.dim).map(lambda r: OneOneTensor(space, r))


def e(i, space=S3):
    return VecField.basis(space, i)


def test_bracket_examples():
    assert lie_bracket(e(0), e(1)).is_zero()
    X = VecField(S3, [0, x1, 0])
    assert lie_bracket(X, e(0)) == -e(1)


def test_lie_derivative_oneform_examples():
    assert lie_derivative_oneform(e(0), OneForm.basis(S3, 1)).is_zero()
    X = VecField(S3, [x2, 0, 0])
    assert lie_derivative_oneform(X, OneForm.basis(S3, 0)) == OneForm.basis(S3, 1)


def test_pairing_examples():
    assert pairing(OneForm.basis(S3, 0), e(0)) == 1
    assert pairing(OneForm.basis(S3, 0), VecField(S3, [0, x2, 0])).is_zero()
    assert pairing(OneForm(S3, [x1, 1, 0]), VecField(S3, [1, x1, 0])) == 2 * x1


def test_d_twoform_examples():
    assert d_twoform(TwoForm.from_upper(S3, {(0, 1): 3, (1, 2): -1}))[(0, 1, 2)].is_zero()
    omega = TwoForm.from_upper(S3, {(0, 1): x3})
    assert d_twoform(omega)[(0, 1, 2)] == 1
    exact = d_oneform(OneForm(S3, [0, 0, x1 * x2]))
    assert is_closed(exact)


def test_convention_canonical_plane():
    P = Bivector.from_upper(S2, {(0, 1): 1})
    assert apply_bivector(P, OneForm.basis(S2, 0)) == VecField.basis(S2, 1)


def test_validation():
    with pytest.raises(ValueError):
        Bivector(S2, [[0, 1], [1, 0]])
    with pytest.raises(ValueError):
        TwoForm(S2, [[1, 0], [0, 0]])
    with pytest.raises(DimensionError):
        VecField(S2, [1, 2, 3])
    with pytest.raises(DimensionError):
        lie_bracket(VecField.basis(S2, 0), e(0))


def test_identity_tensor():
    X = VecField(S3, [x1, x2 * x3, 1])
    assert apply_oneone(OneOneTensor.identity(S3), X) == X
    assert lie_derivative_oneone(X, OneOneTensor.identity(S3)).is_zero()
    N = OneOneTensor(S3, [[1, 2, 0], [0, 3, 1], [5, 0, 0]])
    assert lie_derivative_oneone(e(0), N).is_zero()


@given(fields(S3), fields(S3), fields(S3))
def test_bracket_jacobi(X, Y, Z):
    total = lie_bracket(lie_bracket(X, Y), Z) + lie_bracket(lie_bracket(Y, Z), X) + lie_bracket(lie_bracket(Z, X), Y)
    assert total.is_zero()
    assert lie_bracket(X, X).is_zero()


@given(fields(S3), forms(S3), fields(S3))
def test_cartan_identity(X, alpha, Y):
    lhs = pairing(lie_derivative_oneform(X, alpha), Y)
    assert lhs == X(pairing(alpha, Y)) - pairing(alpha, lie_bracket(X, Y))


@given(fields(S3), forms(S3), polynomials(S3, 2, 3))
def test_lie_derivative_leibniz(X, alpha, f):
    assert lie_derivative_oneform(X, alpha * f) == alpha * X(f) + lie_derivative_oneform(X, alpha) * f


@given(forms(S3, 3))
def test_d_squared_zero(alpha):
    assert is_closed(d_oneform(alpha))


@given(fields(S3), oneones(S3))
def test_lie_derivative_oneone_matches_component_formula(X, N):
    L = lie_derivative_oneone(X, N)
    n = 3
    for i in range(n):
        for j in range(n):
            # (L_X N)^i_j = X(N^i_j) - sum_k N^k_j d_k X^i + sum_k N^i_k d_j X^k
            expected = X(N.rows[i][j])
            for k in range(n):
                expected = expected - N.rows[k][j] * X[i].diff(k) + N.rows[i][k] * X[k].diff(j)
            assert L.rows[i][j] == expected


@given(fields(S3), oneones(S3), forms(S3))
def test_transpose_adjoint(X, N, alpha):
    assert pairing(alpha, apply_oneone(N, X)) == pairing(apply_oneone_transpose(N, alpha), X)


@given(forms(S3, 1), forms(S3, 1), st.lists(polynomials(S3, 1, 2), min_size=3, max_size=3))
def test_bivector_pairing_antisymmetric(alpha, beta, upper):
    P = Bivector.from_upper(S3, {(0, 1): upper[0], (0, 2): upper[1], (1, 2): upper[2]})
    assert pairing(alpha, apply_bivector(P, beta)) == -pairing(beta, apply_bivector(P, alpha))


def test_twoform_application():
    omega = TwoForm.from_upper(S2, {(0, 1): 1})
    assert apply_twoform(omega, VecField.basis(S2, 1)) == OneForm.basis(S2, 0)
    assert differential(S2.parse("x1*x2")) == OneForm(S2, S2.parse("x1*x2").gradient())
