import pytest
from hypothesis import given
from hypothesis import strategies as st

from partpoisson.fields import Bivector, OneForm, VecField, differential, pairing
from partpoisson.partial import (
    AdmissibilityError,
    CoflatBasis,
    CoflatDecompositionError,
    PartialAnchor,
    bracket_closure_check,
    check_matrix_antisymmetry,
    check_partial_antisymmetry,
    full_anchor,
    hamiltonian_field,
    is_admissible,
    partial_bracket,
)
from partpoisson.polycore import DimensionError, VarSpace
from strategies import polynomials

S2 = VarSpace.standard(2)
S3 = VarSpace.standard(3)


def canonical_plane():
    return PartialAnchor.from_strings(S2, [["0", "1"], ["-1", "0"]])


def test_partial_antisymmetry_examples():
    good = PartialAnchor.from_strings(S3, [["0", "1", "0"], ["-1", "0", "5"]], coflat=[[1, 0, 0], [0, 1, 0]])
    assert check_partial_antisymmetry(good).passed
    bad = PartialAnchor.from_strings(S3, [["0", "1", "0"], ["1", "0", "0"]], coflat=[[1, 0, 0], [0, 1, 0]])
    v = check_partial_antisymmetry(bad)
    assert not v.passed
    assert v.where == (1, 2)
    assert v.witness == 2


def test_free_component_breaks_naive_extension():
    P = PartialAnchor.from_strings(S3, [["0", "1", "0"], ["-1", "0", "5"]], coflat=[[1, 0, 0], [0, 1, 0]])
    v = check_matrix_antisymmetry(P.naive_extension())
    assert not v.passed
    assert v.where == (2, 3)


def test_decompose_examples():
    basis = CoflatBasis(S3, [[1, 0, 0]])
    x3 = S3.var(2)
    assert basis.decompose(OneForm(S3, [x3, 0, 0])) == [x3]
    with pytest.raises(CoflatDecompositionError):
        CoflatBasis(S3, [[1, 0, 0], [0, 1, 0]]).decompose(OneForm.basis(S3, 2))


def test_non_coordinate_basis():
    basis = CoflatBasis(S3, [[1, 1, 0], [0, 1, -1]])
    alpha = OneForm(S3, [2, 5, -3])
    coeffs = basis.decompose(alpha)
    assert [str(c) for c in coeffs] == ["2", "3"]
    assert basis.contains(alpha)
    assert not basis.contains(OneForm.basis(S3, 0))


def test_basis_validation():
    with pytest.raises(ValueError):
        CoflatBasis(S2, [[1, 0], [2, 0]])
    with pytest.raises(DimensionError):
        CoflatBasis(S2, [[1, 0, 0]])
    with pytest.raises(ValueError):
        CoflatBasis(S2, [])


def test_admissibility_classification():
    basis = CoflatBasis(S2, [[1, 0]])
    x1, x2 = S2.coords()
    assert is_admissible(x1 * x1, basis)
    for f in (x2, x1 * x2):
        r = is_admissible(f, basis)
        assert not r and r.order == 1


def test_admissibility_reports_higher_order():
    # powers of F = x1 + 2 x2 stay inside span{dx1 + 2 dx2}; x1 * F does not
    basis = CoflatBasis(S2, [[1, 2]])
    F = S2.parse("x1 + 2*x2")
    assert is_admissible(F * F * F, basis)
    assert not is_admissible(S2.parse("x1*x1 + 2*x1*x2"), basis)


def test_hamiltonian_field_canonical():
    P = canonical_plane()
    x1 = S2.var(0)
    assert hamiltonian_field(x1 * x1 / 2, P) == VecField(S2, [0, x1])


def test_bracket_convention():
    P = canonical_plane()
    x1, x2 = S2.coords()
    assert partial_bracket(x1, x2, P) == 1


def test_bracket_rejects_inadmissible():
    P = PartialAnchor.from_strings(S3, [["0", "1", "0"], ["-1", "0", "0"]], coflat=[[1, 0, 0], [0, 1, 0]])
    with pytest.raises(AdmissibilityError):
        partial_bracket(S3.var(2), S3.var(0), P)


def test_closure_examples():
    coflat = [[1, 0, 0], [0, 1, 0]]
    x1, x2, _ = S3.coords()
    bad = PartialAnchor.from_strings(S3, [["0", "x3", "0"], ["-x3", "0", "0"]], coflat=coflat)
    v = bracket_closure_check(bad, [x1, x2])
    assert not v.passed and v.where == (1, 2)
    good = PartialAnchor.from_strings(S3, [["0", "1", "0"], ["-1", "0", "0"]], coflat=coflat)
    assert bracket_closure_check(good, [x1, x2]).passed


def test_full_anchor_roundtrip():
    P = Bivector.from_upper(S3, {(0, 1): S3.var(2), (1, 2): S3.var(0), (0, 2): -S3.var(1)})
    assert full_anchor(P).to_bivector() == P
    with pytest.raises(ValueError):
        PartialAnchor.from_strings(S3, [["0", "1", "0"]], coflat=[[1, 0, 0]]).to_bivector()


@given(st.lists(polynomials(S2, 2, 3), min_size=3, max_size=3), polynomials(S2, 2, 3))
def test_bracket_antisymmetric_and_leibniz(fgh, p):
    f, g, h = fgh
    P = PartialAnchor.from_strings(S2, [[0, p], [-p, 0]])
    assert partial_bracket(f, g, P) == -partial_bracket(g, f, P)
    assert partial_bracket(f, g * h, P) == partial_bracket(f, g, P) * h + g * partial_bracket(f, h, P)


@given(st.lists(polynomials(S2, 2, 3), min_size=2, max_size=2), polynomials(S2, 2, 3))
def test_two_bracket_forms_agree(fg, p):
    f, g = fg
    P = PartialAnchor.from_strings(S2, [[0, p], [-p, 0]])
    assert partial_bracket(f, g, P) == -pairing(differential(f), P(differential(g)))


@given(st.integers(-3, 3), st.integers(-3, 3))
def test_admissible_functions_closed_under_products(a, b):
    basis = CoflatBasis(S3, [[1, 0, 0], [0, 1, 1]])
    F1, F2 = basis.linear_function(0), basis.linear_function(1)
    f = F1 * F1 * a + F1 * F2 * b + F2
    assert is_admissible(f, basis)
    assert is_admissible(f * f, basis)
