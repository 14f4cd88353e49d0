from itertools import product

import sympy as sp
from hypothesis import given
from hypothesis import strategies as st

import oracles
from partpoisson.bistructures import (
    PNStructure,
    check_pn,
    check_pn1,
    check_pn2,
    check_pomega,
    concomitant,
    is_nijenhuis,
    omega_p_omega,
    pn_hierarchy,
    recursion_operator,
    torsion,
    torsion_pair,
    torsion_via_lie_derivatives,
)
from partpoisson.fields import OneForm, OneOneTensor, TwoForm, VecField, d_oneform
from partpoisson.liepoisson import lp_anchor, so3, sl2
from partpoisson.partial import PartialAnchor
from partpoisson.polycore import VarSpace
from partpoisson.schouten import is_poisson
from partpoisson.verdict import FAIL, NOT_APPLICABLE
from strategies import polynomials

S2 = VarSpace.standard(2)
S3 = VarSpace.standard(3)
S4 = VarSpace(("q1", "p1", "q2", "p2"))


def canonical(space):
    n = space.dim
    rows = [["0"] * n for _ in range(n)]
    for a in range(0, n, 2):
        rows[a][a + 1], rows[a + 1][a] = "1", "-1"
    return PartialAnchor.from_strings(space, rows)


def N_of(space, rows):
    return OneOneTensor(space, [[space.parse(str(v)) for v in r] for r in rows])


def poisson_suite():
    return [canonical(S2), canonical(S4), lp_anchor(so3()), lp_anchor(sl2()),
            PartialAnchor.from_strings(S3, [["0", "x3", "-x2"], ["-x3", "0", "x1"], ["x2", "-x1", "0"]],
                                       coflat=[[1, 0, 0], [0, 1, 0], [0, 0, 1]]),
            PartialAnchor.from_strings(S3, [["0", "1", "0"], ["-1", "0", "5"]], coflat=[[1, 0, 0], [0, 1, 0]])]


def test_torsion_examples():
    assert is_nijenhuis(N_of(S3, [[1, 2, 0], [3, 4, 5], [0, -1, 7]])).passed
    assert is_nijenhuis(N_of(S2, [["x1", 0], [0, "x2"]])).passed


def test_torsion_off_diagonal_against_oracle():
    N = N_of(S2, [[0, "x2"], [0, 0]])
    xs = oracles.symbols(S2)
    ref = oracles.torsion(oracles.matrix(N.rows, xs), xs)
    ours = torsion(N)
    for k, col in ref.items():
        assert [sp.expand(oracles.to_sympy(c, xs) - r) for c, r in zip(ours[k], col)] == [0, 0]


def test_torsion_negative_control():
    v = is_nijenhuis(N_of(S2, [["x2", 0], [0, "x1"]]))
    assert v.status == FAIL and v.where == (1, 2)
    assert not v.witness.is_zero()


n3_tensors = st.lists(st.lists(polynomials(S3, 1, 2), min_size=3, max_size=3), min_size=3, max_size=3).map(
    lambda r: OneOneTensor(S3, r))
fields3 = st.lists(polynomials(S3, 1, 2), min_size=3, max_size=3).map(lambda c: VecField(S3, c))


@given(n3_tensors)
def test_torsion_matches_sympy(N):
    xs = oracles.symbols(S3)
    ref = oracles.torsion(oracles.matrix(N.rows, xs), xs)
    ours = torsion(N)
    for k, col in ref.items():
        assert all(sp.expand(oracles.to_sympy(c, xs) - r) == 0 for c, r in zip(ours[k], col))


@given(n3_tensors, fields3, fields3)
def test_torsion_formula_equivalence(N, X, Y):
    assert torsion_pair(N, X, Y) == torsion_via_lie_derivatives(N, X, Y)


@given(n3_tensors, fields3, fields3, polynomials(S3, 1, 2))
def test_torsion_is_tensorial(N, X, Y, f):
    assert torsion_pair(N, X * f, Y) == torsion_pair(N, X, Y) * f


def test_concomitant_identity_vanishes():
    for P in poisson_suite():
        assert is_poisson(P).passed
        Id = OneOneTensor.identity(P.space)
        for a, th in enumerate(P.covectors()):
            for b in range(P.k):
                assert concomitant(P, Id, th, P.images[b]).is_zero()
        assert check_pn(P, Id).passed


def test_pn_examples():
    P = canonical(S2)
    assert check_pn(P, N_of(S2, [[3, 0], [0, 3]])).passed
    # diag(x1, x2): torsion-free, but not P-compatible on the plane
    v = check_pn(P, N_of(S2, [["x1", 0], [0, "x2"]]))
    assert v.status == FAIL and v.details[1].check == "pPN1"


def test_pn_not_applicable_for_non_poisson():
    P = PartialAnchor.from_strings(S3, [["0", "x1", "-x3"], ["-x1", "0", "x2"], ["x3", "-x2", "0"]])
    assert check_pn(P, OneOneTensor.identity(S3)).status == NOT_APPLICABLE


def test_pn1_requires_transpose_to_preserve_subspace():
    P = PartialAnchor.from_strings(S3, [["0", "1", "0"], ["-1", "0", "0"]], coflat=[[1, 0, 0], [0, 1, 0]])
    v = check_pn1(P, N_of(S3, [[1, 0, 1], [0, 1, 0], [0, 0, 1]]))
    assert v.failed and "preserve" in v.reason


def test_pn_search_on_plane():
    """Linear N on the canonical plane; pPN1 forces N to be a scalar function times Id there."""
    P = canonical(S2)
    entries = ["0", "1", "x1", "x2"]
    found = []
    for a, b, c, d in product(entries, repeat=4):
        N = N_of(S2, [[a, b], [c, d]])
        if check_pn(P, N).passed:
            found.append((a, b, c, d))
    assert ("1", "0", "0", "1") in found
    assert all(a == d and b == "0" and c == "0" for a, b, c, d in found)
    nonconstant = [f for f in found if f[0].startswith("x")]
    assert nonconstant
    x1 = nonconstant[0][0]
    hier = pn_hierarchy(PNStructure.checked(P, N_of(S2, [[x1, 0], [0, x1]])), 3)
    assert hier.passed
    assert hier.anchors[2].images[0] == VecField(S2, [0, S2.parse(f"{x1}^2")])


def test_pn2_negative_control():
    # pPN1 holds trivially for N = f Id; pPN2 is what rejects a badly chosen f in 4D
    P = canonical(S4)
    f = "q1*q2"
    N = N_of(S4, [[f if i == j else 0 for j in range(4)] for i in range(4)])
    assert is_nijenhuis(N).failed or check_pn2(P, N).failed


def test_hierarchy_scalar_cases():
    P = lp_anchor(so3())
    h = pn_hierarchy(PNStructure.checked(P, OneOneTensor.identity(S3)), 3)
    assert h.passed and all(A == P for A in h.anchors)
    two = N_of(S3, [[2, 0, 0], [0, 2, 0], [0, 0, 2]])
    h = pn_hierarchy(PNStructure.checked(P, two), 2)
    assert h.passed and h.anchors[2] == P.scale(4)


def test_hierarchy_non_scalar_4d():
    P = canonical(S4)
    N = N_of(S4, [["1 + q1^2 + p1", 0, 0, 0], [0, "1 + q1^2 + p1", 0, 0],
                  [0, 0, "2 + q2*p2", 0], [0, 0, 0, "2 + q2*p2"]])
    pn = PNStructure.checked(P, N)
    h = pn_hierarchy(pn, 2)
    assert h.passed
    for A in h.anchors:
        assert check_pn1(A, N).passed


def omega4(f, g):
    return TwoForm.from_upper(S4, {(0, 1): S4.parse(f), (2, 3): S4.parse(g)})


def test_pomega_examples_2d():
    P = canonical(S2)
    assert check_pomega(P, TwoForm.from_upper(S2, {(0, 1): 1})).passed
    om = TwoForm.from_upper(S2, {(0, 1): S2.parse("1 + x1^2")})
    assert check_pomega(P, om).passed
    N = recursion_operator(P, om)
    assert N.rows[0][0] == N.rows[1][1] and N.rows[0][1].is_zero()
    assert is_nijenhuis(N).passed


def test_omega_p_omega_against_matrix_product():
    P = canonical(S4)
    om = omega4("1 + q1^2 + p1", "2 + q2*p2")
    xs = oracles.symbols(S4)
    W, Pm = oracles.matrix(om.rows, xs), oracles.matrix(P.to_bivector().rows, xs)
    ours = oracles.matrix(omega_p_omega(P, om).rows, xs)
    assert sp.expand(ours - W * Pm * W) == sp.zeros(4, 4)


def test_pomega_4d_and_recursion():
    P = canonical(S4)
    om = omega4("1 + q1^2 + p1", "2 + q2*p2")
    assert check_pomega(P, om).passed
    assert is_nijenhuis(recursion_operator(P, om)).passed


def test_pomega_4d_negative():
    P = canonical(S4)
    exact = d_oneform(OneForm(S4, [0, S4.parse("q1*q2"), 0, 0]))
    om = TwoForm(S4, [[a + b for a, b in zip(r, s)] for r, s in zip(omega4("1", "1").rows, exact.rows)])
    v = check_pomega(P, om)
    assert v.status == FAIL and v.details[0].passed
    assert v.details[-1].check == "d(Omega P Omega)"
    assert is_nijenhuis(recursion_operator(P, om)).failed


def test_pomega_not_closed():
    v = check_pomega(canonical(S4), omega4("1 + q2", "1"))
    assert v.failed and v.details[0].check == "d Omega" and v.details[0].failed


def test_omega_outside_subspace():
    P = PartialAnchor.from_strings(S3, [["0", "1", "0"], ["-1", "0", "0"]], coflat=[[1, 0, 0], [0, 1, 0]])
    v = check_pomega(P, TwoForm.from_upper(S3, {(0, 2): 1}))
    assert v.failed and "E-valued" in v.reason


@given(polynomials(VarSpace(("q1", "p1")), 2, 3), polynomials(S4, 1, 2))
def test_pomega_implies_nijenhuis(f, h):
    om = TwoForm.from_upper(S4, {(0, 1): f.lift(S4) + 1, (2, 3): 2, (0, 2): h})
    P = canonical(S4)
    if check_pomega(P, om).passed:
        assert is_nijenhuis(recursion_operator(P, om)).passed
