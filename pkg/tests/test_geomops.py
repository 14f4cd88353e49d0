from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from partpoisson.fields import OneOneTensor
from partpoisson.geomops import (
    AffineImmersion,
    LinearSubmersion,
    polynomial_casimirs,
    project_pn,
    project_poisson,
    rank_report,
    restrict_pn,
    restrict_poisson,
    sample_points,
)
from partpoisson.kdvlab import Grid, build_pair
from partpoisson.liepoisson import casimir_check, frozen_anchor, lp_anchor, sl2, so3
from partpoisson.partial import PartialAnchor
from partpoisson.polycore import DimensionError, VarSpace
from partpoisson.schouten import is_poisson
from partpoisson.verdict import FAIL, INDETERMINATE
from strategies import small_rationals

S2 = VarSpace.standard(2)
S4 = VarSpace(("q1", "p1", "q2", "p2"))


def canonical(space):
    n = space.dim
    rows = [["0"] * n for _ in range(n)]
    for a in range(0, n, 2):
        rows[a][a + 1], rows[a + 1][a] = "1", "-1"
    return PartialAnchor.from_strings(space, rows)


def diag(space, entries):
    n = space.dim
    return OneOneTensor(space, [[space.parse(str(entries[i])) if i == j else space.zero() for j in range(n)]
                                for i in range(n)])


FIRST_PLANE = AffineImmersion([[1, 0], [0, 1], [0, 0], [0, 0]])
ONTO_FIRST = LinearSubmersion([[1, 0, 0, 0], [0, 1, 0, 0]])


def test_rank_so3():
    P = lp_anchor(so3())
    rep = rank_report(P, samples=8, seed=3)
    assert rep.generic_rank == 2
    assert rep.sampled[0][1] == 0  # origin
    S = P.space
    dets = {d for _, d in rep.minors}
    assert S.parse("x1^2") in dets or -S.parse("x1^2") in dets
    assert S.parse("x3^2") in dets or -S.parse("x3^2") in dets
    assert rep.singular_samples and rep.max_sampled_rank == 2


def test_rank_canonical_and_zero():
    rep = rank_report(canonical(S4))
    assert rep.generic_rank == 4
    assert any(d.is_constant() and not d.is_zero() for _, d in rep.minors)
    zero = PartialAnchor.from_strings(S2, [["0", "0"], ["0", "0"]])
    assert rank_report(zero).generic_rank == 0


def test_sample_points_deterministic():
    assert sample_points(3, 5, 7) == sample_points(3, 5, 7)
    assert sample_points(3, 5, 7) != sample_points(3, 5, 8)


@given(st.lists(small_rationals, min_size=3, max_size=3), st.sampled_from([so3(), sl2()]))
def test_generic_rank_even(m0, g):
    P = lp_anchor(g) + frozen_anchor(g, m0)
    assert is_poisson(P).passed
    assert rank_report(P, samples=4).generic_rank % 2 == 0


def test_casimirs_so3():
    S = so3().space
    assert polynomial_casimirs(lp_anchor(so3()), 2) == [S.parse("x1^2 + x2^2 + x3^2")]


def test_casimirs_canonical_none():
    for d in (1, 2, 3):
        assert polynomial_casimirs(canonical(S2), d) == []


def test_casimirs_closed_under_products():
    P = lp_anchor(so3())
    found = polynomial_casimirs(P, 4)
    assert len(found) == 2
    for C in found:
        assert casimir_check(C, P).passed
    quad = next(C for C in found if C.degree() == 2)
    quartic = next(C for C in found if C.degree() == 4)
    # the square lies in the returned span: it is a multiple of the quartic generator
    sq = quad * quad
    ratio = sq.terms[max(sq.terms)] / quartic.terms[max(sq.terms)]
    assert sq == quartic * ratio


def test_casimirs_respect_admissibility():
    P = PartialAnchor.from_strings(VarSpace.standard(3), [["0", "0", "0"]], coflat=[[1, 0, 0]])
    # zero anchor on span{dx1}: Casimirs are exactly the polynomials in x1
    found = polynomial_casimirs(P, 2)
    assert len(found) == 2
    assert all(set(C.variables()) <= {0} for C in found)


def test_kdv_mass_is_recovered():
    P1, _ = build_pair(Grid(8))
    found = polynomial_casimirs(P1, 1)
    space = P1.space
    mass = sum(space.coords(), space.zero())
    # mass must lie in the span of the returned basis
    assert sum(found, space.zero()) == mass


def test_restrict_canonical4():
    res = restrict_poisson(canonical(S4), FIRST_PLANE)
    assert res.accepted
    assert res.anchor == canonical(S2)


def test_restrict_identity():
    P = lp_anchor(so3())
    res = restrict_poisson(P, AffineImmersion([[1, 0, 0], [0, 1, 0], [0, 0, 1]]))
    assert res.accepted and res.anchor == P


def test_restrict_so3_plane_rejected():
    P = lp_anchor(so3())
    for x0 in ([0, 0, 0], [0, 0, 1]):
        res = restrict_poisson(P, AffineImmersion([[1, 0], [0, 1], [0, 0]], x0))
        assert res.verdict.status == FAIL
        assert res.verdict.details[0].check == "RP1"
        assert res.verdict.witness is not None


def test_restrict_left_inverse_independent():
    imm = AffineImmersion([[1, 0], [1, 1], [0, 0], [0, 0]])
    assert imm.alternative_left_inverse() != imm.left_inverse
    res = restrict_poisson(canonical(S4), AffineImmersion([[1, 0], [0, 1], [0, 0], [0, 0]], [0, 0, 3, 5]))
    assert res.accepted
    names = [d.check for d in res.verdict.details]
    assert "left-inverse independence" in names


def test_restrict_higher_degree_indeterminate():
    S3 = VarSpace.standard(3)
    P = PartialAnchor.from_strings(S3, [["0", "x3^2", "0"], ["-x3^2", "0", "0"], ["0", "0", "0"]])
    res = restrict_poisson(P, AffineImmersion([[1, 0], [0, 1], [0, 0]]))
    assert res.verdict.status == INDETERMINATE


def test_restrict_dimension_mismatch():
    with pytest.raises(DimensionError):
        restrict_poisson(canonical(S2), FIRST_PLANE)
    with pytest.raises(ValueError):
        AffineImmersion([[1, 2], [2, 4]])


def test_project_canonical4():
    res = project_poisson(canonical(S4), ONTO_FIRST)
    assert res.accepted and res.anchor == canonical(S2)


def test_project_so3_rejected():
    res = project_poisson(lp_anchor(so3()), LinearSubmersion([[1, 0, 0], [0, 1, 0]]))
    v = res.verdict
    assert v.status == FAIL and v.where == (1, 2)
    assert v.witness == so3().space.var(2)
    assert "x3" in v.reason


@given(st.lists(st.integers(-2, 2), min_size=9, max_size=9))
def test_project_invertible_is_change_of_coordinates(entries):
    B = [entries[0:3], entries[3:6], entries[6:9]]
    try:
        sub = LinearSubmersion(B)
    except ValueError:
        return
    P = lp_anchor(so3())
    res = project_poisson(P, sub)
    assert res.accepted
    X = P.space
    Pm = P.to_bivector().rows
    Pr = res.anchor.to_bivector().rows
    y_of_x = [sum((X.var(j) * B[i][j] for j in range(3) if B[i][j]), X.zero()) for i in range(3)]
    for a in range(3):
        for b in range(3):
            expected = sum((Pm[i][j] * B[a][i] * B[b][j] for i in range(3) for j in range(3)), X.zero())
            assert Pr[a][b].substitute(y_of_x, X) == expected


def test_pn_identity_and_blocks():
    P = canonical(S4)
    Id = OneOneTensor.identity(S4)
    r = restrict_pn(P, Id, FIRST_PLANE)
    p = project_pn(P, Id, ONTO_FIRST)
    assert r.accepted and p.accepted
    assert r.nijenhuis == OneOneTensor.identity(S2) and p.nijenhuis == OneOneTensor.identity(S2)
    N = diag(S4, [2, 2, 3, 3])
    r, p = restrict_pn(P, N, FIRST_PLANE), project_pn(P, N, ONTO_FIRST)
    assert r.accepted and p.accepted
    assert r.nijenhuis == diag(S2, [2, 2]) == p.nijenhuis


def test_rpn_negative_control():
    rows = [[Fraction(int(i == j)) for j in range(4)] for i in range(4)]
    rows[2][0] = Fraction(1)  # N d_q1 picks up a d_q2 component
    v = restrict_pn(canonical(S4), OneOneTensor(S4, rows), FIRST_PLANE).verdict
    assert v.status == FAIL and v.where == (3, 1)
    assert "RpN" in v.reason


def test_ppn_negative_control():
    rows = [[Fraction(int(i == j)) for j in range(4)] for i in range(4)]
    rows[0][2] = Fraction(1)  # N^t dq1 picks up dq2
    v = project_pn(canonical(S4), OneOneTensor(S4, rows), ONTO_FIRST).verdict
    assert v.status == FAIL and "PpN" in v.reason
