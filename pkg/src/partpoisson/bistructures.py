"""Nijenhuis torsion, PN and P-Omega structures, recursion operators."""

from __future__ import annotations

from dataclasses import dataclass

from .fields import (
    OneForm,
    OneOneTensor,
    TwoForm,
    VecField,
    apply_oneone,
    apply_oneone_transpose,
    apply_twoform,
    d_twoform,
    lie_bracket,
    lie_derivative_oneform,
    lie_derivative_oneone,
)
from .partial import CoflatDecompositionError, PartialAnchor, check_partial_antisymmetry
from .schouten import is_poisson, mixed_schouten
from .verdict import NOT_APPLICABLE, Verdict


def torsion_pair(N: OneOneTensor, X: VecField, Y: VecField) -> VecField:
    """``T(N)(X,Y) = [NX,NY] - N([NX,Y] + [X,NY] - N[X,Y])``."""
    NX, NY = apply_oneone(N, X), apply_oneone(N, Y)
    inner = lie_bracket(NX, Y) + lie_bracket(X, NY) - apply_oneone(N, lie_bracket(X, Y))
    return lie_bracket(NX, NY) - apply_oneone(N, inner)


def torsion(N: OneOneTensor) -> dict[tuple[int, int], VecField]:
    """Torsion on coordinate fields, entries ``(i, j)`` with ``i < j``."""
    space = N.space
    basis = [VecField.basis(space, i) for i in range(space.dim)]
    return {(i, j): torsion_pair(N, basis[i], basis[j])
            for i in range(space.dim) for j in range(i + 1, space.dim)}


def is_nijenhuis(N: OneOneTensor) -> Verdict:
    for (i, j), v in sorted(torsion(N).items()):
        if not v.is_zero():
            return Verdict.fail("torsion", v, where=(i + 1, j + 1), reason="T(N)(d_i, d_j) is not zero")
    return Verdict.ok("torsion")


def torsion_via_lie_derivatives(N: OneOneTensor, X: VecField, Y: VecField) -> VecField:
    """``(L_{NX} N - N o L_X N) Y``; equals the torsion."""
    A = lie_derivative_oneone(apply_oneone(N, X), N)
    B = N.compose(lie_derivative_oneone(X, N))
    return apply_oneone(A, Y) - apply_oneone(B, Y)


def concomitant(P: PartialAnchor, N: OneOneTensor, alpha: OneForm, X: VecField) -> VecField:
    """``R(P,N)(alpha,X) = L_{P alpha}(N) X - P(L_X(N^t alpha)) + P(L_{NX} alpha)``.

    The two one-form terms are combined before ``P`` is applied, so only their
    difference has to lie in the covector subspace.
    """
    first = apply_oneone(lie_derivative_oneone(P.apply(alpha), N), X)
    beta = lie_derivative_oneform(apply_oneone(N, X), alpha) - lie_derivative_oneform(X, apply_oneone_transpose(N, alpha))
    return first + P.apply(beta)


def check_pn1(P: PartialAnchor, N: OneOneTensor) -> Verdict:
    """``N o P = P o N^t`` on every basis covector."""
    for a, theta in enumerate(P.covectors()):
        lhs = apply_oneone(N, P.images[a])
        try:
            rhs = P.apply(apply_oneone_transpose(N, theta))
        except CoflatDecompositionError as err:
            return Verdict.fail("pPN1", err.residual, where=(a + 1,), reason="N^t does not preserve E")
        diff = lhs - rhs
        if not diff.is_zero():
            return Verdict.fail("pPN1", diff, where=(a + 1,), reason="N(P theta_a) - P(N^t theta_a) is not zero")
    return Verdict.ok("pPN1")


def check_pn2(P: PartialAnchor, N: OneOneTensor) -> Verdict:
    """Concomitant on ``alpha = theta_a`` and ``X = P theta_b``."""
    th = P.covectors()
    for a in range(P.k):
        for b in range(P.k):
            try:
                R = concomitant(P, N, th[a], P.images[b])
            except CoflatDecompositionError as err:
                return Verdict.fail("pPN2", err.residual, where=(a + 1, b + 1),
                                    reason="Lie-derivative term leaves E; P cannot be applied")
            if not R.is_zero():
                return Verdict.fail("pPN2", R, where=(a + 1, b + 1), reason="R(P,N)(theta_a, P theta_b) is not zero")
    return Verdict.ok("pPN2")


def check_pn(P: PartialAnchor, N: OneOneTensor) -> Verdict:
    pois = is_poisson(P)
    if not pois:
        return Verdict("PN structure", NOT_APPLICABLE, witness=pois.witness, where=pois.where,
                       reason=f"anchor is not Poisson: {pois.reason}", details=[pois])
    parts = [is_nijenhuis(N), check_pn1(P, N), check_pn2(P, N)]
    return Verdict.combine("PN structure", parts)


@dataclass(frozen=True)
class PNStructure:
    anchor: PartialAnchor
    nijenhuis: OneOneTensor

    @classmethod
    def checked(cls, P: PartialAnchor, N: OneOneTensor) -> "PNStructure":
        v = check_pn(P, N)
        if not v:
            raise ValueError(f"not a PN structure: {v.reason or v.status}")
        return cls(P, N)


@dataclass
class Hierarchy:
    anchors: list[PartialAnchor]
    verdicts: list[Verdict]

    @property
    def passed(self) -> bool:
        return all(v.passed for v in self.verdicts)


def pn_hierarchy(pn: PNStructure, depth: int) -> Hierarchy:
    """``P_k = N^k P`` for k = 1..depth, with antisymmetry and pairwise compatibility.

    The returned ``anchors`` list starts with ``P_0 = P``.
    """
    P, N = pn.anchor, pn.nijenhuis
    anchors = [P]
    verdicts = []
    for k in range(1, depth + 1):
        Pk = anchors[-1].compose(N)
        anti = check_partial_antisymmetry(Pk)
        if not anti:
            raise ValueError(f"P_{k} = N^{k} P is not antisymmetric (pPN1 violated upstream): {anti.witness}")
        anchors.append(Pk)
        verdicts.append(Verdict(f"P_{k} antisymmetry", anti.status))
        verdicts.append(_rename(is_poisson(Pk), f"P_{k} jacobi"))
        verdicts.append(_rename(check_pn1(Pk, N), f"P_{k} pPN1"))
    for i in range(len(anchors)):
        for j in range(i + 1, len(anchors)):
            M = mixed_schouten(anchors[i], anchors[j])
            hit = M.first_nonzero()
            if hit is None:
                verdicts.append(Verdict.ok(f"[P_{i}, P_{j}]"))
            else:
                (a, b, c), v = hit
                verdicts.append(Verdict.fail(f"[P_{i}, P_{j}]", v, where=(a + 1, b + 1, c + 1),
                                             reason="mixed Schouten bracket is not zero"))
    return Hierarchy(anchors, verdicts)


def _rename(v: Verdict, name: str) -> Verdict:
    v.check = name
    return v


# -- P-Omega ------------------------------------------------------------------


def omega_images(P: PartialAnchor, omega: TwoForm) -> list[VecField]:
    """``P(Omega d_i)`` for each coordinate field; raises if Omega leaves E."""
    space = P.space
    return [P.apply(apply_twoform(omega, VecField.basis(space, i))) for i in range(space.dim)]


def omega_p_omega(P: PartialAnchor, omega: TwoForm) -> TwoForm:
    """``(Omega P Omega)(X, Y) = <Omega(P(Omega X)), Y>`` as a matrix."""
    images = omega_images(P, omega)
    rows = [list(apply_twoform(omega, v).components) for v in images]
    return TwoForm(P.space, rows)


def check_pomega(P: PartialAnchor, omega: TwoForm) -> Verdict:
    pois = is_poisson(P)
    if not pois:
        return Verdict("P-Omega structure", NOT_APPLICABLE, witness=pois.witness, where=pois.where,
                       reason=f"anchor is not Poisson: {pois.reason}", details=[pois])
    parts = []
    closed = _closedness(omega, "d Omega")
    parts.append(closed)
    space = P.space
    for i in range(space.dim):
        alpha = apply_twoform(omega, VecField.basis(space, i))
        try:
            P.basis.decompose(alpha)
        except CoflatDecompositionError as err:
            parts.append(Verdict.fail("Omega E-valued", err.residual, where=(i + 1,), reason="Omega not E-valued"))
            return Verdict.combine("P-Omega structure", parts)
    parts.append(Verdict.ok("Omega E-valued"))
    parts.append(_closedness(omega_p_omega(P, omega), "d(Omega P Omega)"))
    return Verdict.combine("P-Omega structure", parts)


def _closedness(omega: TwoForm, name: str) -> Verdict:
    for (i, j, k), v in sorted(d_twoform(omega).items()):
        if not v.is_zero():
            return Verdict.fail(name, v, where=(i + 1, j + 1, k + 1), reason="exterior derivative is not zero")
    return Verdict.ok(name)


def recursion_operator(P: PartialAnchor, omega: TwoForm) -> OneOneTensor:
    """``N = P o Omega``; column j is ``P(Omega d_j)``."""
    return OneOneTensor.from_columns(omega_images(P, omega))
