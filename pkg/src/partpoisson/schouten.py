"""Jacobiators, mixed Schouten brackets, compatibility and pencils."""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations

from .fields import Bivector, lie_derivative_oneform, pairing
from .partial import CoflatBasis, PartialAnchor, check_partial_antisymmetry
from .polycore import Polynomial, VarSpace
from .verdict import NOT_APPLICABLE, Verdict


class SchoutenTensor:
    """Fully antisymmetric trilinear form on the covector subspace.

    Only entries with ``a < b < c`` are stored; other orderings are expanded
    by the permutation sign.
    """

    def __init__(self, basis: CoflatBasis, space: VarSpace, entries: dict[tuple[int, int, int], Polynomial]):
        self.basis = basis
        self.space = space
        self.entries = dict(entries)

    def __getitem__(self, abc) -> Polynomial:
        if len(set(abc)) < 3:
            return self.space.zero()
        order = sorted(range(3), key=lambda t: abc[t])
        key = tuple(abc[t] for t in order)
        inversions = sum(1 for i in range(3) for j in range(i + 1, 3) if order[i] > order[j])
        v = self.entries.get(key, self.space.zero())
        return -v if inversions % 2 else v

    def is_zero(self) -> bool:
        return all(v.is_zero() for v in self.entries.values())

    def first_nonzero(self):
        for key in sorted(self.entries):
            if not self.entries[key].is_zero():
                return key, self.entries[key]
        return None

    def _combine(self, other: "SchoutenTensor", op) -> "SchoutenTensor":
        keys = set(self.entries) | set(other.entries)
        z = self.space.zero()
        return SchoutenTensor(self.basis, self.space,
                              {k: op(self.entries.get(k, z), other.entries.get(k, z)) for k in keys})

    def __add__(self, other):
        return self._combine(other, lambda a, b: a + b)

    def __sub__(self, other):
        return self._combine(other, lambda a, b: a - b)

    def scale(self, r) -> "SchoutenTensor":
        return SchoutenTensor(self.basis, self.space, {k: v * r for k, v in self.entries.items()})

    def __eq__(self, other):
        if not isinstance(other, SchoutenTensor):
            return NotImplemented
        return (self - other).is_zero()

    def render(self):
        return {",".join(str(i + 1) for i in k): v.render() for k, v in sorted(self.entries.items())}


def jacobiator(P: PartialAnchor) -> SchoutenTensor:
    """Cyclic sum ``<L_{P th_a} th_b, P th_c>`` + cyclic, over ``a < b < c``.

    With constant covectors this equals the cyclic sum of iterated brackets
    of the linear functions ``F_a``.
    """
    th = P.covectors()
    im = P.images
    cache = {}

    def term(a, b, c):
        key = (a, b)
        if key not in cache:
            cache[key] = lie_derivative_oneform(im[a], th[b])
        return pairing(cache[key], im[c])

    entries = {}
    for a, b, c in combinations(range(P.k), 3):
        entries[(a, b, c)] = term(a, b, c) + term(b, c, a) + term(c, a, b)
    return SchoutenTensor(P.basis, P.space, entries)


def coordinate_jacobiator(P: Bivector) -> dict[tuple[int, int, int], Polynomial]:
    """``J^ijk = sum_l (P^il d_l P^jk + P^jl d_l P^ki + P^kl d_l P^ij)`` for i<j<k."""
    n = P.space.dim
    R = P.rows
    out = {}
    for i, j, k in combinations(range(n), 3):
        total = P.space.zero()
        for l in range(n):
            for a, b, c in ((i, j, k), (j, k, i), (k, i, j)):
                if not R[a][l].is_zero():
                    d = R[b][c].diff(l)
                    if not d.is_zero():
                        total = total + R[a][l] * d
        out[(i, j, k)] = total
    return out


def is_poisson(P: PartialAnchor) -> Verdict:
    anti = check_partial_antisymmetry(P)
    if not anti:
        return Verdict.fail("jacobi", anti.witness, where=anti.where,
                            reason="anchor fails partial antisymmetry", details=[anti])
    J = jacobiator(P)
    hit = J.first_nonzero()
    if hit is None:
        return Verdict.ok("jacobi")
    (a, b, c), v = hit
    return Verdict.fail("jacobi", v, where=(a + 1, b + 1, c + 1), reason="Schouten bracket is not identically zero")


def mixed_schouten(P: PartialAnchor, Q: PartialAnchor) -> SchoutenTensor:
    """``[P, Q] = ([P+Q, P+Q] - [P, P] - [Q, Q]) / 2``."""
    total = jacobiator(P + Q)
    return (total - jacobiator(P) - jacobiator(Q)).scale(Fraction(1, 2))


def is_compatible(P: PartialAnchor, Q: PartialAnchor) -> Verdict:
    for label, A in (("P", P), ("Q", Q)):
        v = is_poisson(A)
        if not v:
            return Verdict("compatibility", NOT_APPLICABLE, witness=v.witness, where=v.where,
                           reason=f"{label} is not Poisson: {v.reason}", details=[v])
    M = mixed_schouten(P, Q)
    hit = M.first_nonzero()
    if hit is None:
        return Verdict.ok("compatibility")
    (a, b, c), v = hit
    return Verdict.fail("compatibility", v, where=(a + 1, b + 1, c + 1),
                        reason="mixed Schouten bracket is not identically zero")


def pencil_anchor(P: PartialAnchor, Q: PartialAnchor, two_parameter: bool = False):
    """``P + lam Q`` (or ``lam P + mu Q``) over the space extended by the parameters."""
    params = ("lam", "mu") if two_parameter else ("lam",)
    names = set(P.space.all_names)
    params = tuple(p if p not in names else p + "_" for p in params)
    space = P.space.extend(params)
    Pl, Ql = P.lift(space), Q.lift(space)
    lam = space.param(params[0])
    if two_parameter:
        mu = space.param(params[1])
        return Pl.scale(lam) + Ql.scale(mu), space, params
    return Pl + Ql.scale(lam), space, params


def pencil_check(P: PartialAnchor, Q: PartialAnchor, two_parameter: bool = False) -> Verdict:
    """Jacobiator of the pencil vanishes identically in coordinates and parameters."""
    name = "pencil (lam, mu)" if two_parameter else "pencil (lam)"
    pencil, space, params = pencil_anchor(P, Q, two_parameter)
    J = jacobiator(pencil)
    hit = J.first_nonzero()
    if hit is None:
        return Verdict.ok(name)
    (a, b, c), v = hit
    lam_index = space.index(params[0])
    parts = {f"{params[0]}^{k}": coeff.render() for k, coeff in v.coefficients_in(lam_index).items()}
    return Verdict.fail(name, v, where=(a + 1, b + 1, c + 1),
                        reason=f"pencil Jacobiator nonzero; coefficients by power of {params[0]}: {parts}")
