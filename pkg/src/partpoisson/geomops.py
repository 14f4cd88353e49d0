"""Rank of the characteristic distribution, Casimir search, restriction and projection.

Restriction and projection work in the affine/linear category: submanifolds are
images of affine immersions ``x = x0 + A s`` and quotients are linear
submersions ``y = B x``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations_with_replacement
from math import comb

from . import linalg
from .bistructures import check_pn
from .fields import OneForm, OneOneTensor, VecField, differential
from .liepoisson import casimir_check
from .partial import CoflatBasis, PartialAnchor
from .polycore import DimensionError, Polynomial, VarSpace
from .schouten import is_poisson
from .verdict import INDETERMINATE, Verdict

# -- characteristic distribution ---------------------------------------------


@dataclass
class RankReport:
    generic_rank: int
    sampled: list[tuple[tuple[Fraction, ...], int]]
    minors: list[tuple[tuple[tuple[int, ...], tuple[int, ...]], Polynomial]] | None
    notes: list[str] = field(default_factory=list)

    @property
    def max_sampled_rank(self) -> int:
        return max((r for _, r in self.sampled), default=0)

    @property
    def singular_samples(self) -> list[tuple[Fraction, ...]]:
        """Sampled points outside the maximal-rank open set."""
        return [p for p, r in self.sampled if r < self.generic_rank]

    def to_dict(self) -> dict:
        out = {
            "generic_rank": self.generic_rank,
            "max_sampled_rank": self.max_sampled_rank,
            "samples": [{"point": [str(v) for v in p], "rank": r} for p, r in self.sampled],
        }
        if self.minors is not None:
            out["minors"] = [{"rows": [i + 1 for i in ri], "cols": [j + 1 for j in ci], "det": d.render()}
                             for (ri, ci), d in self.minors]
        if self.notes:
            out["notes"] = list(self.notes)
        return out


def sample_points(n: int, samples: int, seed: int) -> list[tuple[Fraction, ...]]:
    """Origin followed by seeded small rational points."""
    rng = random.Random(seed)
    pts = [tuple(Fraction(0) for _ in range(n))]
    while len(pts) < samples:
        pts.append(tuple(Fraction(rng.randint(-9, 9), rng.randint(1, 5)) for _ in range(n)))
    return pts[:max(samples, 1)]


def _coords_only(P: PartialAnchor):
    if P.space.params:
        raise DimensionError("anchor depends on formal parameters; fix them first")


def rank_report(P: PartialAnchor, samples: int = 16, seed: int = 0, max_minors: int = 4000) -> RankReport:
    _coords_only(P)
    space = P.space
    rows = [list(im.components) for im in P.images]  # k x n
    generic = linalg.poly_rank(rows, space)
    sampled = [(pt, linalg.rank(linalg.eval_matrix(rows, pt))) for pt in sample_points(space.dim, samples, seed)]
    notes = []
    if max(r for _, r in sampled) < generic:
        notes.append("no sample reached the generic rank")
    minors = None
    if generic == 0:
        minors = []
    elif comb(P.k, generic) * comb(space.dim, generic) <= max_minors:
        minors = [(idx, d) for idx, d in linalg.minors(rows, generic, space) if not d.is_zero()]
    else:
        notes.append("too many minors; symbolic description of the singular set omitted")
    return RankReport(generic, sampled, minors, notes)


# -- Casimirs -----------------------------------------------------------------


def _monomials(n: int, degree: int):
    out = []
    for d in range(1, degree + 1):
        for combo in combinations_with_replacement(range(n), d):
            e = [0] * n
            for i in combo:
                e[i] += 1
            out.append(tuple(e))
    return out


def polynomial_casimirs(P: PartialAnchor, max_degree: int) -> list[Polynomial]:
    """Basis, modulo constants, of admissible polynomial Casimirs of degree <= d.

    Both conditions are linear in the coefficients: admissibility is
    ``v(C) = 0`` for every tangent direction ``v`` annihilated by the covector
    subspace, and ``P(dC) = 0`` is taken componentwise.
    """
    if max_degree < 1:
        raise ValueError("max_degree must be at least 1")
    _coords_only(P)
    space = P.space
    n = space.dim
    mons = _monomials(n, max_degree)
    mons.sort(key=lambda e: (sum(e), e), reverse=True)
    ann = P.basis.annihilator
    eq_index: dict[tuple, int] = {}
    columns = []
    for e in mons:
        m = Polynomial(space, {e: 1})
        col = {}
        for t, v in enumerate(ann):
            dv = sum((m.diff(i) * c for i, c in enumerate(v) if c), space.zero())
            for exp, c in dv.terms.items():
                col[("ann", t, exp)] = c
        coeffs = P.basis.coefficients(differential(m))
        img = VecField.zero(space)
        for c, im in zip(coeffs, P.images):
            if not c.is_zero():
                img = img + im * c
        for i, comp in enumerate(img):
            for exp, c in comp.terms.items():
                col[("P", i, exp)] = c
        for key in col:
            eq_index.setdefault(key, len(eq_index))
        columns.append(col)
    if not eq_index:
        kernel = linalg.identity(len(mons))
    else:
        keys = sorted(eq_index, key=eq_index.get)
        matrix = [[col.get(key, Fraction(0)) for col in columns] for key in keys]
        kernel = linalg.nullspace(matrix, len(mons))
    if not kernel:
        return []
    reduced, pivots = linalg.rref(kernel)
    out = []
    for row in reduced[: len(pivots)]:
        C = Polynomial(space, {e: c for e, c in zip(mons, row) if c})
        if not casimir_check(C, P):  # pragma: no cover - guaranteed by the linear system
            raise ArithmeticError(f"solver returned a non-Casimir {C.render()}")
        out.append(C)
    return out


# -- maps ---------------------------------------------------------------------


class AffineImmersion:
    """``s -> x0 + A s`` with ``A`` of full column rank."""

    def __init__(self, A, x0=None):
        self.A = linalg.to_fractions(A)
        self.n = len(self.A)
        self.m = len(self.A[0]) if self.A else 0
        if self.m == 0 or any(len(r) != self.m for r in self.A):
            raise DimensionError("A must be a non-empty rectangular matrix")
        if linalg.rank(self.A) != self.m:
            raise ValueError("A must have full column rank")
        self.x0 = [Fraction(v) for v in (x0 if x0 is not None else [0] * self.n)]
        if len(self.x0) != self.n:
            raise DimensionError(f"x0 must have {self.n} entries")
        At = linalg.transpose(self.A)
        self.left_inverse = linalg.matmul(linalg.inverse(linalg.matmul(At, self.A)), At)
        # covectors vanishing on the tangent directions of S
        self.conormal = linalg.nullspace(At, self.n) if self.m < self.n else []

    def alternative_left_inverse(self):
        """A second left inverse, differing from the first by a conormal term."""
        if not self.conormal:
            return self.left_inverse
        l = self.conormal[0]
        return [[v + (Fraction(i + 1) * l[j]) for j, v in enumerate(row)] for i, row in enumerate(self.left_inverse)]

    def substitution(self, target: VarSpace) -> list[Polynomial]:
        s = target.coords()
        return [sum((s[j] * a for j, a in enumerate(row) if a), Polynomial.constant(target, x))
                for row, x in zip(self.A, self.x0)]


class LinearSubmersion:
    """``x -> B x`` with ``B`` of full row rank."""

    def __init__(self, B):
        self.B = linalg.to_fractions(B)
        self.m = len(self.B)
        self.n = len(self.B[0]) if self.B else 0
        if self.m == 0 or any(len(r) != self.n for r in self.B):
            raise DimensionError("B must be a non-empty rectangular matrix")
        if linalg.rank(self.B) != self.m:
            raise ValueError("B must have full row rank")
        self.adapted = linalg.complete_rows(self.B)
        self.adapted_inverse = linalg.inverse(self.adapted)


@dataclass
class Induced:
    """Outcome of a restriction or projection; rejections carry a witness."""

    verdict: Verdict
    anchor: PartialAnchor | None = None
    nijenhuis: OneOneTensor | None = None

    @property
    def accepted(self) -> bool:
        return self.verdict.passed


def _mat_poly(const, polys, space):
    """Constant matrix times polynomial matrix."""
    cols = len(polys[0]) if polys else 0
    return [[sum((polys[t][j] * c for t, c in enumerate(row) if c), space.zero()) for j in range(cols)]
            for row in const]


def _poly_mat(polys, const, space):
    """Polynomial matrix times constant matrix."""
    cols = len(const[0]) if const else 0
    return [[sum((row[t] * const[t][j] for t in range(len(const)) if const[t][j]), space.zero())
             for j in range(cols)] for row in polys]


def _target_space(m: int, names) -> VarSpace:
    return VarSpace(tuple(names)) if names else VarSpace.standard(m)


def _row_basis(vectors) -> list[list[Fraction]]:
    if not vectors:
        return []
    R, piv = linalg.rref(vectors)
    return [R[i] for i in range(len(piv))]


# -- restriction --------------------------------------------------------------


def restrict_poisson(P: PartialAnchor, imm: AffineImmersion, names=None, samples: int = 16, seed: int = 0) -> Induced:
    """Induced anchor on ``S = x0 + im A`` under conditions RP1 and RP2."""
    _coords_only(P)
    if imm.n != P.space.dim:
        raise DimensionError(f"immersion targets R^{imm.n}, anchor lives on R^{P.space.dim}")
    T = _target_space(imm.m, names)
    if P.degree() > 1:
        return _restrict_sampled(P, imm, samples, seed)
    subs = imm.substitution(T)
    k, n, m = P.k, imm.n, imm.m
    # W[i][a] = (P theta_a)^i along S
    W = [[P.images[a][i].substitute(subs, T) for a in range(k)] for i in range(n)]
    K = _mat_poly(imm.conormal, W, T)  # tangency defect of P(sum c_a theta_a)
    theta = [list(r) for r in P.basis.rows]
    G = [[sum((imm.A[i][j] * theta[a][i] for i in range(n)), Fraction(0)) for a in range(k)] for j in range(m)]
    Gp = [[Polynomial.constant(T, v) for v in row] for row in G]
    KG = K + Gp
    parts = []

    rK = linalg.poly_rank(K, T) if K else 0
    rG = linalg.rank(G)
    rKG = linalg.poly_rank(KG, T)
    if rKG != rK + rG:
        for a in range(k):
            Ka = [row[a] for row in K]
            if linalg.poly_solve(KG, Ka + [T.zero()] * m, T) is None:
                parts.append(Verdict.fail("RP1", OneForm.constant(P.space, theta[a]), where=(a + 1,),
                                          reason=f"theta_{a + 1} is not in X_P(S) + ann(TS) "
                                                 f"(ranks {rK} + {rG} != {rKG})"))
                break
        return Induced(Verdict.combine("restriction", parts))
    parts.append(Verdict.ok("RP1"))

    for c in linalg.poly_nullspace(KG, T):
        Wc = [sum((W[i][a] * c[a] for a in range(k) if not c[a].is_zero()), T.zero()) for i in range(n)]
        if any(not v.is_zero() for v in Wc):
            alpha = OneForm(T, [sum((c[a] * theta[a][i] for a in range(k) if theta[a][i]), T.zero()) for i in range(n)])
            parts.append(Verdict.fail("RP2", alpha, reason="P does not vanish on X_P(S) intersected with ann(TS)"))
            return Induced(Verdict.combine("restriction", parts))
    parts.append(Verdict.ok("RP2"))

    source = _row_basis(linalg.transpose(G))  # image of G, a constant subspace of R^m*
    if not source:
        parts.append(Verdict.fail("restricted covectors", G, reason="no covector of S comes from the subspace"))
        return Induced(Verdict.combine("restriction", parts))

    def assemble(left):
        images = []
        for b in source:
            sol = linalg.poly_solve(KG, [T.zero()] * len(K) + [Polynomial.constant(T, v) for v in b], T)
            if sol is None:  # pragma: no cover - excluded by RP1
                raise ArithmeticError("lift failed after RP1 passed")
            num, den = sol
            c = []
            for v in num:
                q = v.exact_div(den)
                if q is None:
                    return None, den
                c.append(q)
            Wc = [sum((W[i][a] * c[a] for a in range(k) if not c[a].is_zero()), T.zero()) for i in range(n)]
            images.append(VecField(T, [sum((Wc[i] * row[i] for i in range(n) if row[i]), T.zero()) for row in left]))
        return PartialAnchor(CoflatBasis(T, source), images), None

    Pr, bad = assemble(imm.left_inverse)
    if Pr is None:
        parts.append(Verdict.fail("polynomial lift", bad, reason="lift has a non-constant denominator: outside linear category"))
        return Induced(Verdict.combine("restriction", parts))
    parts.append(Verdict.ok("polynomial lift"))
    alt, _ = assemble(imm.alternative_left_inverse())
    if alt != Pr:
        parts.append(Verdict.fail("left-inverse independence", alt.images[0] - Pr.images[0],
                                  reason="restricted anchor depends on the left inverse"))
    else:
        parts.append(Verdict.ok("left-inverse independence"))
    parts.append(_rename(is_poisson(Pr), "restricted anchor is Poisson"))
    v = Verdict.combine("restriction", parts)
    return Induced(v, Pr if v.passed else None)


def _restrict_sampled(P, imm, samples, seed) -> Induced:
    """Pointwise RP1/RP2 at sampled points of S; never a pass."""
    n, m, k = imm.n, imm.m, P.k
    theta = [list(r) for r in P.basis.rows]
    G = [[sum((imm.A[i][j] * theta[a][i] for i in range(n)), Fraction(0)) for a in range(k)] for j in range(m)]
    bad = []
    for s in sample_points(m, samples, seed):
        x = [imm.x0[i] + sum((imm.A[i][j] * s[j] for j in range(m)), Fraction(0)) for i in range(n)]
        W = [[P.images[a][i].eval(x) for a in range(k)] for i in range(n)]
        K = linalg.matmul(imm.conormal, W) if imm.conormal else []
        KG = K + G
        rK = linalg.rank(K) if K else 0
        if linalg.rank(KG) != rK + linalg.rank(G):
            bad.append((s, "RP1"))
            continue
        for c in linalg.nullspace(KG, k):
            if any(sum(W[i][a] * c[a] for a in range(k)) for i in range(n)):
                bad.append((s, "RP2"))
                break
    reason = (f"anchor of degree {P.degree()}: exact decision only for degree <= 1; "
              f"{samples} sampled points, {len(bad)} pointwise violations")
    if bad:
        reason += f" (first at s = {[str(v) for v in bad[0][0]]}: {bad[0][1]})"
    return Induced(Verdict("restriction", INDETERMINATE, reason=reason))


def _rename(v: Verdict, name: str) -> Verdict:
    v.check = name
    return v


# -- projection ---------------------------------------------------------------


def _fiber_space(m: int, n: int, names) -> VarSpace:
    base = list(names) if names else [f"x{i + 1}" for i in range(m)]
    fib = []
    t = 1
    while len(fib) < n - m:
        cand = f"z{t}"
        if cand not in base:
            fib.append(cand)
        t += 1
    return VarSpace(tuple(base + fib))


def _adapted_substitution(sub: LinearSubmersion, Y: VarSpace) -> list[Polynomial]:
    w = Y.coords()
    return [sum((w[j] * c for j, c in enumerate(row) if c), Y.zero()) for row in sub.adapted_inverse]


def _base_only(poly_rows, sub, Y, T, source_space):
    """Rewrite entries in adapted coordinates; return (rows, None) or (None, witness tuple)."""
    subs = _adapted_substitution(sub, Y)
    out = []
    for a, row in enumerate(poly_rows):
        new = []
        for l, p in enumerate(row):
            q = p.substitute(subs, Y)
            fib = sorted(v for v in q.variables() if v >= sub.m)
            if fib:
                z = fib[0]
                zlin = sum((source_space.var(i) * c for i, c in enumerate(sub.adapted[z]) if c), source_space.zero())
                return None, (p, (a + 1, l + 1), f"{Y.all_names[z]} = {zlin.render()}")
            new.append(q.restrict(T))
        out.append(new)
    return out, None


def project_poisson(P: PartialAnchor, sub: LinearSubmersion, names=None) -> Induced:
    """Push the anchor forward along ``y = B x`` when condition PpP holds."""
    _coords_only(P)
    n, m = sub.n, sub.m
    if n != P.space.dim:
        raise DimensionError(f"submersion starts on R^{n}, anchor lives on R^{P.space.dim}")
    T = _target_space(m, names)
    Y = _fiber_space(m, n, T.names)
    k = P.k
    Bt = linalg.transpose(sub.B)
    theta = [list(r) for r in P.basis.rows]
    # base covectors v with B^t v in E
    stacked = [[Bt[i][j] for j in range(m)] + [-theta[a][i] for a in range(k)] for i in range(n)]
    sols = linalg.nullspace(stacked, m + k)
    source = _row_basis([s[:m] for s in sols if any(s[:m])])
    parts = []
    if not source:
        return Induced(Verdict.fail("projection", sub.B, reason="no base covector pulls back into the subspace"))
    rows = []
    for v in source:
        alpha = OneForm.constant(P.space, [sum(Bt[i][j] * v[j] for j in range(m)) for i in range(n)])
        X = P.apply(alpha)
        rows.append([sum((X[i] * b for i, b in enumerate(brow) if b), P.space.zero()) for brow in sub.B])
    base, wit = _base_only(rows, sub, Y, T, P.space)
    if base is None:
        entry, where, fiber = wit
        parts.append(Verdict.fail("PpP", entry, where=where,
                                  reason=f"projected entry depends on fiber coordinate {fiber}"))
        return Induced(Verdict.combine("projection", parts))
    parts.append(Verdict.ok("PpP"))
    Pr = PartialAnchor(CoflatBasis(T, source), [VecField(T, r) for r in base])
    parts.append(_rename(is_poisson(Pr), "projected anchor is Poisson"))
    v = Verdict.combine("projection", parts)
    return Induced(v, Pr if v.passed else None)


# -- PN versions --------------------------------------------------------------


def restrict_pn(P: PartialAnchor, N: OneOneTensor, imm: AffineImmersion, names=None) -> Induced:
    """RP conditions, then ``N(TS) in TS`` and the induced ``A+ N A``."""
    base = restrict_poisson(P, imm, names)
    if not base.accepted:
        return base
    T = base.anchor.space
    subs = imm.substitution(T)
    Ns = [[N.rows[i][j].substitute(subs, T) for j in range(imm.n)] for i in range(imm.n)]
    NA = _poly_mat(Ns, imm.A, T)
    AAp = linalg.matmul(imm.A, imm.left_inverse)
    proj = [[Fraction(int(i == j)) - AAp[i][j] for j in range(imm.n)] for i in range(imm.n)]
    defect = _mat_poly(proj, NA, T)
    parts = [base.verdict]
    for i, row in enumerate(defect):
        for j, v in enumerate(row):
            if not v.is_zero():
                parts.append(Verdict.fail("RpN", v, where=(i + 1, j + 1), reason="N does not preserve the tangent space of S"))
                return Induced(Verdict.combine("PN restriction", parts), base.anchor)
    parts.append(Verdict.ok("RpN"))
    Nr = OneOneTensor(T, _mat_poly(imm.left_inverse, NA, T))
    parts.append(_rename(check_pn(base.anchor, Nr), "induced PN structure"))
    v = Verdict.combine("PN restriction", parts)
    return Induced(v, base.anchor, Nr if v.passed else None)


def project_pn(P: PartialAnchor, N: OneOneTensor, sub: LinearSubmersion, names=None) -> Induced:
    """PpP, then ``N^t B^t = B^t M`` with ``M`` basic; the induced tensor is ``M^t``."""
    base = project_poisson(P, sub, names)
    if not base.accepted:
        return base
    space = P.space
    T = base.anchor.space
    Y = _fiber_space(sub.m, sub.n, T.names)
    Bt = linalg.transpose(sub.B)
    Nt = [[N.rows[j][i] for j in range(sub.n)] for i in range(sub.n)]
    NtBt = _poly_mat(Nt, Bt, space)
    BBt_inv = linalg.inverse(linalg.matmul(sub.B, Bt))
    M = _mat_poly(linalg.matmul(BBt_inv, sub.B), NtBt, space)
    check = _mat_poly(Bt, M, space)
    parts = [base.verdict]
    for i in range(sub.n):
        for j in range(sub.m):
            d = NtBt[i][j] - check[i][j]
            if not d.is_zero():
                parts.append(Verdict.fail("PpN", d, where=(i + 1, j + 1),
                                          reason="N^t does not preserve the basic covectors"))
                return Induced(Verdict.combine("PN projection", parts), base.anchor)
    Mb, wit = _base_only(M, sub, Y, T, space)
    if Mb is None:
        entry, where, fiber = wit
        parts.append(Verdict.fail("PpN", entry, where=where, reason=f"induced tensor depends on fiber coordinate {fiber}"))
        return Induced(Verdict.combine("PN projection", parts), base.anchor)
    parts.append(Verdict.ok("PpN"))
    Nr = OneOneTensor(T, [[Mb[j][i] for j in range(sub.m)] for i in range(sub.m)])
    parts.append(_rename(check_pn(base.anchor, Nr), "induced PN structure"))
    v = Verdict.combine("PN projection", parts)
    return Induced(v, base.anchor, Nr if v.passed else None)
