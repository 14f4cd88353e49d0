"""Lie-Poisson brackets from structure constants, Casimirs and Magri-Lenard chains."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product
from typing import Sequence

from . import linalg
from .fields import Bivector, differential, lie_bracket
from .partial import PartialAnchor, full_anchor, hamiltonian_field, partial_bracket
from .polycore import Polynomial, VarSpace
from .verdict import Verdict


class LieAlgebraSpec:
    """Structure constants ``c[i][j][k]`` with ``[e_i, e_j] = sum_k c_ij^k e_k``.

    Construction does not validate; call :meth:`defects` or use
    :func:`lp_anchor`, which rejects invalid constants.
    """

    def __init__(self, dim: int, constants: dict[tuple[int, int, int], Fraction] | None = None,
                 names: Sequence[str] | None = None):
        if dim < 1:
            raise ValueError("dimension must be positive")
        self.dim = dim
        self.c = [[[Fraction(0)] * dim for _ in range(dim)] for _ in range(dim)]
        for (i, j, k), v in (constants or {}).items():
            self.c[i][j][k] = Fraction(v)
        self.names = tuple(names) if names else tuple(f"x{i + 1}" for i in range(dim))

    @classmethod
    def from_brackets(cls, dim: int, brackets: dict[tuple[int, int], dict[int, Fraction]], names=None):
        """Fill ``[e_i, e_j]`` and its antisymmetric partner from ``{(i, j): {k: c}}``."""
        consts = {}
        for (i, j), img in brackets.items():
            for k, v in img.items():
                consts[(i, j, k)] = Fraction(v)
                consts[(j, i, k)] = -Fraction(v)
        return cls(dim, consts, names)

    @property
    def space(self) -> VarSpace:
        return VarSpace(self.names)

    def bracket(self, x: Sequence, y: Sequence) -> list[Fraction]:
        n = self.dim
        return [sum((Fraction(x[i]) * Fraction(y[j]) * self.c[i][j][k] for i in range(n) for j in range(n)), Fraction(0))
                for k in range(n)]

    def ad(self, i: int) -> list[list[Fraction]]:
        """Matrix of ``ad_{e_i}``: column l is ``[e_i, e_l]``."""
        n = self.dim
        return [[self.c[i][l][k] for l in range(n)] for k in range(n)]

    def defects(self) -> list[str]:
        n = self.dim
        out = []
        for i, j, k in product(range(n), repeat=3):
            if self.c[i][j][k] != -self.c[j][i][k]:
                out.append(f"antisymmetry c_{i + 1}{j + 1}^{k + 1}")
        for i, j, k, l in product(range(n), repeat=4):
            s = sum(self.c[i][j][m] * self.c[m][k][l] + self.c[j][k][m] * self.c[m][i][l]
                    + self.c[k][i][m] * self.c[m][j][l] for m in range(n))
            if s:
                out.append(f"jacobi ({i + 1},{j + 1},{k + 1}) component {l + 1}: {s}")
        return out

    def render(self):
        n = self.dim
        return [[i + 1, j + 1, k + 1, str(self.c[i][j][k])]
                for i in range(n) for j in range(n) for k in range(n) if i < j and self.c[i][j][k]]


def so3() -> LieAlgebraSpec:
    return LieAlgebraSpec.from_brackets(3, {(0, 1): {2: 1}, (1, 2): {0: 1}, (2, 0): {1: 1}})


def sl2() -> LieAlgebraSpec:
    """Basis (h, e, f): [h,e] = 2e, [h,f] = -2f, [e,f] = h."""
    return LieAlgebraSpec.from_brackets(3, {(0, 1): {1: 2}, (0, 2): {2: -2}, (1, 2): {0: 1}},
                                        names=("xh", "xe", "xf"))


def heisenberg() -> LieAlgebraSpec:
    return LieAlgebraSpec.from_brackets(3, {(0, 1): {2: 1}})


def abelian(n: int) -> LieAlgebraSpec:
    return LieAlgebraSpec(n)


class InvalidLieAlgebra(ValueError):
    pass


def _validated(g: LieAlgebraSpec):
    bad = g.defects()
    if bad:
        raise InvalidLieAlgebra(f"invalid structure constants: {bad[0]}")


def lp_anchor(g: LieAlgebraSpec, strict: bool = True) -> PartialAnchor:
    """``P^ij(x) = sum_k c_ij^k x_k``."""
    if strict:
        _validated(g)
    space = g.space
    n = g.dim
    rows = [[sum((space.var(k) * g.c[i][j][k] for k in range(n) if g.c[i][j][k]), space.zero())
             for j in range(n)] for i in range(n)]
    return full_anchor(Bivector(space, rows))


def frozen_anchor(g: LieAlgebraSpec, m0: Sequence) -> PartialAnchor:
    """Constant bivector ``P^ij = sum_k c_ij^k m0_k``."""
    space = g.space
    n = g.dim
    m0 = [Fraction(v) for v in m0]
    rows = [[Polynomial.constant(space, sum((g.c[i][j][k] * m0[k] for k in range(n)), Fraction(0)))
             for j in range(n)] for i in range(n)]
    return full_anchor(Bivector(space, rows))


# -- cocycles ---------------------------------------------------------------


def _as_matrix(omega, n) -> list[list[Fraction]]:
    om = linalg.to_fractions(omega)
    if len(om) != n or any(len(r) != n for r in om):
        raise ValueError(f"omega must be {n}x{n}")
    for i in range(n):
        for j in range(n):
            if om[i][j] != -om[j][i]:
                raise ValueError(f"omega not antisymmetric at ({i + 1},{j + 1})")
    return om


def cocycle_check(g: LieAlgebraSpec, omega) -> Verdict:
    """``omega([x,y],z) + omega([y,z],x) + omega([z,x],y) = 0`` on basis triples."""
    n = g.dim
    om = _as_matrix(omega, n)

    def w_br(i, j, k):
        return sum((g.c[i][j][m] * om[m][k] for m in range(n)), Fraction(0))

    for i, j, k in combinations(range(n), 3):
        s = w_br(i, j, k) + w_br(j, k, i) + w_br(k, i, j)
        if s:
            return Verdict.fail("cocycle", s, where=(i + 1, j + 1, k + 1), reason="cyclic sum is not zero")
    return Verdict.ok("cocycle")


def coboundary_solve(g: LieAlgebraSpec, omega) -> list[Fraction] | None:
    """``beta`` with ``omega_ij = sum_k beta_k c_ij^k``, or None."""
    n = g.dim
    om = _as_matrix(omega, n)
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    rows = [[g.c[i][j][k] for k in range(n)] for i, j in pairs]
    rhs = [om[i][j] for i, j in pairs]
    return linalg.solve(rows, rhs)


def modified_anchor(g: LieAlgebraSpec, omega) -> PartialAnchor:
    """Lie-Poisson bivector plus the constant cocycle ``omega``."""
    v = cocycle_check(g, omega)
    if not v:
        raise ValueError(f"omega is not a 2-cocycle: triple {v.where} gives {v.witness}")
    om = _as_matrix(omega, g.dim)
    base = lp_anchor(g).to_bivector()
    space = base.space
    rows = [[base.rows[i][j] + om[i][j] for j in range(g.dim)] for i in range(g.dim)]
    return full_anchor(Bivector(space, rows))


# -- Killing form and Casimirs --------------------------------------------


def killing_form(g: LieAlgebraSpec) -> list[list[Fraction]]:
    """``K_ij = trace(ad_i o ad_j)``."""
    ads = [g.ad(i) for i in range(g.dim)]
    n = g.dim
    return [[sum(linalg.matmul(ads[i], ads[j])[t][t] for t in range(n)) for j in range(n)] for i in range(n)]


@dataclass
class KillingCasimir:
    casimir: Polynomial | None
    killing: list[list[Fraction]]
    rank: int


def killing_casimir(g: LieAlgebraSpec) -> KillingCasimir:
    """``C = 1/2 sum (K^-1)_ij x_i x_j`` when the Killing form is invertible."""
    K = killing_form(g)
    r = linalg.rank(K)
    if r < g.dim:
        return KillingCasimir(None, K, r)
    Kinv = linalg.inverse(K)
    space = g.space
    x = space.coords()
    C = space.zero()
    for i in range(g.dim):
        for j in range(g.dim):
            if Kinv[i][j]:
                C = C + x[i] * x[j] * (Kinv[i][j] / 2)
    field_ = hamiltonian_field(C, lp_anchor(g))
    if not field_.is_zero():  # pragma: no cover - guaranteed by invariance of K
        raise ArithmeticError("Killing quadratic form is not a Casimir")
    return KillingCasimir(C, K, r)


def casimir_check(C: Polynomial, P: PartialAnchor) -> Verdict:
    """Pass iff ``X_C = P(dC)`` is the zero field."""
    X = hamiltonian_field(C, P)
    if X.is_zero():
        return Verdict.ok("casimir")
    return Verdict.fail("casimir", X, reason="Hamiltonian field of C is not zero")


# -- argument translation ---------------------------------------------------


@dataclass
class MagriChain:
    hamiltonians: list[Polynomial]
    P: PartialAnchor
    Q: PartialAnchor
    verdicts: list[Verdict] = field(default_factory=list)
    notice: str = ""

    @property
    def passed(self) -> bool:
        return all(v.passed for v in self.verdicts)


def translate_argument(C: Polynomial, m0: Sequence) -> list[Polynomial]:
    """Coefficients ``H_k`` of ``C(m0 + lam m) = sum_k lam^k H_k``."""
    space = C.space
    ext = space.extend(("lam",) if "lam" not in space.all_names else ("lam_",))
    lam = ext.var(space.nvars)
    images = [Polynomial.constant(ext, Fraction(m)) + lam * ext.var(i) for i, m in enumerate(m0)]
    H = C.substitute(images, ext)
    by_power = H.coefficients_in(space.nvars)
    deg = max(by_power, default=0)
    return [by_power[k].restrict(space) if k in by_power else space.zero() for k in range(deg + 1)]


def argument_translation_chain(g: LieAlgebraSpec, m0: Sequence, C: Polynomial, depth: int | None = None) -> MagriChain:
    """Chain from ``H(m0 + lam m)`` for the pair P = frozen(m0), Q = Lie-Poisson."""
    Q = lp_anchor(g)
    cas = casimir_check(C, Q)
    if not cas:
        raise ValueError(f"C is not a Casimir of the Lie-Poisson structure: X_C = {cas.rendered_witness()}")
    P = frozen_anchor(g, m0)
    H = translate_argument(C, m0)
    notice = ""
    if depth is not None and depth + 1 < len(H):
        H = H[: depth + 1]
    elif depth is not None and depth + 1 > len(H):
        notice = f"requested depth {depth} exceeds deg C = {len(H) - 1}; chain is finite"
    chain = MagriChain(H, P, Q, notice=notice)
    full = translate_argument(C, m0)
    chain.verdicts.append(_constant_check(full[0]))
    chain.verdicts.extend(_link_checks(P, Q, full, len(H)))
    chain.verdicts.extend(_involution_checks(P, Q, H))
    return chain


def _constant_check(H0: Polynomial) -> Verdict:
    if H0.is_constant():
        return Verdict.ok("H_0 constant")
    return Verdict.fail("H_0 constant", H0, reason="H_0 is not constant")


def _link_checks(P, Q, H: list[Polynomial], upto: int) -> list[Verdict]:
    """Coefficient of ``lam^k`` in ``(P + lam Q) dH_lam``: ``P dH_k + Q dH_{k-1} = 0``."""
    out = []
    d = len(H) - 1
    for k in range(0, min(upto, d + 1) + 1):
        term = None
        if k <= d:
            term = P.apply(differential(H[k]))
        if k >= 1:
            q = Q.apply(differential(H[k - 1]))
            term = q if term is None else term + q
        name = f"lam^{k}: P dH_{k} + Q dH_{k - 1}" if k else "lam^0: P dH_0"
        if term.is_zero():
            out.append(Verdict.ok(name))
        else:
            out.append(Verdict.fail(name, term, reason="link identity fails"))
    return out


def _involution_checks(P, Q, H) -> list[Verdict]:
    out = []
    for label, A in (("P", P), ("Q", Q)):
        fields_ = [hamiltonian_field(h, A) for h in H]
        for i in range(len(H)):
            for j in range(i + 1, len(H)):
                b = partial_bracket(H[i], H[j], A)
                name = f"{{H_{i}, H_{j}}}_{label}"
                out.append(Verdict.ok(name) if b.is_zero() else Verdict.fail(name, b, reason="not in involution"))
                c = lie_bracket(fields_[i], fields_[j])
                name = f"[X_{i}, X_{j}]_{label}"
                out.append(Verdict.ok(name) if c.is_zero() else Verdict.fail(name, c, reason="fields do not commute"))
    return out
