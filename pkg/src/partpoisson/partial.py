"""Anchors defined on a constant covector subspace and their brackets.

The subspace ``E`` of covectors is spanned by constant one-forms
``theta_1..theta_k``; an anchor is known only through its images
``P(theta_a)``.  Functions enter the bracket only when they are *admissible*:
every gradient of every derivative must stay inside ``E``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from . import linalg
from .fields import (
    Bivector,
    OneForm,
    OneOneTensor,
    VecField,
    antisymmetry_defect,
    apply_bivector,
    apply_oneone,
    differential,
    pairing,
)
from .polycore import DimensionError, Polynomial, VarSpace
from .verdict import Verdict


class CoflatDecompositionError(ValueError):
    """A one-form does not lie in the covector subspace."""

    def __init__(self, residual: OneForm, message: str = "one-form is not in the covector subspace"):
        self.residual = residual
        super().__init__(f"{message}; residual {residual.render()}")


class AdmissibilityError(ValueError):
    def __init__(self, function: Polynomial, order: int, label: str = "f"):
        self.function = function
        self.order = order
        super().__init__(f"{label} = {function.render()} is not admissible: derivative of order {order} leaves the covector subspace")


class CoflatBasis:
    """Linearly independent constant covectors spanning the subspace ``E``."""

    def __init__(self, space: VarSpace, covectors: Sequence[Sequence]):
        rows = linalg.to_fractions(covectors)
        n = space.dim
        if not 1 <= len(rows) <= n:
            raise ValueError(f"need between 1 and {n} covectors, got {len(rows)}")
        if any(len(r) != n for r in rows):
            raise DimensionError(f"covectors must have {n} entries")
        if linalg.rank(rows) != len(rows):
            raise ValueError("covectors are linearly dependent")
        self.space = space
        self.rows = tuple(tuple(r) for r in rows)
        _, pivots = linalg.rref(rows)
        self._pivots = pivots
        self._inv = linalg.inverse([[r[p] for p in pivots] for r in rows])
        # tangent directions invisible to E
        self.annihilator = [tuple(v) for v in linalg.nullspace(rows)] if len(rows) < n else []

    @classmethod
    def full(cls, space: VarSpace) -> "CoflatBasis":
        return cls(space, linalg.identity(space.dim))

    @property
    def k(self) -> int:
        return len(self.rows)

    @property
    def is_full(self) -> bool:
        return self.k == self.space.dim

    def covector(self, a: int, space: VarSpace | None = None) -> OneForm:
        return OneForm.constant(space or self.space, self.rows[a])

    def covectors(self, space: VarSpace | None = None) -> list[OneForm]:
        return [self.covector(a, space) for a in range(self.k)]

    def linear_function(self, a: int, space: VarSpace | None = None) -> Polynomial:
        """``F_a(x) = theta_a . x``; always admissible."""
        space = space or self.space
        return sum((space.var(i) * c for i, c in enumerate(self.rows[a]) if c), space.zero())

    def coefficients(self, alpha: OneForm) -> list[Polynomial]:
        """Pivot-column coefficients of ``alpha``, linear in ``alpha``.

        They reproduce ``alpha`` only when it lies in the subspace; use
        :meth:`decompose` for the checked version.
        """
        space = alpha.space
        if space.dim != self.space.dim:
            raise DimensionError("one-form dimension does not match the covector basis")
        picked = [alpha[p] for p in self._pivots]
        coeffs = []
        for b in range(self.k):
            c = space.zero()
            for t, val in enumerate(picked):
                w = self._inv[t][b]
                if w and not val.is_zero():
                    c = c + val * w
            coeffs.append(c)
        return coeffs

    def decompose(self, alpha: OneForm) -> list[Polynomial]:
        """Coefficients ``a`` with ``alpha = sum a_a theta_a``; raises on residual."""
        coeffs = self.coefficients(alpha)
        space = alpha.space
        residual = list(alpha.components)
        for b, c in enumerate(coeffs):
            if c.is_zero():
                continue
            for i, t in enumerate(self.rows[b]):
                if t:
                    residual[i] = residual[i] - c * t
        res = OneForm(space, residual)
        if not res.is_zero():
            raise CoflatDecompositionError(res)
        return coeffs

    def contains(self, alpha: OneForm) -> bool:
        try:
            self.decompose(alpha)
        except CoflatDecompositionError:
            return False
        return True

    def __eq__(self, other):
        return isinstance(other, CoflatBasis) and self.space.names == other.space.names and self.rows == other.rows

    def __hash__(self):
        return hash(self.rows)

    def render(self):
        return [[str(v) for v in r] for r in self.rows]


def coflat_decompose(alpha: OneForm, basis: CoflatBasis) -> list[Polynomial]:
    return basis.decompose(alpha)


class PartialAnchor:
    """Anchor ``P: E -> vector fields`` given by the images ``P(theta_a)``.

    The images may live in a space extended by formal parameters (pencils);
    the covector basis always refers to the coordinates only.
    """

    def __init__(self, basis: CoflatBasis, images: Sequence[VecField]):
        images = tuple(images)
        if len(images) != basis.k:
            raise DimensionError(f"need {basis.k} images, got {len(images)}")
        space = images[0].space
        if space.names != basis.space.names:
            raise DimensionError("images and covector basis use different coordinates")
        for im in images:
            if im.space != space:
                raise DimensionError("all images must share one space")
        self.basis = basis
        self.images = images
        self.space = space

    @classmethod
    def from_strings(cls, space: VarSpace, images, coflat=None) -> "PartialAnchor":
        basis = CoflatBasis(space, coflat) if coflat is not None else CoflatBasis.full(space)
        return cls(basis, [VecField(space, row) for row in images])

    @property
    def k(self) -> int:
        return self.basis.k

    @property
    def is_full(self) -> bool:
        return self.basis.is_full

    def covectors(self) -> list[OneForm]:
        return self.basis.covectors(self.space)

    def apply(self, alpha: OneForm) -> VecField:
        coeffs = self.basis.decompose(alpha)
        out = VecField.zero(self.space)
        for c, im in zip(coeffs, self.images):
            if not c.is_zero():
                out = out + im * c
        return out

    def __call__(self, alpha: OneForm) -> VecField:
        return self.apply(alpha)

    def pairing_matrix(self) -> list[list[Polynomial]]:
        """``M[a][b] = <theta_b, P theta_a>``."""
        th = self.covectors()
        return [[pairing(th[b], self.images[a]) for b in range(self.k)] for a in range(self.k)]

    def _compatible(self, other: "PartialAnchor"):
        if self.basis != other.basis:
            raise DimensionError("anchors are defined on different covector subspaces")
        if self.space != other.space:
            raise DimensionError("anchors live in different spaces")

    def __add__(self, other: "PartialAnchor") -> "PartialAnchor":
        self._compatible(other)
        return PartialAnchor(self.basis, [a + b for a, b in zip(self.images, other.images)])

    def __sub__(self, other: "PartialAnchor") -> "PartialAnchor":
        self._compatible(other)
        return PartialAnchor(self.basis, [a - b for a, b in zip(self.images, other.images)])

    def scale(self, f) -> "PartialAnchor":
        """Multiply by a rational or a polynomial (e.g. a pencil parameter)."""
        return PartialAnchor(self.basis, [im * f for im in self.images])

    def lift(self, space: VarSpace) -> "PartialAnchor":
        return PartialAnchor(self.basis, [im.lift(space) for im in self.images])

    def compose(self, N: OneOneTensor) -> "PartialAnchor":
        """``N o P`` on the same covector subspace."""
        return PartialAnchor(self.basis, [apply_oneone(N, im) for im in self.images])

    def degree(self) -> int:
        return max((c.degree() for im in self.images for c in im), default=-1)

    def to_bivector(self) -> Bivector:
        """Matrix ``P^ij = (P dx_i)^j``; requires the full covector space."""
        if not self.is_full:
            raise ValueError("only anchors on the full dual have a bivector")
        n = self.space.dim
        rows = [list(self.apply(OneForm.basis(self.space, i)).components) for i in range(n)]
        return Bivector(self.space, rows)

    def naive_extension(self) -> list[list[Polynomial]]:
        """Extend by zero on a coordinate complement of ``E`` and return ``P^ij``.

        The result need not be antisymmetric: entries that ``E`` cannot see
        are not constrained by the partial antisymmetry condition.
        """
        n = self.space.dim
        full = linalg.complete_rows(self.basis.rows)
        inv = linalg.inverse(full)
        rows = []
        for i in range(n):
            # dx_i = sum_b inv[i][b] * full_b ; images of the complement are zero
            v = VecField.zero(self.space)
            for b in range(self.k):
                if inv[i][b]:
                    v = v + self.images[b] * inv[i][b]
            rows.append(list(v.components))
        return rows

    def __eq__(self, other):
        return isinstance(other, PartialAnchor) and self.basis == other.basis and self.images == other.images

    def __hash__(self):
        return hash(self.images)

    def render(self):
        return {"coflat": self.basis.render(), "images": [im.render() for im in self.images]}

    def __repr__(self):
        return f"PartialAnchor(k={self.k}, images={[im.render() for im in self.images]})"


def full_anchor(P: Bivector) -> PartialAnchor:
    """View a bivector as an anchor on the whole cotangent space."""
    basis = CoflatBasis.full(VarSpace(P.space.names))
    return PartialAnchor(basis, [apply_bivector(P, OneForm.basis(P.space, a)) for a in range(P.space.dim)])


def anchor_from_bivector_rows(space: VarSpace, rows) -> PartialAnchor:
    return full_anchor(Bivector(space, rows))


def check_partial_antisymmetry(P: PartialAnchor) -> Verdict:
    bad = antisymmetry_defect(P.pairing_matrix())
    if bad is None:
        return Verdict.ok("partial antisymmetry")
    (a, b), s = bad
    return Verdict.fail("partial antisymmetry", s, where=(a + 1, b + 1),
                        reason="<theta_b, P theta_a> + <theta_a, P theta_b> is not zero")


def check_matrix_antisymmetry(rows, name: str = "bivector antisymmetry") -> Verdict:
    bad = antisymmetry_defect(rows)
    if bad is None:
        return Verdict.ok(name)
    (i, j), s = bad
    return Verdict.fail(name, s, where=(i + 1, j + 1), reason="P^ij + P^ji is not zero")


@dataclass
class Admissibility:
    admissible: bool
    order: int | None = None
    derivative: Polynomial | None = None
    residual: OneForm | None = None

    def __bool__(self):
        return self.admissible


def is_admissible(f: Polynomial, basis: CoflatBasis) -> Admissibility:
    """Check every derivative of ``f`` has its gradient in the covector subspace.

    A failure at ``order`` k means some derivative of order k-1 has a gradient
    (a k-th differential of ``f``) that leaves the subspace.
    """
    level = {f}
    seen = set()
    order = 1
    while level:
        nxt = set()
        for g in sorted(level, key=lambda p: p.render()):
            alpha = differential(g)
            try:
                basis.decompose(alpha)
            except CoflatDecompositionError as err:
                return Admissibility(False, order, g, err.residual)
            for c in alpha:
                if not c.is_zero() and not c.is_constant() and c not in seen:
                    seen.add(c)
                    nxt.add(c)
        level = nxt
        order += 1
    return Admissibility(True)


def _require_admissible(f: Polynomial, basis: CoflatBasis, label: str):
    adm = is_admissible(f, basis)
    if not adm:
        raise AdmissibilityError(f, adm.order, label)


def hamiltonian_field(f: Polynomial, P: PartialAnchor) -> VecField:
    """``X_f = P(df)``."""
    _require_admissible(f, P.basis, "f")
    return P.apply(differential(f))


def partial_bracket(f: Polynomial, g: Polynomial, P: PartialAnchor) -> Polynomial:
    """``{f, g} = dg(P(df))``."""
    _require_admissible(f, P.basis, "f")
    _require_admissible(g, P.basis, "g")
    return pairing(differential(g), P.apply(differential(f)))


def bracket_closure_check(P: PartialAnchor, generators: Sequence[Polynomial]) -> Verdict:
    for i, f in enumerate(generators):
        _require_admissible(f, P.basis, f"generator {i + 1}")
    for i in range(len(generators)):
        for j in range(i + 1, len(generators)):
            b = partial_bracket(generators[i], generators[j], P)
            adm = is_admissible(b, P.basis)
            if not adm:
                return Verdict.fail("bracket closure", b, where=(i + 1, j + 1),
                                    reason=f"bracket of generators {i + 1},{j + 1} is not admissible (order {adm.order})")
    return Verdict.ok("bracket closure")
