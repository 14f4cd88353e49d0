"""Polynomial tensor fields and the coordinate calculus built on them.

Index conventions (fixed once, used everywhere):

* bracket ``{f, g} = sum_ij P^ij d_i f d_j g``
* ``(P alpha)^j = sum_i alpha_i P^ij``
* ``(N X)^i = sum_j N^i_j X^j`` and ``(N^t alpha)_j = sum_i alpha_i N^i_j``
* ``(Omega X)_i = sum_j Omega_ij X^j``

Only the first ``space.dim`` variables are coordinates.  Formal parameters of
the space are carried along but never differentiated.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .polycore import DimensionError, Polynomial, VarSpace, parse_polynomial


def _as_poly(v, space: VarSpace) -> Polynomial:
    if isinstance(v, Polynomial):
        if v.space != space:
            raise DimensionError("component lives in a different space")
        return v
    return parse_polynomial(v, space)


def _same(*objs):
    space = objs[0].space
    for o in objs[1:]:
        if o.space != space:
            raise DimensionError(f"variable spaces differ: {space.all_names} vs {o.space.all_names}")
    return space


class _Vector:
    __slots__ = ("space", "components")

    def __init__(self, space: VarSpace, components: Sequence):
        comps = tuple(_as_poly(c, space) for c in components)
        if len(comps) != space.dim:
            raise DimensionError(f"expected {space.dim} components, got {len(comps)}")
        self.space = space
        self.components = comps

    @classmethod
    def zero(cls, space: VarSpace):
        return cls(space, [space.zero()] * space.dim)

    @classmethod
    def basis(cls, space: VarSpace, i: int):
        return cls(space, [space.one() if j == i else space.zero() for j in range(space.dim)])

    def __getitem__(self, i):
        return self.components[i]

    def __iter__(self):
        return iter(self.components)

    def __len__(self):
        return len(self.components)

    def __add__(self, other):
        _same(self, other)
        return type(self)(self.space, [a + b for a, b in zip(self, other)])

    def __sub__(self, other):
        _same(self, other)
        return type(self)(self.space, [a - b for a, b in zip(self, other)])

    def __neg__(self):
        return type(self)(self.space, [-a for a in self])

    def __mul__(self, f):
        """Multiply by a scalar function (Polynomial) or rational constant."""
        return type(self)(self.space, [a * f for a in self])

    __rmul__ = __mul__

    def __eq__(self, other):
        return type(self) is type(other) and self.space == other.space and self.components == other.components

    def __hash__(self):
        return hash((type(self).__name__, self.components))

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self)

    def lift(self, space: VarSpace):
        return type(self)(space, [c.lift(space) for c in self])

    def render(self) -> list[str]:
        return [c.render() for c in self]

    def __repr__(self):
        return f"{type(self).__name__}({self.render()})"


class VecField(_Vector):
    """Vector field ``sum_i X^i d/dx_i``."""

    def __call__(self, f: Polynomial) -> Polynomial:
        """Derivative of ``f`` along the field."""
        _same(self, f)
        total = self.space.zero()
        for i, xi in enumerate(self.components):
            if not xi.is_zero():
                total = total + xi * f.diff(i)
        return total


class OneForm(_Vector):
    """One-form ``sum_i alpha_i dx_i``."""

    @classmethod
    def constant(cls, space: VarSpace, entries: Sequence) -> "OneForm":
        return cls(space, [Polynomial.constant(space, Fraction(e)) for e in entries])


def differential(f: Polynomial) -> OneForm:
    return OneForm(f.space, f.gradient())


class _Square:
    __slots__ = ("space", "rows")

    def __init__(self, space: VarSpace, rows: Sequence[Sequence]):
        n = space.dim
        if len(rows) != n or any(len(r) != n for r in rows):
            raise DimensionError(f"expected a {n}x{n} matrix")
        self.space = space
        self.rows = tuple(tuple(_as_poly(v, space) for v in r) for r in rows)
        self._validate()

    def _validate(self):
        pass

    @classmethod
    def zero(cls, space: VarSpace):
        z = space.zero()
        return cls(space, [[z] * space.dim for _ in range(space.dim)])

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def _combine(self, other, op):
        _same(self, other)
        return type(self)(self.space, [[op(a, b) for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __add__(self, other):
        return self._combine(other, lambda a, b: a + b)

    def __sub__(self, other):
        return self._combine(other, lambda a, b: a - b)

    def __neg__(self):
        return type(self)(self.space, [[-a for a in r] for r in self.rows])

    def __mul__(self, f):
        return type(self)(self.space, [[a * f for a in r] for r in self.rows])

    __rmul__ = __mul__

    def __eq__(self, other):
        return type(self) is type(other) and self.space == other.space and self.rows == other.rows

    def __hash__(self):
        return hash((type(self).__name__, self.rows))

    def is_zero(self) -> bool:
        return all(a.is_zero() for r in self.rows for a in r)

    def lift(self, space: VarSpace):
        return type(self)(space, [[a.lift(space) for a in r] for r in self.rows])

    def render(self) -> list[list[str]]:
        return [[a.render() for a in r] for r in self.rows]

    def __repr__(self):
        return f"{type(self).__name__}({self.render()})"


def antisymmetry_defect(rows) -> tuple[tuple[int, int], Polynomial] | None:
    """First ``(i, j), M_ij + M_ji`` that is nonzero (i <= j), else None."""
    n = len(rows)
    for i in range(n):
        for j in range(i, n):
            s = rows[i][j] + rows[j][i]
            if not s.is_zero():
                return (i, j), s
    return None


class Bivector(_Square):
    """Antisymmetric (2,0) tensor ``P^ij``."""

    def _validate(self):
        bad = antisymmetry_defect(self.rows)
        if bad is not None:
            (i, j), s = bad
            raise ValueError(f"bivector not antisymmetric at ({i + 1},{j + 1}): P^ij + P^ji = {s}")

    @classmethod
    def from_upper(cls, space: VarSpace, entries: dict) -> "Bivector":
        """Build from ``{(i, j): value}`` with 0-based i < j."""
        n = space.dim
        rows = [[space.zero()] * n for _ in range(n)]
        for (i, j), v in entries.items():
            p = _as_poly(v, space)
            rows[i][j] = p
            rows[j][i] = -p
        return cls(space, rows)


class TwoForm(_Square):
    """Antisymmetric (0,2) tensor ``Omega_ij``."""

    def _validate(self):
        bad = antisymmetry_defect(self.rows)
        if bad is not None:
            (i, j), s = bad
            raise ValueError(f"two-form not antisymmetric at ({i + 1},{j + 1}): {s}")

    @classmethod
    def from_upper(cls, space: VarSpace, entries: dict) -> "TwoForm":
        n = space.dim
        rows = [[space.zero()] * n for _ in range(n)]
        for (i, j), v in entries.items():
            p = _as_poly(v, space)
            rows[i][j] = p
            rows[j][i] = -p
        return cls(space, rows)


class OneOneTensor(_Square):
    """(1,1) tensor ``N^i_j`` (row i, column j)."""

    @classmethod
    def identity(cls, space: VarSpace) -> "OneOneTensor":
        return cls(space, [[space.one() if i == j else space.zero() for j in range(space.dim)] for i in range(space.dim)])

    @classmethod
    def diagonal(cls, space: VarSpace, diag: Sequence) -> "OneOneTensor":
        d = [_as_poly(v, space) for v in diag]
        return cls(space, [[d[i] if i == j else space.zero() for j in range(space.dim)] for i in range(space.dim)])

    def compose(self, other: "OneOneTensor") -> "OneOneTensor":
        _same(self, other)
        n = self.space.dim
        return OneOneTensor(self.space, [[sum((self.rows[i][k] * other.rows[k][j] for k in range(n)), self.space.zero())
                                          for j in range(n)] for i in range(n)])

    def column(self, j: int) -> VecField:
        return VecField(self.space, [self.rows[i][j] for i in range(self.space.dim)])

    @classmethod
    def from_columns(cls, cols: Sequence[VecField]) -> "OneOneTensor":
        space = cols[0].space
        return cls(space, [[cols[j][i] for j in range(len(cols))] for i in range(space.dim)])


# -- operations -------------------------------------------------------------


def lie_bracket(X: VecField, Y: VecField) -> VecField:
    """``[X, Y]^j = sum_i (X^i d_i Y^j - Y^i d_i X^j)``."""
    space = _same(X, Y)
    return VecField(space, [X(Y[j]) - Y(X[j]) for j in range(space.dim)])


def pairing(alpha: OneForm, X: VecField) -> Polynomial:
    space = _same(alpha, X)
    total = space.zero()
    for a, x in zip(alpha, X):
        if not a.is_zero() and not x.is_zero():
            total = total + a * x
    return total


def lie_derivative_oneform(X: VecField, alpha: OneForm) -> OneForm:
    """``(L_X alpha)_i = sum_j (X^j d_j alpha_i + alpha_j d_i X^j)``."""
    space = _same(X, alpha)
    comps = []
    for i in range(space.dim):
        c = X(alpha[i])
        for j in range(space.dim):
            if not alpha[j].is_zero():
                c = c + alpha[j] * X[j].diff(i)
        comps.append(c)
    return OneForm(space, comps)


def apply_oneone(N: OneOneTensor, X: VecField) -> VecField:
    space = _same(N, X)
    n = space.dim
    return VecField(space, [sum((N.rows[i][j] * X[j] for j in range(n) if not X[j].is_zero()), space.zero())
                            for i in range(n)])


def apply_oneone_transpose(N: OneOneTensor, alpha: OneForm) -> OneForm:
    space = _same(N, alpha)
    n = space.dim
    return OneForm(space, [sum((alpha[i] * N.rows[i][j] for i in range(n) if not alpha[i].is_zero()), space.zero())
                           for j in range(n)])


def apply_bivector(P: Bivector, alpha: OneForm) -> VecField:
    space = _same(P, alpha)
    n = space.dim
    return VecField(space, [sum((alpha[i] * P.rows[i][j] for i in range(n) if not alpha[i].is_zero()), space.zero())
                            for j in range(n)])


def apply_twoform(omega: TwoForm, X: VecField) -> OneForm:
    space = _same(omega, X)
    n = space.dim
    return OneForm(space, [sum((omega.rows[i][j] * X[j] for j in range(n) if not X[j].is_zero()), space.zero())
                           for i in range(n)])


def lie_derivative_oneone(X: VecField, N: OneOneTensor) -> OneOneTensor:
    """``(L_X N) Y = [X, N Y] - N [X, Y]``, assembled column by column on Y = d_j."""
    space = _same(X, N)
    cols = []
    for j in range(space.dim):
        e = VecField.basis(space, j)
        cols.append(lie_bracket(X, apply_oneone(N, e)) - apply_oneone(N, lie_bracket(X, e)))
    return OneOneTensor.from_columns(cols)


def d_oneform(alpha: OneForm) -> TwoForm:
    """``(d alpha)_ij = d_i alpha_j - d_j alpha_i``."""
    space = alpha.space
    n = space.dim
    return TwoForm(space, [[alpha[j].diff(i) - alpha[i].diff(j) for j in range(n)] for i in range(n)])


def d_twoform(omega: TwoForm) -> dict[tuple[int, int, int], Polynomial]:
    """Exterior derivative, entries ``(i, j, k)`` with ``i < j < k``.

    ``(d Omega)_ijk = d_i Omega_jk + d_j Omega_ki + d_k Omega_ij``.
    """
    n = omega.space.dim
    W = omega.rows
    out = {}
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(j + 1, n):
                out[(i, j, k)] = W[j][k].diff(i) + W[k][i].diff(j) + W[i][j].diff(k)
    return out


def is_closed(omega: TwoForm) -> bool:
    return all(v.is_zero() for v in d_twoform(omega).values())
