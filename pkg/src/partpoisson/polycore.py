"""Exact multivariate polynomials over the rationals.

A :class:`Polynomial` lives in a :class:`VarSpace` and stores its terms as a
mapping from dense exponent tuples to nonzero :class:`fractions.Fraction`
coefficients.  Every operation returns a new canonical value, so zero testing
is a plain emptiness check.

A ``VarSpace`` may carry extra *parameters* (formal variables such as the
pencil parameter lambda).  Parameters take part in arithmetic but are never
differentiated by the geometric operators, which only look at the first
``dim`` variables.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence, Union

Exponent = tuple[int, ...]
Scalar = Union[int, Fraction]


class DimensionError(ValueError):
    """Operands live in different variable spaces, or an index is out of range."""


class PolynomialSyntaxError(ValueError):
    """A polynomial string could not be parsed."""

    def __init__(self, message: str, text: str = "", column: int | None = None):
        self.text = text
        self.column = column
        if column is not None:
            message = f"{message} (column {column + 1})"
        super().__init__(message)


class UnknownVariableError(PolynomialSyntaxError):
    def __init__(self, name: str, text: str = "", column: int | None = None):
        self.name = name
        super().__init__(f"unknown variable {name!r}", text, column)


@dataclass(frozen=True)
class VarSpace:
    """Coordinate names of the model space plus optional formal parameters."""

    names: tuple[str, ...]
    params: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "names", tuple(self.names))
        object.__setattr__(self, "params", tuple(self.params))
        if len(self.names) < 1:
            raise ValueError("a VarSpace needs at least one coordinate")
        allnames = self.names + self.params
        if len(set(allnames)) != len(allnames):
            raise ValueError(f"duplicate variable names in {allnames}")
        for name in allnames:
            if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", name):
                raise ValueError(f"invalid variable name {name!r}")

    @classmethod
    def standard(cls, n: int, prefix: str = "x") -> "VarSpace":
        return cls(tuple(f"{prefix}{i + 1}" for i in range(n)))

    @property
    def dim(self) -> int:
        return len(self.names)

    @property
    def nvars(self) -> int:
        return len(self.names) + len(self.params)

    @property
    def all_names(self) -> tuple[str, ...]:
        return self.names + self.params

    def index(self, name: str) -> int:
        try:
            return self.all_names.index(name)
        except ValueError:
            raise UnknownVariableError(name) from None

    def extend(self, params: Sequence[str]) -> "VarSpace":
        """Same coordinates with additional formal parameters appended."""
        return VarSpace(self.names, self.params + tuple(params))

    def zero(self) -> "Polynomial":
        return Polynomial(self, {})

    def one(self) -> "Polynomial":
        return Polynomial.constant(self, 1)

    def var(self, i: int) -> "Polynomial":
        return Polynomial.variable(self, i)

    def param(self, name: str) -> "Polynomial":
        return Polynomial.variable(self, self.index(name))

    def coords(self) -> list["Polynomial"]:
        return [self.var(i) for i in range(self.dim)]

    def parse(self, text: str) -> "Polynomial":
        return parse_polynomial(text, self)


def _grlex_key(exp: Exponent):
    return (sum(exp), exp)


class Polynomial:
    """Immutable polynomial with rational coefficients."""

    __slots__ = ("space", "terms", "_hash")

    def __init__(self, space: VarSpace, terms: Mapping[Exponent, Scalar]):
        n = space.nvars
        clean: dict[Exponent, Fraction] = {}
        for exp, c in terms.items():
            if len(exp) != n:
                raise DimensionError(f"exponent {exp} has length {len(exp)}, expected {n}")
            c = Fraction(c)
            if c:
                clean[tuple(exp)] = c
        self.space = space
        self.terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, space: VarSpace, terms: dict[Exponent, Fraction]) -> "Polynomial":
        # trusted constructor: terms already canonical
        p = object.__new__(cls)
        p.space = space
        p.terms = terms
        p._hash = None
        return p

    @classmethod
    def constant(cls, space: VarSpace, c: Scalar) -> "Polynomial":
        c = Fraction(c)
        return cls._raw(space, {(0,) * space.nvars: c} if c else {})

    @classmethod
    def variable(cls, space: VarSpace, i: int) -> "Polynomial":
        if not 0 <= i < space.nvars:
            raise DimensionError(f"variable index {i} out of range for {space.nvars} variables")
        exp = [0] * space.nvars
        exp[i] = 1
        return cls._raw(space, {tuple(exp): Fraction(1)})

    # -- basic queries -------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(e) for e in self.terms), default=-1)

    def degree_in(self, i: int) -> int:
        return max((e[i] for e in self.terms), default=-1)

    def is_constant(self) -> bool:
        return all(not any(e) for e in self.terms)

    def constant_term(self) -> Fraction:
        return self.terms.get((0,) * self.space.nvars, Fraction(0))

    def sorted_terms(self) -> list[tuple[Exponent, Fraction]]:
        """Terms in decreasing graded lexicographic order."""
        return sorted(self.terms.items(), key=lambda t: _grlex_key(t[0]), reverse=True)

    def leading_term(self) -> tuple[Exponent, Fraction]:
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        exp = max(self.terms, key=_grlex_key)
        return exp, self.terms[exp]

    def variables(self) -> set[int]:
        used = set()
        for e in self.terms:
            used.update(i for i, k in enumerate(e) if k)
        return used

    # -- arithmetic ----------------------------------------------------

    def _check(self, other: "Polynomial"):
        if self.space != other.space:
            raise DimensionError(f"variable spaces differ: {self.space.all_names} vs {other.space.all_names}")

    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            self._check(other)
            return other
        if isinstance(other, (int, Fraction)):
            return Polynomial.constant(self.space, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self.terms)
        for e, c in other.terms.items():
            s = out.get(e, 0) + c
            if s:
                out[e] = s
            else:
                out.pop(e, None)
        return Polynomial._raw(self.space, out)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial._raw(self.space, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other - self

    def scale(self, r: Scalar) -> "Polynomial":
        r = Fraction(r)
        if not r:
            return self.space.zero()
        return Polynomial._raw(self.space, {e: c * r for e, c in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        self._check(other)
        if not self.terms or not other.terms:
            return self.space.zero()
        out: dict[Exponent, Fraction] = {}
        for ea, ca in self.terms.items():
            for eb, cb in other.terms.items():
                e = tuple(x + y for x, y in zip(ea, eb))
                out[e] = out.get(e, 0) + ca * cb
        return Polynomial._raw(self.space, {e: c for e, c in out.items() if c})

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("exponent must be a nonnegative integer")
        result = self.space.one()
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __truediv__(self, r):
        if isinstance(r, (int, Fraction)):
            return self.scale(1 / Fraction(r))
        return NotImplemented

    def exact_div(self, d: "Polynomial") -> "Polynomial | None":
        """Quotient ``self / d`` if ``d`` divides exactly, else ``None``."""
        self._check(d)
        if d.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        lead_e, lead_c = d.leading_term()
        rem = self
        quot: dict[Exponent, Fraction] = {}
        while not rem.is_zero():
            e, c = rem.leading_term()
            qe = tuple(a - b for a, b in zip(e, lead_e))
            if any(k < 0 for k in qe):
                return None
            qc = c / lead_c
            quot[qe] = quot.get(qe, 0) + qc
            rem = rem - Polynomial._raw(self.space, {qe: qc}) * d
        return Polynomial(self.space, quot)

    # -- calculus and evaluation ---------------------------------------

    def diff(self, i: int) -> "Polynomial":
        """Partial derivative with respect to variable ``i`` (0-based)."""
        if not 0 <= i < self.space.nvars:
            raise DimensionError(f"variable index {i} out of range for {self.space.nvars} variables")
        out = {}
        for e, c in self.terms.items():
            k = e[i]
            if k:
                ne = e[:i] + (k - 1,) + e[i + 1:]
                out[ne] = c * k
        return Polynomial._raw(self.space, out)

    def gradient(self) -> list["Polynomial"]:
        return [self.diff(i) for i in range(self.space.dim)]

    def __call__(self, *point):
        return self.eval(point[0] if len(point) == 1 and isinstance(point[0], (list, tuple)) else point)

    def eval(self, point: Sequence) -> Fraction:
        """Exact value at ``point`` (length = number of variables).

        Float entries are accepted and produce a float result.
        """
        if len(point) != self.space.nvars:
            raise DimensionError(f"point has length {len(point)}, expected {self.space.nvars}")
        vals = [v if isinstance(v, float) else Fraction(v) for v in point]
        total = Fraction(0)
        for e, c in self.terms.items():
            term = c
            for v, k in zip(vals, e):
                if k:
                    term = term * v**k
            total = total + term
        return total

    def substitute(self, images: Sequence["Polynomial"], space: VarSpace | None = None) -> "Polynomial":
        """Compose: replace variable ``i`` by ``images[i]`` (all in one target space)."""
        if len(images) != self.space.nvars:
            raise DimensionError(f"need {self.space.nvars} images, got {len(images)}")
        if space is None:
            if not images:
                raise ValueError("target space required")
            space = images[0].space
        for im in images:
            if im.space != space:
                raise DimensionError("substitution images must share one space")
        powers: list[dict[int, Polynomial]] = [{0: space.one()} for _ in images]

        def power(i, k):
            cache = powers[i]
            if k not in cache:
                cache[k] = power(i, k - 1) * images[i]
            return cache[k]

        result = space.zero()
        for e, c in self.terms.items():
            term = Polynomial.constant(space, c)
            for i, k in enumerate(e):
                if k:
                    term = term * power(i, k)
            result = result + term
        return result

    def partial_eval(self, values: Mapping[int, Scalar]) -> "Polynomial":
        """Fix some variables to rational values, staying in the same space."""
        out: dict[Exponent, Fraction] = {}
        for e, c in self.terms.items():
            ne = list(e)
            for i, v in values.items():
                if e[i]:
                    c = c * Fraction(v) ** e[i]
                    ne[i] = 0
            ne = tuple(ne)
            out[ne] = out.get(ne, 0) + c
        return Polynomial(self.space, out)

    def coefficients_in(self, i: int) -> dict[int, "Polynomial"]:
        """Split by powers of variable ``i``: ``{k: coefficient of v_i**k}``."""
        out: dict[int, dict[Exponent, Fraction]] = {}
        for e, c in self.terms.items():
            k = e[i]
            out.setdefault(k, {})[e[:i] + (0,) + e[i + 1:]] = c
        return {k: Polynomial._raw(self.space, t) for k, t in sorted(out.items())}

    def lift(self, space: VarSpace) -> "Polynomial":
        """Embed into a space whose variable list extends this one's."""
        if space == self.space:
            return self
        n = self.space.nvars
        if space.all_names[:n] != self.space.all_names:
            raise DimensionError(f"cannot lift {self.space.all_names} into {space.all_names}")
        pad = (0,) * (space.nvars - n)
        return Polynomial._raw(space, {e + pad: c for e, c in self.terms.items()})

    def restrict(self, space: VarSpace) -> "Polynomial":
        """Inverse of :meth:`lift`; fails if dropped variables occur."""
        m = space.nvars
        if self.space.all_names[:m] != space.all_names:
            raise DimensionError(f"cannot restrict {self.space.all_names} to {space.all_names}")
        out = {}
        for e, c in self.terms.items():
            if any(e[m:]):
                raise DimensionError("polynomial depends on variables outside the target space")
            out[e[:m]] = c
        return Polynomial._raw(space, out)

    # -- comparison and display ----------------------------------------

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Polynomial.constant(self.space, other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.space == other.space and self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.space, frozenset(self.terms.items())))
        return self._hash

    def __str__(self):
        return self.render()

    def __repr__(self):
        return f"Polynomial({self.render()!r})"

    def render(self) -> str:
        """Canonical string, re-parseable by :func:`parse_polynomial`."""
        if not self.terms:
            return "0"
        names = self.space.all_names
        parts = []
        for e, c in self.sorted_terms():
            mono = "*".join(
                name if k == 1 else f"{name}^{k}" for name, k in zip(names, e) if k
            )
            mag = abs(c)
            if not mono:
                body = str(mag)
            elif mag == 1:
                body = mono
            else:
                body = f"{mag}*{mono}"
            parts.append(("-" if c < 0 else "+", body))
        sign, body = parts[0]
        out = ("-" if sign == "-" else "") + body
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out


def poly_sum(polys: Iterable[Polynomial], space: VarSpace) -> Polynomial:
    total = space.zero()
    for p in polys:
        total = total + p
    return total


# -- parsing ---------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(\S))")


def _tokenize(text: str):
    pos = 0
    tokens = []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            break
        col = m.start(m.lastindex)
        if m.group(1) is not None:
            tokens.append(("num", int(m.group(1)), col))
        elif m.group(2) is not None:
            tokens.append(("name", m.group(2), col))
        else:
            ch = m.group(3)
            if ch not in "+-*^/()":
                raise PolynomialSyntaxError(f"unexpected character {ch!r}", text, col)
            tokens.append(("op", ch, col))
        pos = m.end()
    tokens.append(("end", None, len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, space: VarSpace):
        self.text = text
        self.space = space
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos]

    def take(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def fail(self, msg, tok=None):
        tok = tok or self.peek()
        raise PolynomialSyntaxError(msg, self.text, tok[2])

    def parse(self) -> Polynomial:
        if self.peek()[0] == "end":
            self.fail("empty polynomial")
        p = self.expr()
        if self.peek()[0] != "end":
            self.fail(f"unexpected token {self.peek()[1]!r}")
        return p

    def expr(self):
        p = self.term()
        while self.peek()[:2] in (("op", "+"), ("op", "-")):
            op = self.take()[1]
            q = self.term()
            p = p + q if op == "+" else p - q
        return p

    def term(self):
        p = self.unary()
        while self.peek()[:2] == ("op", "*"):
            self.take()
            p = p * self.unary()
        return p

    def unary(self):
        tok = self.peek()
        if tok[:2] == ("op", "-"):
            self.take()
            return -self.unary()
        if tok[:2] == ("op", "+"):
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[:2] == ("op", "^"):
            self.take()
            tok = self.take()
            if tok[0] != "num":
                self.fail("exponent must be a nonnegative integer", tok)
            return base ** tok[1]
        return base

    def atom(self):
        tok = self.take()
        kind, val, col = tok
        if kind == "num":
            value = Fraction(val)
            if self.peek()[:2] == ("op", "/"):
                self.take()
                den = self.take()
                if den[0] != "num":
                    self.fail("expected integer denominator", den)
                if den[1] == 0:
                    self.fail("zero denominator", den)
                value = Fraction(val, den[1])
            return Polynomial.constant(self.space, value)
        if kind == "name":
            if val not in self.space.all_names:
                raise UnknownVariableError(val, self.text, col)
            return self.space.var(self.space.all_names.index(val))
        if tok[:2] == ("op", "("):
            p = self.expr()
            close = self.take()
            if close[:2] != ("op", ")"):
                self.fail("expected ')'", close)
            return p
        self.fail(f"unexpected token {val!r}" if val is not None else "unexpected end of input", tok)


def parse_polynomial(text: str | int | Fraction, space: VarSpace) -> Polynomial:
    """Parse ``x1*x3 - 2/3*x2^2`` style text into a polynomial over ``space``."""
    if isinstance(text, (int, Fraction)):
        return Polynomial.constant(space, text)
    if not isinstance(text, str):
        raise PolynomialSyntaxError(f"expected a polynomial string, got {type(text).__name__}")
    return _Parser(text, space).parse()


def parse_rational(text: str | int) -> Fraction:
    """Parse ``3``, ``-2/5`` (strings or ints) into a Fraction; floats rejected."""
    if isinstance(text, bool):
        raise ValueError("boolean is not a rational literal")
    if isinstance(text, int):
        return Fraction(text)
    if isinstance(text, Fraction):
        return text
    if not isinstance(text, str) or not re.fullmatch(r"\s*[+-]?\d+(\s*/\s*\d+)?\s*", text):
        raise ValueError(f"not a rational literal: {text!r}")
    num, _, den = text.partition("/")
    num = int(num.replace(" ", ""))
    den = int(den) if den else 1
    if den == 0:
        raise ValueError(f"zero denominator in {text!r}")
    return Fraction(num, den)
