"""Structure files: TOML (canonical) or JSON with the same tree.

Sections: ``space``, ``anchor``, ``second_anchor``, ``nijenhuis``, ``omega``,
``lie_algebra``, ``chain``, ``restrict``, ``project``, ``kdv``.  Exactly one of
``anchor``, ``lie_algebra`` and ``kdv`` is the primary subject.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .fields import OneOneTensor, TwoForm, VecField
from .geomops import AffineImmersion, LinearSubmersion
from .liepoisson import LieAlgebraSpec, lp_anchor
from .partial import CoflatBasis, PartialAnchor
from .polycore import Polynomial, PolynomialSyntaxError, VarSpace, parse_rational

PRIMARY = ("anchor", "lie_algebra", "kdv")
KNOWN = {"space", "anchor", "second_anchor", "nijenhuis", "omega", "lie_algebra", "chain", "restrict", "project", "kdv"}


class StructureError(ValueError):
    """Malformed structure file; the message names the offending section."""


@dataclass
class StructureFile:
    canonical: dict
    space: VarSpace | None = None
    anchor: PartialAnchor | None = None
    second_anchor: PartialAnchor | None = None
    nijenhuis: OneOneTensor | None = None
    omega: TwoForm | None = None
    lie_algebra: LieAlgebraSpec | None = None
    chain: dict = field(default_factory=dict)
    restrict: AffineImmersion | None = None
    project: LinearSubmersion | None = None
    kdv: dict = field(default_factory=dict)

    @property
    def primary(self) -> str:
        return next(k for k in PRIMARY if k in self.canonical)

    @property
    def digest(self) -> str:
        return canonical_digest(self.canonical)

    def dumps(self) -> str:
        return json.dumps(self.canonical, sort_keys=True, indent=2)


def canonical_digest(tree: dict) -> str:
    blob = json.dumps(tree, sort_keys=True, separators=(",", ":"), ensure_ascii=True)
    return "sha256:" + hashlib.sha256(blob.encode()).hexdigest()


def load_tree(path: str | Path) -> dict:
    p = Path(path)
    text = p.read_text(encoding="utf-8")
    if p.suffix.lower() == ".json":
        try:
            tree = json.loads(text)
        except json.JSONDecodeError as err:
            raise StructureError(f"JSON syntax error at line {err.lineno}, column {err.colno}: {err.msg}") from err
    else:
        try:
            tree = tomllib.loads(text)
        except tomllib.TOMLDecodeError as err:
            raise StructureError(f"TOML syntax error: {err}") from err
    if not isinstance(tree, dict):
        raise StructureError("top level must be a table")
    return tree


def parse_structure(path: str | Path) -> StructureFile:
    return build_structure(load_tree(path))


def loads(text: str, fmt: str = "toml") -> StructureFile:
    tree = json.loads(text) if fmt == "json" else tomllib.loads(text)
    return build_structure(tree)


# -- helpers ------------------------------------------------------------------


def _rat(v, where: str) -> Fraction:
    if isinstance(v, float):
        raise StructureError(f"{where}: non-rational literal {v!r}; write it as a string like \"1/2\"")
    try:
        return parse_rational(v)
    except (ValueError, TypeError) as err:
        raise StructureError(f"{where}: {err}") from err


def _rat_matrix(rows, where: str, shape=None) -> list[list[Fraction]]:
    if not isinstance(rows, list) or not rows or not all(isinstance(r, list) for r in rows):
        raise StructureError(f"{where}: expected a non-empty list of rows")
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise StructureError(f"{where}: rows have different lengths")
    if shape and (len(rows), width) != shape:
        raise StructureError(f"{where}: expected a {shape[0]}x{shape[1]} matrix")
    return [[_rat(v, f"{where}[{i + 1}][{j + 1}]") for j, v in enumerate(r)] for i, r in enumerate(rows)]


def _poly(text, space: VarSpace, where: str) -> Polynomial:
    if isinstance(text, bool) or isinstance(text, float):
        raise StructureError(f"{where}: non-rational literal {text!r}")
    if isinstance(text, int):
        return Polynomial.constant(space, text)
    if not isinstance(text, str):
        raise StructureError(f"{where}: expected a polynomial string")
    try:
        return space.parse(text)
    except PolynomialSyntaxError as err:
        raise StructureError(f"{where}: {err}") from err


def _poly_matrix(rows, space: VarSpace, where: str, shape=None) -> list[list[Polynomial]]:
    if not isinstance(rows, list) or not rows or not all(isinstance(r, list) for r in rows):
        raise StructureError(f"{where}: expected a non-empty list of rows")
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise StructureError(f"{where}: rows have different lengths")
    if shape and (len(rows), width) != shape:
        raise StructureError(f"{where}: expected a {shape[0]}x{shape[1]} matrix")
    return [[_poly(v, space, f"{where}[{i + 1}][{j + 1}]") for j, v in enumerate(r)] for i, r in enumerate(rows)]


def _render_matrix(rows) -> list[list[str]]:
    return [[v.render() if isinstance(v, Polynomial) else str(v) for v in r] for r in rows]


# -- assembly -----------------------------------------------------------------


def _space_from(tree: dict) -> VarSpace | None:
    sec = tree.get("space")
    if sec is not None:
        if "variables" in sec:
            names = sec["variables"]
            if not isinstance(names, list) or not all(isinstance(n, str) for n in names):
                raise StructureError("space.variables must be a list of names")
            try:
                return VarSpace(tuple(names))
            except ValueError as err:
                raise StructureError(f"space: {err}") from err
        if "dimension" in sec:
            n = sec["dimension"]
            if not isinstance(n, int) or n < 1:
                raise StructureError("space.dimension must be a positive integer")
            return VarSpace.standard(n)
        raise StructureError("space needs 'variables' or 'dimension'")
    return None


def _anchor_from(sec: dict, space: VarSpace, name: str):
    if not isinstance(sec, dict):
        raise StructureError(f"{name} must be a table")
    n = space.dim
    if "matrix" in sec:
        rows = _poly_matrix(sec["matrix"], space, f"{name}.matrix", (n, n))
        anchor = PartialAnchor(CoflatBasis.full(space), [VecField(space, r) for r in rows])
        canon = {"matrix": _render_matrix(rows)}
    elif "images" in sec:
        coflat = _rat_matrix(sec["coflat"], f"{name}.coflat") if "coflat" in sec else None
        if coflat is not None and len(coflat[0]) != n:
            raise StructureError(f"{name}.coflat: covectors must have {n} entries")
        k = len(coflat) if coflat else n
        rows = _poly_matrix(sec["images"], space, f"{name}.images", (k, n))
        try:
            basis = CoflatBasis(space, coflat) if coflat else CoflatBasis.full(space)
        except ValueError as err:
            raise StructureError(f"{name}.coflat: {err}") from err
        anchor = PartialAnchor(basis, [VecField(space, r) for r in rows])
        canon = {"images": _render_matrix(rows)}
        if coflat:
            canon["coflat"] = _render_matrix(coflat)
    else:
        raise StructureError(f"{name} needs 'matrix' or 'images'")
    return anchor, canon


def _lie_from(sec: dict):
    n = sec.get("dimension")
    if not isinstance(n, int) or n < 1:
        raise StructureError("lie_algebra.dimension must be a positive integer")
    names = sec.get("names")
    if names is not None and (not isinstance(names, list) or len(names) != n):
        raise StructureError(f"lie_algebra.names must list {n} names")
    consts: dict[tuple[int, int, int], Fraction] = {}
    for t, entry in enumerate(sec.get("constants", [])):
        where = f"lie_algebra.constants[{t + 1}]"
        if not isinstance(entry, list) or len(entry) != 4:
            raise StructureError(f"{where}: expected [i, j, k, \"c\"]")
        i, j, k = entry[:3]
        if not all(isinstance(v, int) and 1 <= v <= n for v in (i, j, k)):
            raise StructureError(f"{where}: indices must be integers in 1..{n}")
        c = _rat(entry[3], where)
        if i == j:
            if c:
                raise StructureError(f"{where}: [e_i, e_i] must vanish")
            continue
        # listing [e_i, e_j] also fixes [e_j, e_i]
        for key, val in (((i - 1, j - 1, k - 1), c), ((j - 1, i - 1, k - 1), -c)):
            if consts.get(key, val) != val:
                raise StructureError(f"{where}: conflicts with an earlier constant")
            consts[key] = val
    g = LieAlgebraSpec(n, consts, names)
    canon = {"dimension": n, "constants": g.render()}
    if names:
        canon["names"] = list(names)
    return g, canon


def build_structure(tree: dict) -> StructureFile:
    unknown = set(tree) - KNOWN
    if unknown:
        raise StructureError(f"unknown sections: {sorted(unknown)}")
    primaries = [k for k in PRIMARY if k in tree]
    if len(primaries) != 1:
        raise StructureError(f"exactly one of {list(PRIMARY)} is required, found {primaries or 'none'}")
    canon: dict[str, Any] = {}
    sf = StructureFile(canon)
    space = _space_from(tree)

    if "lie_algebra" in tree:
        g, c = _lie_from(tree["lie_algebra"])
        sf.lie_algebra = g
        canon["lie_algebra"] = c
        if space is None:
            space = g.space
        elif space.names != g.space.names:
            raise StructureError("space.variables must match the Lie algebra coordinate names")
        sf.anchor = lp_anchor(g, strict=False)

    if "anchor" in tree:
        if space is None:
            mat = tree["anchor"].get("matrix") or tree["anchor"].get("images")
            if not mat or not isinstance(mat, list) or not isinstance(mat[0], list):
                raise StructureError("anchor: cannot infer the dimension; add a [space] section")
            space = VarSpace.standard(len(mat[0]))
        sf.anchor, canon["anchor"] = _anchor_from(tree["anchor"], space, "anchor")

    if space is not None:
        canon["space"] = {"variables": list(space.names)}
    sf.space = space

    if "second_anchor" in tree:
        if sf.anchor is None:
            raise StructureError("second_anchor needs a primary anchor")
        sf.second_anchor, canon["second_anchor"] = _anchor_from(tree["second_anchor"], space, "second_anchor")
        if sf.second_anchor.basis != sf.anchor.basis:
            raise StructureError("second_anchor must use the same covector subspace as anchor")

    for name in ("nijenhuis", "omega"):
        if name in tree:
            if space is None:
                raise StructureError(f"{name} needs a coordinate space")
            sec = tree[name]
            if not isinstance(sec, dict) or "matrix" not in sec:
                raise StructureError(f"{name} needs a 'matrix'")
            rows = _poly_matrix(sec["matrix"], space, f"{name}.matrix", (space.dim, space.dim))
            try:
                obj = OneOneTensor(space, rows) if name == "nijenhuis" else TwoForm(space, rows)
            except ValueError as err:
                raise StructureError(f"{name}: {err}") from err
            setattr(sf, name, obj)
            canon[name] = {"matrix": _render_matrix(rows)}

    if "chain" in tree:
        if sf.lie_algebra is None:
            raise StructureError("chain needs a lie_algebra section")
        sec = tree["chain"]
        m0 = sec.get("m0")
        if not isinstance(m0, list) or len(m0) != sf.lie_algebra.dim:
            raise StructureError(f"chain.m0 must have {sf.lie_algebra.dim} entries")
        m0 = [_rat(v, f"chain.m0[{i + 1}]") for i, v in enumerate(m0)]
        cas = sec.get("casimir", "auto-killing")
        if cas != "auto-killing":
            cas = _poly(cas, space, "chain.casimir").render()
        depth = sec.get("depth")
        if depth is not None and (not isinstance(depth, int) or depth < 0):
            raise StructureError("chain.depth must be a non-negative integer")
        sf.chain = {"m0": m0, "casimir": cas, "depth": depth}
        canon["chain"] = {"m0": [str(v) for v in m0], "casimir": cas}
        if depth is not None:
            canon["chain"]["depth"] = depth

    if "restrict" in tree:
        if sf.anchor is None:
            raise StructureError("restrict needs an anchor")
        sec = tree["restrict"]
        A = _rat_matrix(sec.get("A"), "restrict.A")
        x0 = [_rat(v, f"restrict.x0[{i + 1}]") for i, v in enumerate(sec.get("x0", [0] * len(A)))]
        try:
            sf.restrict = AffineImmersion(A, x0)
        except ValueError as err:
            raise StructureError(f"restrict: {err}") from err
        canon["restrict"] = {"A": _render_matrix(A), "x0": [str(v) for v in x0]}

    if "project" in tree:
        if sf.anchor is None:
            raise StructureError("project needs an anchor")
        B = _rat_matrix(tree["project"].get("B"), "project.B")
        try:
            sf.project = LinearSubmersion(B)
        except ValueError as err:
            raise StructureError(f"project: {err}") from err
        canon["project"] = {"B": _render_matrix(B)}

    if "kdv" in tree:
        sec = tree["kdv"]
        opts = {"n": 64, "dt": 1e-4, "steps": 1000, "u0": "cos"}
        for key, val in sec.items():
            if key not in opts:
                raise StructureError(f"kdv: unknown key {key!r}")
            opts[key] = val
        if not isinstance(opts["n"], int) or opts["n"] < 8:
            raise StructureError("kdv.n must be an integer >= 8")
        if not isinstance(opts["steps"], int) or opts["steps"] < 0:
            raise StructureError("kdv.steps must be a non-negative integer")
        if not isinstance(opts["dt"], (int, float)) or opts["dt"] <= 0:
            raise StructureError("kdv.dt must be positive")
        opts["dt"] = float(opts["dt"])
        sf.kdv = opts
        canon["kdv"] = dict(opts)
    return sf
