"""Command-line front end: ``partpoisson <command> --input FILE``.

Exit codes: 0 all checks pass, 1 some check fails, 2 usage or parse error,
3 no failures but at least one indeterminate result.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from typing import Callable

import numpy as np

from . import __version__
from .bistructures import check_pn, check_pomega, is_nijenhuis, recursion_operator
from .geomops import polynomial_casimirs, project_pn, project_poisson, rank_report, restrict_pn, restrict_poisson
from .kdvlab import Grid, KdvSystem, build_pair, discrete_casimir_mass, initial_profile, integrate, jacobiator_refinement_study, lenard_step
from .liepoisson import argument_translation_chain, casimir_check, frozen_anchor, killing_casimir, killing_form
from .partial import check_matrix_antisymmetry, check_partial_antisymmetry
from .polycore import PolynomialSyntaxError
from .schouten import is_compatible, is_poisson, pencil_check
from .structfile import StructureError, StructureFile, parse_structure
from .verdict import FAIL, INDETERMINATE, NOT_APPLICABLE, PASS, Verdict, render

REPORT_VERSION = 1
COMMANDS = ("check", "pencil", "chain", "casimir", "rank", "restrict", "project", "kdv")


class UsageError(Exception):
    pass


class Run:
    """Collects timed checks and extra results for one report."""

    def __init__(self):
        self.checks: list[dict] = []
        self.results: dict = {}

    def add(self, verdict: Verdict, timing_ms: float = 0.0):
        d = verdict.to_dict()
        d["timing_ms"] = round(timing_ms, 3)
        self.checks.append(d)

    def timed(self, fn: Callable[[], Verdict]) -> Verdict:
        t0 = time.perf_counter()
        v = fn()
        self.add(v, (time.perf_counter() - t0) * 1000)
        return v


def _need(sf: StructureFile, *names):
    missing = [n for n in names if getattr(sf, n) in (None, {}, [])]
    if missing:
        raise UsageError(f"structure file lacks required section(s): {', '.join(missing)}")


def _lie_checks(run: Run, sf: StructureFile):
    if sf.lie_algebra is None:
        return
    bad = sf.lie_algebra.defects()

    def constants():
        if bad:
            return Verdict.fail("structure constants", bad[0], reason=f"{len(bad)} violated identities")
        return Verdict.ok("structure constants")

    run.timed(constants)


def cmd_check(sf: StructureFile, args, run: Run):
    _need(sf, "anchor")
    P = sf.anchor
    _lie_checks(run, sf)
    run.timed(lambda: check_partial_antisymmetry(P))
    if not P.is_full:
        # the zero extension is informational: partial anchors need not extend
        ext = check_matrix_antisymmetry(P.naive_extension(), "zero extension antisymmetry")
        run.results["zero_extension_antisymmetric"] = ext.passed
    run.timed(lambda: is_poisson(P))
    if sf.second_anchor is not None:
        run.timed(lambda: is_compatible(P, sf.second_anchor))
    if sf.nijenhuis is not None:
        run.timed(lambda: is_nijenhuis(sf.nijenhuis))
        run.timed(lambda: check_pn(P, sf.nijenhuis))
    if sf.omega is not None:
        v = run.timed(lambda: check_pomega(P, sf.omega))
        if v.passed:
            N = recursion_operator(P, sf.omega)
            run.results["recursion_operator"] = N.render()
            run.timed(lambda: _rename(is_nijenhuis(N), "recursion operator torsion"))


def _rename(v: Verdict, name: str) -> Verdict:
    v.check = name
    return v


def _second(sf: StructureFile):
    if sf.second_anchor is not None:
        return sf.second_anchor
    if sf.lie_algebra is not None and sf.chain:
        return frozen_anchor(sf.lie_algebra, sf.chain["m0"])
    raise UsageError("pencil needs second_anchor, or lie_algebra with chain.m0")


def cmd_pencil(sf, args, run: Run):
    _need(sf, "anchor")
    Q = _second(sf)
    P = sf.anchor
    run.timed(lambda: is_poisson(P))
    run.timed(lambda: _rename(is_poisson(Q), "jacobi (second)"))
    run.timed(lambda: is_compatible(P, Q))
    run.timed(lambda: pencil_check(P, Q))
    run.timed(lambda: pencil_check(P, Q, two_parameter=True))


def cmd_chain(sf, args, run: Run):
    _need(sf, "lie_algebra", "chain")
    g = sf.lie_algebra
    _lie_checks(run, sf)
    if g.defects():
        return
    cas = sf.chain["casimir"]
    if cas == "auto-killing":
        kc = killing_casimir(g)
        if kc.casimir is None:
            raise UsageError(f"Killing form is degenerate (rank {kc.rank}); give chain.casimir explicitly")
        C = kc.casimir
    else:
        C = sf.space.parse(cas)
    depth = args.depth if args.depth is not None else sf.chain.get("depth")
    try:
        chain = argument_translation_chain(g, sf.chain["m0"], C, depth)
    except ValueError as err:
        raise UsageError(str(err)) from err
    run.results["casimir"] = C.render()
    run.results["hamiltonians"] = [h.render() for h in chain.hamiltonians]
    if chain.notice:
        run.results["notice"] = chain.notice
    for v in chain.verdicts:
        run.add(v)


def cmd_casimir(sf, args, run: Run):
    _need(sf, "anchor")
    P = sf.anchor
    if sf.lie_algebra is not None and not sf.lie_algebra.defects():
        g = sf.lie_algebra
        run.results["killing_form"] = render(killing_form(g))
        kc = killing_casimir(g)
        run.results["killing_rank"] = kc.rank
        if kc.casimir is not None:
            run.results["killing_casimir"] = kc.casimir.render()
            run.timed(lambda: _rename(casimir_check(kc.casimir, P), "killing casimir"))
    found = polynomial_casimirs(P, args.max_degree)
    run.results["max_degree"] = args.max_degree
    run.results["casimirs"] = [c.render() for c in found]
    for i, C in enumerate(found):
        run.timed(lambda C=C, i=i: _rename(casimir_check(C, P), f"casimir {i + 1}"))


def cmd_rank(sf, args, run: Run):
    _need(sf, "anchor")
    rep = rank_report(sf.anchor, samples=args.samples, seed=args.seed)
    run.results["rank"] = rep.to_dict()

    def parity():
        # only full antisymmetric matrices are forced to have even rank
        applies = sf.anchor.is_full and check_partial_antisymmetry(sf.anchor).passed
        if not applies or rep.generic_rank % 2 == 0:
            return Verdict.ok("generic rank parity")
        return Verdict.fail("generic rank parity", rep.generic_rank, reason="antisymmetric matrix of odd rank")

    run.timed(parity)

    def sampled():
        if rep.max_sampled_rank == rep.generic_rank:
            return Verdict("sampled rank attains generic rank", INDETERMINATE,
                           reason=f"{len(rep.sampled)} sampled points; sampling cannot certify")
        return Verdict("sampled rank attains generic rank", INDETERMINATE,
                       reason=f"max sampled rank {rep.max_sampled_rank} < generic rank {rep.generic_rank}")

    if args.samples_check:
        run.timed(sampled)


def cmd_restrict(sf, args, run: Run):
    _need(sf, "anchor", "restrict")
    if sf.nijenhuis is not None:
        res = restrict_pn(sf.anchor, sf.nijenhuis, sf.restrict)
    else:
        res = restrict_poisson(sf.anchor, sf.restrict, samples=args.samples, seed=args.seed)
    _induced(run, res)


def cmd_project(sf, args, run: Run):
    _need(sf, "anchor", "project")
    if sf.nijenhuis is not None:
        res = project_pn(sf.anchor, sf.nijenhuis, sf.project)
    else:
        res = project_poisson(sf.anchor, sf.project)
    _induced(run, res)


def _induced(run: Run, res):
    run.add(res.verdict)
    if res.anchor is not None:
        run.results["anchor"] = res.anchor.render()
    if res.nijenhuis is not None:
        run.results["nijenhuis"] = res.nijenhuis.render()


def cmd_kdv(sf, args, run: Run):
    opts = dict(sf.kdv) if sf.kdv else {"n": 64, "dt": 1e-4, "steps": 1000, "u0": "cos"}
    for key in ("n", "dt", "steps", "u0"):
        val = getattr(args, key)
        if val is not None:
            opts[key] = val
    grid = Grid(opts["n"])
    system = KdvSystem(grid)

    def antisym():
        for name, M in (("D1", system.D1_exact), ("D3", system.D3_exact)):
            for i in range(grid.n):
                for j in range(grid.n):
                    if M[i][j] != -M[j][i]:
                        return Verdict.fail("difference operator antisymmetry", str(M[i][j] + M[j][i]),
                                            where=(i + 1, j + 1), reason=f"{name} is not antisymmetric")
        return Verdict.ok("difference operator antisymmetry")

    run.timed(antisym)

    def mass_casimir():
        small = Grid(8, grid.length)
        P1, _ = build_pair(small)
        return _rename(casimir_check(discrete_casimir_mass(small), P1), "mass Casimir of D1 (N=8, exact)")

    run.timed(mass_casimir)
    try:
        u0 = initial_profile(grid, opts["u0"])
    except ValueError as err:
        raise UsageError(str(err)) from err
    g1 = lenard_step(system, u0, np.ones(grid.n))
    g2 = lenard_step(system, u0, g1.g)
    run.results["lenard_residuals"] = [g1.residual, g2.residual]

    def lenard():
        worst = max(g1.residual, g2.residual)
        if worst <= 1e-8 * max(1.0, float(np.max(np.abs(g2.rhs)))):
            return Verdict.ok("lenard residual", reason=f"max residual {worst:.3e}")
        return Verdict.fail("lenard residual", worst, reason="Lenard solve residual above 1e-8 (relative)")

    run.timed(lenard)
    try:
        traj = integrate(system, u0, opts["dt"], opts["steps"])
    except (ValueError, RuntimeError) as err:
        raise UsageError(str(err)) from err
    run.results["drift"] = {k: float(f"{v:.6e}") for k, v in traj.drift.items()}

    def mass():
        d = traj.drift["mass"]
        if d <= 1e-12:
            return Verdict.ok("mass drift <= 1e-12")
        return Verdict.fail("mass drift <= 1e-12", d, reason="mass not conserved to round-off")

    run.timed(mass)
    rows = jacobiator_refinement_study([16, 32, 64])
    run.results["jacobiator_study"] = [
        {"n": r.n, "p1": float(f"{r.p1:.6e}"), "p2": float(f"{r.p2:.6e}"),
         "order": None if r.order is None else round(r.order, 4)} for r in rows]
    run.results["kdv"] = {k: opts[k] for k in ("n", "dt", "steps", "u0")}


HANDLERS = {
    "check": cmd_check,
    "pencil": cmd_pencil,
    "chain": cmd_chain,
    "casimir": cmd_casimir,
    "rank": cmd_rank,
    "restrict": cmd_restrict,
    "project": cmd_project,
    "kdv": cmd_kdv,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="partpoisson", description="Exact checks for partial Poisson and related structures.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        s = sub.add_parser(name)
        s.add_argument("--input", "-i", required=name != "kdv", help="structure file (.toml or .json)")
        s.add_argument("--output", "--report", "-o", dest="output", help="write the JSON report here")
        s.add_argument("--max-degree", type=int, default=2)
        s.add_argument("--samples", type=int, default=16)
        s.add_argument("--seed", type=int, default=0)
        s.add_argument("--depth", type=int)
        if name == "rank":
            s.add_argument("--samples-check", action="store_true", help="add the sampled-rank diagnostic as a check")
        else:
            s.set_defaults(samples_check=False)
        if name == "kdv":
            s.add_argument("--n", type=int)
            s.add_argument("--dt", type=float)
            s.add_argument("--steps", type=int)
            s.add_argument("--u0")
        else:
            s.set_defaults(n=None, dt=None, steps=None, u0=None)
    return p


def overall(checks: list[dict]) -> tuple[str, int]:
    statuses = [c["status"] for c in checks]
    if FAIL in statuses:
        return FAIL, 1
    if NOT_APPLICABLE in statuses or INDETERMINATE in statuses:
        return INDETERMINATE, 3
    return PASS, 0


def execute(argv: list[str] | None = None) -> tuple[dict | None, int, str, str | None]:
    """Run a command; returns (report or None, exit code, error message, output path)."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as err:
        return None, 0 if err.code == 0 else 2, "", None
    try:
        if args.max_degree < 1 or args.samples < 1:
            raise UsageError("--max-degree and --samples must be positive")
        if args.input:
            sf = parse_structure(args.input)
        elif args.command == "kdv":
            sf = StructureFile({"kdv": {}})
        else:  # pragma: no cover - argparse enforces --input
            raise UsageError("--input is required")
        if args.command == "kdv" and sf.kdv == {} and args.input:
            raise UsageError("kdv command needs a [kdv] section")
        run = Run()
        HANDLERS[args.command](sf, args, run)
    except (UsageError, StructureError, PolynomialSyntaxError, OSError) as err:
        return None, 2, str(err), None
    status, code = overall(run.checks)
    report = {
        "report_version": REPORT_VERSION,
        "tool": "partpoisson",
        "version": __version__,
        "command": args.command,
        "input_digest": sf.digest,
        "seed": args.seed,
        "status": status,
        "checks": run.checks,
        "results": run.results,
    }
    return report, code, "", args.output


def dumps_report(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2) + "\n"


def main(argv: list[str] | None = None) -> int:
    report, code, err, args_out = execute(argv)
    if report is None:
        if err:
            print(f"error: {err}", file=sys.stderr)
        return code
    text = dumps_report(report)
    if args_out:
        with open(args_out, "w", encoding="utf-8") as fh:
            fh.write(text)
        print(f"{report['command']}: {report['status']} ({len(report['checks'])} checks) -> {args_out}")
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
