"""Command-line entry point.

Exit codes: 0 on success (or a positive answer), 1 when a yes/no command gets
a negative mathematical answer, 2 on usage or data errors.  With
``--format json`` only the JSON document goes to standard output.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from fractions import Fraction
from pathlib import Path

from . import catalog as catalog_mod
from . import cohomology as coh
from . import deformation, iso, lie
from .lie import LieAlgebra
from .linalg import rank
from .scalar import QQ, ScalarSyntaxError, format_poly, format_rat

log = logging.getLogger("nilcohom")


class UsageError(Exception):
    pass


# -- helpers ----------------------------------------------------------------------

def _dump(data) -> str:
    return json.dumps(data, sort_keys=True, indent=2)


def _rational(text: str, what: str) -> Fraction:
    try:
        x = QQ.parse(text)
    except (ScalarSyntaxError, ValueError) as exc:
        raise UsageError(f"{what}: {exc}") from None
    return x


def _catalog(args):
    if getattr(args, "_catalog_obj", None) is None:
        args._catalog_obj = catalog_mod.load_catalog(args.catalog)
    return args._catalog_obj


def _family(args, name: str) -> LieAlgebra:
    """Catalog entry by name, or a definition file by path."""
    path = Path(name)
    if path.suffix == ".lie" or (path.exists() and path.is_file()):
        if not path.is_file():
            raise UsageError(f"cannot read definition file {name}")
        return lie.load(path)
    return _catalog(args).get(name).algebra


def _at(A: LieAlgebra, args) -> LieAlgebra:
    at = getattr(args, "at", None)
    if at is None:
        return A
    if not A.field.parametric:
        raise UsageError(f"{A.name} has no parameter; --at does not apply")
    return lie.specialize(A, _rational(at, "--at"))


def _matrix_text(rows, fmt) -> str:
    cells = [[fmt(x) for x in r] for r in rows]
    if not cells:
        return "(empty)"
    w = max((len(c) for r in cells for c in r), default=1)
    return "\n".join("  ".join(c.rjust(w) for c in r) for r in cells)


def _vec(v, fmt) -> list:
    return [fmt(x) for x in v]


# -- subcommands ------------------------------------------------------------------

def cmd_validate(args):
    A = lie.load(args.file)            # Jacobi is checked while parsing
    nil = lie.is_nilpotent(A)
    data = {"name": A.name, "dim": A.dim, "field": A.field.name, "jacobi": True,
            "nilpotent": nil, "graded": A.grading is not None,
            "excluded": [format_rat(x) for x in A.excluded]}
    text = (f"{A.name}: dimension {A.dim} over {A.field.name}; Jacobi identity holds; "
            f"{'nilpotent' if nil else 'not nilpotent'}")
    return data, text, 0


def cmd_lcs(args):
    A = _at(_family(args, args.family), args)
    flag = lie.lcs(A)
    fmt = A.field.format
    data = {"family": A.name, "dims": list(flag.dims), "nilpotent": flag.nilpotent,
            "terms": [[_vec(v, fmt) for v in t.basis] for t in flag.terms]}
    lines = [f"{A.name}: lower central series dims {''.join(map(str, flag.dims))}"]
    for r, t in enumerate(flag.terms, 1):
        lines.append(f"g_{r} (dim {t.dim})")
        lines.extend("  " + " ".join(_vec(v, fmt)) for v in t.basis)
    if not flag.nilpotent:
        lines.append("series stabilizes above zero: not nilpotent")
    return data, "\n".join(lines), 0


def cmd_carnot(args):
    A = _at(_family(args, args.family), args)
    C = lie.carnot(A)
    fmt = C.field.format
    data = {"family": A.name, "dim": C.dim, "grading": list(C.grading),
            "brackets": {f"[{i + 1},{j + 1}]": {f"x{k + 1}": fmt(c) for k, c in enumerate(v) if c}
                         for (i, j), v in sorted(C.brackets.items())}}
    return data, lie.format_algebra(C).rstrip("\n"), 0


def cmd_betti(args):
    A = _at(_family(args, args.family), args)
    b = coh.betti_numbers(A)
    return {"betti": list(b)}, f"{A.name}: betti {' '.join(map(str, b))} (total {sum(b)})", 0


def cmd_cup(args):
    A = _at(_family(args, args.family), args)
    M = coh.cohomology(A)
    if args.p < 0 or args.q < 0:
        raise UsageError("--p and --q must be nonnegative")
    try:
        T = coh.cup_table(M, args.p, args.q)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    fmt = A.field.format
    lines = [f"{A.name}: cup H^{args.p} x H^{args.q} -> H^{args.p + args.q}"]
    for i, row in enumerate(T.entries):
        for j, cell in enumerate(row):
            if any(cell):
                lines.append(f"e{args.p}_{i + 1} * e{args.q}_{j + 1} = "
                             + " + ".join(f"({fmt(c)}) e{args.p + args.q}_{k + 1}"
                                          for k, c in enumerate(cell) if c))
    if len(lines) == 1:
        lines.append("all products vanish")
    return T.to_json(), "\n".join(lines), 0


def cmd_pairing(args):
    A = _at(_family(args, args.family), args)
    M = coh.cohomology(A)
    if not 0 <= args.k <= A.dim:
        raise UsageError(f"--k must lie in 0..{A.dim}")
    try:
        P = coh.poincare_pairing(M, args.k)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    r = rank(P)
    fmt = A.field.format
    data = {"family": A.name, "k": args.k, "matrix": [_vec(row, fmt) for row in P.rows],
            "rank": r, "nondegenerate": r == P.nrows == P.ncols}
    text = (f"{A.name}: pairing H^{args.k} x H^{A.dim - args.k} -> H^{A.dim}, rank {r}\n"
            + _matrix_text(P.rows, fmt))
    return data, text, 0


def cmd_catalog_check(args):
    cat = _catalog(args)
    reports = catalog_mod.validate_catalog(cat, args.names or None)
    data = catalog_mod.report_json(reports)
    lines = []
    for r in reports:
        status = "ok" if r.ok else "FAILED: " + ", ".join(r.failures())
        lines.append(f"{r.name:12s} {status}")
    lines.append("catalog valid" if data["ok"] else "catalog has mismatches")
    return data, "\n".join(lines), 0 if data["ok"] else 1


def _model(A: LieAlgebra, value: str):
    if value == "t":
        if not A.field.parametric:
            raise UsageError(f"{A.name} has no parameter to keep symbolic")
        return coh.cohomology(A)
    if not A.field.parametric:
        return coh.cohomology(A)
    return coh.cohomology(lie.specialize(A, _rational(value, "parameter")))


def cmd_iso_build(args):
    A = _family(args, args.family)
    if A.field.parametric and (args.s is None or args.t is None):
        raise UsageError(f"{A.name} is a family: give --s and --t (a rational value or 't')")
    s, t = args.s or "0", args.t or "0"
    Ms = _model(A, s)
    Mt = Ms if t == s else _model(A, t)
    if Ms.field is not Mt.field:
        Ms, Mt = (iso.lift_model(Ms), Mt) if Mt.field.parametric else (Ms, iso.lift_model(Mt))
    S = iso.build_graded_iso_system(Ms, Mt)
    data = S.to_json()
    text = (f"{A.name}: {len(S.variables)} variables in blocks "
            f"{[b.size for b in S.blocks]}, {len(S.equations)} equations"
            + (f"; inconsistent: {S.diagnostic}" if S.inconsistent else ""))
    return data, text, 0


def _load_system(path: str) -> iso.PolySystem:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path} is not valid JSON: {exc}") from None
    try:
        return iso.PolySystem.from_json(data)
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"{path} is not a polynomial system: {exc}") from None


def cmd_iso_reduce(args):
    S = iso.reduce_system(_load_system(args.system))
    data = S.to_json()
    text = [f"{len(S.equations)} equations remain, {len(S.ledger)} variables forced"]
    text.extend(f"  {e['var']} = {S.field.format(e['value'])}  [{e['rule']}]" for e in S.ledger)
    if S.inconsistent:
        text.append(f"inconsistent: {S.witness}")
    return data, "\n".join(text), 1 if S.inconsistent else 0


def cmd_iso_verify(args):
    S = _load_system(args.system)
    try:
        assignment = iso.load_assignment(args.assignment)
    except OSError as exc:
        raise UsageError(f"cannot read {args.assignment}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"{args.assignment} is not valid JSON: {exc}") from None
    v = iso.verify_solution(S, assignment)
    data = v.to_json(S.field)
    dets = ", ".join(f"deg {k}: {S.field.format(x)}" for k, x in v.determinants.items())
    text = (f"equations vanish: {v.equations_vanish} ({len(v.failing)} failing)\n"
            f"block determinants: {dets}\n"
            f"{'verified isomorphism' if v.isomorphism else 'not an isomorphism'}")
    return data, text, 0 if v.isomorphism else 1


def _load_guesses(path):
    if path is None:
        return []
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path} is not valid JSON: {exc}") from None
    frags = data if isinstance(data, list) else [data]
    if not all(isinstance(f, dict) for f in frags):
        raise UsageError("guess file must hold a JSON object or a list of objects")
    return [{k: str(v) for k, v in f.items()} for f in frags]


def cmd_iso_search(args):
    S = _load_system(args.system)
    res = iso.guided_search(S, _load_guesses(args.guesses), fill=args.fill, budget=args.budget)
    data = {"found": res.found, "message": res.message, "trail": res.trail}
    if res.assignment is not None:
        data["assignment"] = {k: S.field.format(v) for k, v in sorted(res.assignment.items())}
    if res.verdict is not None:
        data["verdict"] = res.verdict.to_json(S.field)
    return data, res.message, 0 if res.found else 1


def _mode(args, A: LieAlgebra):
    if args.lambda0 is not None:
        if not A.field.parametric:
            raise UsageError(f"{A.name} has no parameter")
        x = _rational(args.lambda0, "--lambda0")
        if x in A.excluded:
            raise lie.ExcludedParameterError(f"{format_rat(x)} is an excluded parameter value of {A.name}")
        return x
    return None


def cmd_deform(args):
    A = _family(args, args.family)
    if not A.field.parametric:
        raise UsageError(f"{A.name} has no parameter; nothing deforms")
    at = _mode(args, A)
    if args.order < 1:
        raise UsageError("--order must be at least 1")
    M = coh.cohomology(A)
    F = deformation.assemble(M)
    f = deformation.maclaurin(F, at, args.order)
    fmt = f.field.format
    F0 = F if at is None else F.specialize(at)
    residual = deformation.hochschild_2cocycle_check(F0, f)
    data = {"family": A.name, "mode": "symbolic" if at is None else {"lambda0": format_rat(at)},
            "order": args.order, "dimension": F.dim,
            "entries": {f"({i + 1},{j + 1})": {str(k + 1): fmt(x) for k, x in sorted(cell.items())}
                        for (i, j), cell in sorted(f.table.items()) if cell},
            "hochschild_2cocycle": not residual}
    text = [f"{A.name}: f_{args.order} on the {F.dim}-dimensional cohomology, "
            f"{sum(len(c) for c in f.table.values())} nonzero coefficients"]
    for (i, j), cell in sorted(f.table.items()):
        for k, x in sorted(cell.items()):
            text.append(f"  f(e{i + 1}, e{j + 1})_{k + 1} = {fmt(x)}")
    text.append("Hochschild 2-cocycle: " + ("yes" if not residual else f"no ({len(residual)} residuals)"))
    return data, "\n".join(text), 0


def cmd_coboundary(args):
    A = _family(args, args.family)
    if not A.field.parametric:
        raise UsageError(f"{A.name} has no parameter; there is no infinitesimal")
    at = _mode(args, A)
    t0 = time.perf_counter()
    M = coh.cohomology(A)
    v = deformation.infinitesimal_test(M, at=at, family=A.name)
    log.info("%s: %d unknowns, %d distinct equations (%d before deduplication), %.1fs",
             A.name, v.unknown_count, v.equation_count, v.raw_equation_count, time.perf_counter() - t0)
    field = A.field if at is None else QQ
    data = v.to_json(field)
    if v.solvable:
        text = (f"{A.name}: f_1 is a coboundary; witness g with {len(data['witness'])} nonzero entries, "
                f"{'verified' if v.verified else 'FAILED verification'}")
    else:
        inc = data["inconsistency_row"]
        text = (f"{A.name}: inconsistent (no g with d1(g) = f_1); contradiction in the shift-{inc['shift']} "
                f"block, combining {len(data.get('contradiction', {}).get('multipliers', {}))} equations")
    if v.certificate:
        text += "\ngenericity certificate: " + ", ".join(format_poly(p) for p in v.certificate)
    return data, text, 0 if v.solvable else 1


# -- argument parsing -------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--catalog", metavar="DIR", default=None,
                        help="catalog directory (default: the shipped catalog)")
    common.add_argument("-o", "--output", metavar="PATH", default=None,
                        help="write the result here instead of standard output")
    common.add_argument("-v", "--verbose", action="store_true", help="log progress to standard error")

    p = argparse.ArgumentParser(prog="nilcohom", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def add(name, func, help_):
        sp = sub.add_parser(name, parents=[common], help=help_)
        sp.set_defaults(func=func)
        return sp

    sp = add("validate", cmd_validate, "parse a definition file and check the Jacobi identity")
    sp.add_argument("file")
    for name, func, help_ in (("lcs", cmd_lcs, "lower central series"),
                              ("carnot", cmd_carnot, "Carnot algebra in the layer basis"),
                              ("betti", cmd_betti, "Betti numbers")):
        sp = add(name, func, help_)
        sp.add_argument("family", help="catalog name or path to a .lie file")
        sp.add_argument("--at", metavar="VALUE", help="specialize the parameter first")
    sp = add("cup", cmd_cup, "cup product table H^p x H^q -> H^{p+q}")
    sp.add_argument("family")
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--q", type=int, required=True)
    sp.add_argument("--at", metavar="VALUE")
    sp = add("pairing", cmd_pairing, "Poincare pairing matrix H^k x H^{n-k} -> H^n")
    sp.add_argument("family")
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--at", metavar="VALUE")
    sp = add("catalog-check", cmd_catalog_check, "validate every catalog entry against its manifest")
    sp.add_argument("names", nargs="*", help="restrict to these entries")
    sp = add("iso-build", cmd_iso_build, "polynomial system for graded isomorphisms H(s) -> H(t)")
    sp.add_argument("family")
    sp.add_argument("--s", metavar="S", help="source parameter: a rational or 't'")
    sp.add_argument("--t", metavar="T", help="target parameter: a rational or 't'")
    sp = add("iso-reduce", cmd_iso_reduce, "apply the forcing rules to a system")
    sp.add_argument("system")
    sp = add("iso-verify", cmd_iso_verify, "check an assignment against a system exactly")
    sp.add_argument("system")
    sp.add_argument("assignment")
    sp = add("iso-search", cmd_iso_search, "guided search for an isomorphism")
    sp.add_argument("system")
    sp.add_argument("--guesses", metavar="FILE")
    sp.add_argument("--fill", choices=("identity", "ones"), default="identity")
    sp.add_argument("--budget", type=int, default=2000)
    for name, func, help_ in (("deform", cmd_deform, "Maclaurin coefficient f_m of the cohomology family"),
                              ("coboundary", cmd_coboundary, "is f_1 a Hochschild coboundary?")):
        sp = add(name, func, help_)
        sp.add_argument("family")
        g = sp.add_mutually_exclusive_group()
        g.add_argument("--lambda0", metavar="L", help="rational base point")
        g.add_argument("--symbolic", action="store_true", help="generic base point (default)")
        if name == "deform":
            sp.add_argument("--order", type=int, required=True, metavar="M")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s", stream=sys.stderr)
    try:
        data, text, code = args.func(args)
    except (UsageError, catalog_mod.CatalogError, lie.LieError, iso.IsoError,
            ScalarSyntaxError, deformation.AssociativityError) as exc:
        print(f"nilcohom {args.command}: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"nilcohom {args.command}: {exc.filename}: {exc.strerror}", file=sys.stderr)
        return 2
    out = _dump(data) if args.format == "json" else text
    if args.output:
        Path(args.output).write_text(out + "\n")
    else:
        sys.stdout.write(out + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
