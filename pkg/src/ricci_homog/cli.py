"""Command-line front end.

Results go to stdout (or ``--out``) as JSON; a one-line human summary and
any error report go to stderr.  Exit codes: 0 success/Solved, 1 input
error, 2 NoSolution, 3 NotConverged.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io as _io
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .bounds import search_box
from .errors import DegenerateGamma, RicciHomogError, SchemaError
from .io import dumps, load, load_structure, load_tensor, save
from .solver import (
    NO_SOLUTION,
    NOT_CONVERGED,
    SOLVED,
    SolveOptions,
    scan_existence,
    solve_degenerate,
    solve_general,
    solve_two_summand,
    verify_solution,
)
from .structure import LieAlgebraTable, derive_structure, validate_structure, validate_table

EXIT_OK, EXIT_INPUT, EXIT_NO_SOLUTION, EXIT_NOT_CONVERGED = 0, 1, 2, 3
_STATUS_EXIT = {SOLVED: EXIT_OK, NO_SOLUTION: EXIT_NO_SOLUTION, NOT_CONVERGED: EXIT_NOT_CONVERGED}


def _digest(*paths):
    h = hashlib.sha256()
    for p in paths:
        h.update(Path(p).read_bytes())
    return "sha256:" + h.hexdigest()


def _record(command, inputs, options, result):
    """RunRecord; wall time is reported on stderr so stdout stays replayable."""
    return {
        "command": command,
        "input_digest": _digest(*inputs),
        "options": options,
        "result": result,
        "version": __version__,
    }


def _emit(args, doc):
    text = dumps(doc) + "\n"
    if getattr(args, "out", None):
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _summary(msg):
    print(msg, file=sys.stderr)


def _fmt(v):
    return format(float(v), ".17g")


def cmd_validate(args):
    obj = load(args.path)
    rep = validate_table(obj) if isinstance(obj, LieAlgebraTable) else validate_structure(obj)
    kind = "table" if isinstance(obj, LieAlgebraTable) else "structure"
    _emit(args, _record("validate", [args.path], {}, dict(rep.to_dict(), kind=kind)))
    _summary(f"{args.path}: {kind} {'valid' if rep.ok else f'INVALID ({len(rep.violations)} violations)'}")
    return EXIT_OK if rep.ok else EXIT_INPUT


def cmd_derive(args):
    table = load(args.table)
    if not isinstance(table, LieAlgebraTable):
        raise SchemaError(f"{args.table}: expected a Lie algebra table (field 'dim_g')", field="dim_g")
    label = args.label if args.label is not None else Path(args.table).name.split(".")[0]
    sd, residuals = derive_structure(table, label)
    save(sd, args.out_path)
    rep = validate_structure(sd)
    _summary(
        f"derived s={sd.s} d={sd.d.tolist()} -> {args.out_path}; "
        f"max Killing residual {_fmt(residuals['killing_residual'].max(initial=0))}; "
        f"{'valid' if rep.ok else 'INVALID'}"
    )
    return EXIT_OK if rep.ok else EXIT_INPUT


def cmd_bounds(args):
    sd = load_structure(args.structure)
    tensor = load_tensor(args.tensor)
    rep = search_box(sd, tensor.z)
    _emit(args, _record("bounds", [args.structure, args.tensor], {}, rep.to_dict()))
    _summary(
        f"a={_fmt(rep.a)} b={_fmt(rep.b)} tau=({_fmt(rep.tau1)}, {_fmt(rep.tau2)}) "
        f"alpha={_fmt(rep.alpha)} alpha~={_fmt(rep.alpha_tilde)} box=[{_fmt(rep.u)}, {_fmt(rep.v)}]"
    )
    return EXIT_OK


def _solve_common(args, command, solve):
    sd = load_structure(args.structure)
    tensor = load_tensor(args.tensor)
    start = time.perf_counter()
    res, options = solve(sd, tensor.z)
    elapsed = time.perf_counter() - start
    _emit(args, _record(command, [args.structure, args.tensor], options, res.to_dict()))
    _summary(f"{res.status}: c={_fmt(res.c)} residual={_fmt(res.residual)} ({elapsed:.3f} s)")
    return _STATUS_EXIT[res.status]


def cmd_solve(args):
    opts = SolveOptions(tol=args.tol, max_iter=args.max_iter, starts=args.starts, seed=args.seed)

    def run(sd, z):
        options = {"tol": opts.tol, "max_iter": opts.max_iter, "starts": opts.starts, "seed": opts.seed}
        return solve_general(sd, z, opts), options

    return _solve_common(args, "solve", run)


def cmd_solve2(args):
    def run(sd, z):
        try:
            return solve_two_summand(sd, z), {}
        except DegenerateGamma:
            return solve_degenerate(sd, z), {"path": "constant_ricci"}

    return _solve_common(args, "solve2", run)


def cmd_check(args):
    sd = load_structure(args.structure)
    tensor = load_tensor(args.tensor)
    inputs = [args.structure, args.tensor]
    if args.solution:
        doc = json.loads(Path(args.solution).read_text())
        result = doc.get("result", doc)
        if result.get("x") is None:
            raise SchemaError(f"{args.solution}: solution carries no metric (status {result.get('status')})",
                              field="x")
        x, c = result["x"], result["c"]
        inputs.append(args.solution)
    else:
        if args.x is None or args.c is None:
            raise SchemaError("check needs --solution or both --x and --c", field="x")
        x = [float(v) for v in args.x.split(",")]
        c = args.c
    if len(x) != sd.s:
        raise SchemaError(f"metric has {len(x)} coefficients, structure has s = {sd.s}", field="x")
    if any(not v > 0 for v in x):
        raise SchemaError("metric coefficients must be positive", field="x")
    rep = verify_solution(sd, tensor.z, np.asarray(x, float), float(c))
    ok = rep["residual"] <= args.tol
    rep["passed"] = ok
    _emit(args, _record("check", inputs, {"tol": args.tol}, rep))
    _summary(f"residual={_fmt(rep['residual'])} {'PASS' if ok else 'FAIL'} (tol {args.tol:g})")
    return EXIT_OK if ok else EXIT_NOT_CONVERGED


def scan_csv(rows) -> str:
    buf = _io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["theta", "z1", "z2", "exists", "c", "ratio"])
    for r in rows:
        c = _fmt(r["c"]) if r["exists"] else ""
        ratio = _fmt(r["ratio"]) if r["exists"] else ""
        writer.writerow([_fmt(r["theta"]), _fmt(r["z1"]), _fmt(r["z2"]), str(r["exists"]).lower(), c, ratio])
    return buf.getvalue()


def cmd_scan(args):
    sd = load_structure(args.structure)
    rows = scan_existence(sd, args.resolution)
    if args.format == "csv":
        text = scan_csv(rows)
        if args.out:
            Path(args.out).write_text(text)
        else:
            sys.stdout.write(text)
    else:
        _emit(args, _record("scan", [args.structure], {"resolution": args.resolution}, rows))
    _summary(f"{sum(r['exists'] for r in rows)}/{len(rows)} directions admit a solution")
    return EXIT_OK


def _positive_int(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def build_parser():
    p = argparse.ArgumentParser(prog="ricci-homog",
                                description="Invariant metrics with prescribed Ricci curvature on G/H.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("validate", help="check a structure-data or bracket-table file")
    sp.add_argument("path")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_validate)

    sp = sub.add_parser("derive", help="derive structure data from a bracket table")
    sp.add_argument("table")
    sp.add_argument("out_path")
    sp.add_argument("--label")
    sp.set_defaults(func=cmd_derive)

    sp = sub.add_parser("bounds", help="constants and search box of the compactness argument")
    sp.add_argument("structure")
    sp.add_argument("tensor")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_bounds)

    sp = sub.add_parser("solve", help="maximize S on the trace-one surface")
    sp.add_argument("structure")
    sp.add_argument("tensor")
    sp.add_argument("--tol", type=float, default=1e-10)
    sp.add_argument("--max-iter", type=_positive_int, default=10_000)
    sp.add_argument("--starts", type=_positive_int, default=32)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("solve2", help="closed-form two-summand solver")
    sp.add_argument("structure")
    sp.add_argument("tensor")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_solve2)

    sp = sub.add_parser("check", help="verify a candidate (x, c)")
    sp.add_argument("structure")
    sp.add_argument("tensor")
    sp.add_argument("--solution", help="JSON output of solve/solve2")
    sp.add_argument("--x", help="comma-separated metric coefficients")
    sp.add_argument("--c", type=float)
    sp.add_argument("--tol", type=float, default=1e-8)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_check)

    sp = sub.add_parser("scan", help="existence along z = (cos t, sin t)")
    sp.add_argument("structure")
    sp.add_argument("--resolution", type=int, default=91)
    sp.add_argument("--format", choices=("json", "csv"), default="csv")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_scan)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except RicciHomogError as exc:
        err = {"error": exc.code, "message": str(exc)}
        if getattr(exc, "field", None):
            err["field"] = exc.field
        print(json.dumps(err), file=sys.stderr)
        return EXIT_INPUT
    except (OSError, ValueError) as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
