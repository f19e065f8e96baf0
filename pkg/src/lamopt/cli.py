"""Command-line interface: ``lamopt {params,region,optimize,verify}``.

Exit codes: 0 success, 2 input error, 3 outer problem infeasible up to the
ply cap, 4 stacking rules could not be met (result still written).
Units are N, mm, MPa.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
import time

import jsonschema
import numpy as np

from . import __version__
from .clt import (MODES, QUASI_ISO, AngleSet, a_matrix, counts_of, d_matrix,
                  xi_a, xi_d)
from .errors import LamoptError
from .inner import retrieve_stacking
from .outer import design_margins, solve_outer
from .problem import (SCHEMA_VERSION, STACK_SCHEMA, DesignProblem, digest,
                      material_from_dict)
from .region import extreme_sequences, feasible_region, verify_counts

EXIT_OK, EXIT_INPUT, EXIT_OUTER, EXIT_INNER = 0, 2, 3, 4


class InputError(Exception):
    pass


# -- deterministic JSON ----------------------------------------------------------

def _fmt(x):
    if isinstance(x, bool) or x is None:
        return json.dumps(x)
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if not math.isfinite(x):
            return "null"
        return format(x, ".17g")
    return json.dumps(x, ensure_ascii=False)


def dumps(obj, indent=2, _level=0) -> str:
    """JSON with insertion-ordered keys and floats at 17 significant digits."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent, _level + 1)}"
                 for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in obj):
            return "[" + ", ".join(_fmt(v) for v in obj) + "]"
        items = [pad + dumps(v, indent, _level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    return _fmt(obj)


def _emit(doc, path=None):
    text = dumps(doc) + "\n"
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _load_json(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as e:
        raise InputError(f"{path}:{e.lineno}:{e.colno}: {e.msg}") from None
    except OSError as e:
        raise InputError(f"{path}: {e.strerror}") from None


def _validate(data, schema, path):
    try:
        jsonschema.validate(data, schema)
    except jsonschema.ValidationError as e:
        where = "/".join(str(p) for p in e.absolute_path) or "<root>"
        raise InputError(f"{path}: {where}: {e.message}") from None


def _floats(text):
    try:
        return tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list: {text!r}")


def _ints(text):
    try:
        return tuple(int(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated integer list: {text!r}")


def _default_threads():
    try:
        return max(1, int(os.environ.get("LAMOPT_THREADS", "1")))
    except ValueError:
        return 1


# -- subcommands -----------------------------------------------------------------

def cmd_params(args):
    data = _load_json(args.stack)
    _validate(data, STACK_SCHEMA, args.stack)
    plies = data["plies"]
    if "angles" in data:
        angles = AngleSet(tuple(data["angles"]))
    else:
        angles = AngleSet(tuple(dict.fromkeys(AngleSet((a,)).angles[0] for a in plies)))
    seq = angles.to_indices(plies)
    n = len(seq)
    xa = xi_a(counts_of(seq, len(angles)), angles)
    report = {
        "schema_version": SCHEMA_VERSION,
        "angles": list(angles.angles),
        "plies": angles.to_angles(seq),
        "n_plies": n,
        "xi_a": xa,
        "xi_d": {m: xi_d(seq, angles, m) for m in MODES},
    }
    if "material" in data:
        mat = material_from_dict(data["material"])
        report["mode"] = args.mode
        report["A"] = a_matrix(xa, n, mat)
        report["D"] = d_matrix(xi_d(seq, angles, args.mode), n, mat)
    _emit(report, args.out)
    return EXIT_OK


def cmd_region(args):
    angles = AngleSet(args.angles)
    ext = extreme_sequences(args.counts, angles, args.mode)
    poly = feasible_region(args.counts, angles, args.mode)
    doc = {
        "schema_version": SCHEMA_VERSION,
        "counts": list(args.counts),
        "angles": list(angles.angles),
        "mode": args.mode,
        "affine_dim": poly.affine_dim,
        "vertices": poly.vertices,
        "vertex_sequences": [angles.to_angles(ext.distinct[i]) for i in poly.vertex_ids],
        "facets": {"A": poly.A, "b": poly.b},
        "equalities": {"C": poly.C, "d": poly.d},
    }
    _emit(doc, args.out)
    if args.csv:
        with open(args.csv, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["xi1", "xi2", "xi3", "xi4", "sequence"])
            for v, i in zip(poly.vertices, poly.vertex_ids):
                seq = " ".join(f"{a:g}" for a in angles.to_angles(ext.distinct[i]))
                w.writerow([format(float(x), ".17g") for x in v] + [seq])
    return EXIT_OK


def run_optimize(data, threads=1, mode=None, timings=False):
    """Full pipeline on a parsed problem document; returns (result, exit code)."""
    if mode is not None:
        data = dict(data, solver=dict(data.get("solver", {}), mode=mode))
    problem = DesignProblem.from_dict(data)
    angles = problem.angles
    t0 = time.perf_counter()
    outer = solve_outer(problem, threads=threads)
    t1 = time.perf_counter()
    doc = {
        "schema_version": SCHEMA_VERSION,
        "tool_version": __version__,
        "input_digest": digest(data),
        "status": outer.status,
        "mode": problem.mode,
        "angles": list(angles.angles),
        "n_candidates": outer.n_candidates,
    }
    if outer.status != "optimal":
        return doc, EXIT_OUTER

    inner = retrieve_stacking(outer.counts, outer.xi_d, problem.inner, angles,
                              problem.mode, xi_a_target=outer.xi_a)
    t2 = time.perf_counter()
    half = angles.to_angles(inner.sequence)
    doc.update({
        "counts": list(outer.counts),
        "total_plies": outer.total_plies,
        "xi_a": outer.xi_a,
        "xi_d": outer.xi_d,
        "critical_mode": list(outer.critical_mode) if outer.critical_mode else None,
        "outer_margins": outer.margins,
        "stacking_sequence": half,
        "full_laminate": half[::-1] + half,
        "inner": {
            "method": inner.method,
            "exact": inner.exact,
            "residual": inner.residual,
            "xi_a_residual": inner.xi_a_residual,
            "xi_d": inner.xi_d,
            "violations": [v.as_dict() for v in inner.violations],
        },
        "design_margins": design_margins(outer.counts, inner.xi_d, problem),
    })
    code = EXIT_OK
    if inner.violations:
        doc["status"] = "rule-infeasible"
        code = EXIT_INNER
    if timings:
        doc["timings"] = {"outer_s": t1 - t0, "inner_s": t2 - t1}
    return doc, code


def cmd_optimize(args):
    data = _load_json(args.problem)
    try:
        doc, code = run_optimize(data, args.threads, args.mode, args.timings)
    except jsonschema.ValidationError as e:
        where = "/".join(str(p) for p in e.absolute_path) or "<root>"
        raise InputError(f"{args.problem}: {where}: {e.message}") from None
    _emit(doc, args.output)
    return code


def cmd_verify(args):
    angles = AngleSet(args.angles)
    modes = MODES if args.mode == "both" else (args.mode,)
    reports = [verify_counts(args.counts, angles, m, args.samples, args.seed, args.tol)
               for m in modes]
    doc = {
        "schema_version": SCHEMA_VERSION,
        "counts": list(args.counts),
        "angles": list(angles.angles),
        "samples": args.samples,
        "seed": args.seed,
        "tol": args.tol,
        "reports": reports,
        "passed": all(r["passed"] for r in reports),
    }
    _emit(doc, args.out)
    return EXIT_OK if doc["passed"] else 1


def build_parser():
    p = argparse.ArgumentParser(prog="lamopt", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"lamopt {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def angles_opt(sp):
        sp.add_argument("--angles", type=_floats, default=QUASI_ISO,
                        help="comma-separated ply angles in degrees "
                             "(use --angles=-45,45 when the list starts with a minus)")

    sp = sub.add_parser("params", help="lamination parameters and A/D of a stack file")
    sp.add_argument("stack")
    sp.add_argument("--mode", choices=MODES, default="midpoint")
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=cmd_params)

    sp = sub.add_parser("region", help="export the feasible xi_d polytope")
    sp.add_argument("--counts", type=_ints, required=True)
    angles_opt(sp)
    sp.add_argument("--mode", choices=MODES, default="midpoint")
    sp.add_argument("--out", default=None)
    sp.add_argument("--csv", default=None, help="also write vertices as CSV")
    sp.set_defaults(func=cmd_region)

    sp = sub.add_parser("optimize", help="outer ply-count optimization plus stacking retrieval")
    sp.add_argument("problem")
    sp.add_argument("-o", "--output", default=None)
    sp.add_argument("--mode", choices=MODES, default=None,
                    help="override solver.mode of the problem file")
    sp.add_argument("--threads", type=int, default=_default_threads())
    sp.add_argument("--timings", action="store_true",
                    help="add wall-clock timings (makes output run-dependent)")
    sp.set_defaults(func=cmd_optimize)

    sp = sub.add_parser("verify", help="brute-force check of the polytope and support maxima")
    sp.add_argument("--counts", type=_ints, required=True)
    angles_opt(sp)
    sp.add_argument("--mode", choices=MODES + ("both",), default="both")
    sp.add_argument("--samples", type=int, default=100)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--tol", type=float, default=1e-9)
    sp.add_argument("--threads", type=int, default=_default_threads(),
                    help="accepted for interface symmetry; verification is serial")
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=cmd_verify)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as e:
        print(f"lamopt: error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except (LamoptError, ValueError) as e:
        print(f"lamopt: error: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
