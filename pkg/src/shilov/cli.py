"""Command-line interface: geometry suites, map verification, rigidity runs.

Exit codes: 0 pass, 1 verification mismatch, 2 usage/config error,
3 internal numeric failure.  All randomness flows from --seed through
numpy's PCG64 generator; reports are deterministic JSON.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from .hermitian import SignatureForm
from .geometry import chart_through, random_chart_directions, sample_boundary
from .connection import (check_structure_equations, connection_from_frame_field,
                         contact_modulo_reduction)
from .maps import (block_diagonal_map, map_from_json, standard_embedding,
                   verify_boundary_preserving, verify_cr, whitney_map)
from .rigidity import RigidityError, bound_holds, run_rigidity_pipeline

PASS, FAIL, USAGE, INTERNAL = 0, 1, 2, 3


def _emit(report: dict, out: str | None):
    text = json.dumps(report, sort_keys=True, indent=2, default=float)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _signature(args) -> SignatureForm:
    if args.p <= args.q:
        raise ValueError(f"require p > q >= 1, got p={args.p}, q={args.q}")
    return SignatureForm(args.p, args.q)


def _header(args) -> dict:
    return {"schema_version": 1, "rng": f"numpy-pcg64 seed={args.seed}",
            "threads": int(os.environ.get("RIGIDITY_THREADS", "1"))}


def cmd_verify_geometry(args) -> int:
    F = _signature(args)
    if args.jet_order < 2:
        raise ValueError("structure equations need jet order >= 2")
    rng = np.random.default_rng(args.seed)
    report = _header(args)
    report["suites"] = {}
    worst = {"structure": 0.0, "symmetry": 0.0, "trace": 0.0,
             "contact_reduction": 0.0, "frame_gram": 0.0}
    pts = sample_boundary(F, args.seed, args.basepoints)
    for bp in pts:
        dirs = random_chart_directions(F, rng, 4)
        chart = chart_through(F, bp, dirs, order=args.jet_order)
        gram_res = float(np.max(np.abs(chart.A[:, :, 0] @ F.J
                                       @ chart.A[:, :, 0].conj().T - F.S)))
        worst["frame_gram"] = max(worst["frame_gram"], gram_res)
        conn = connection_from_frame_field(chart)
        rep = check_structure_equations(conn, tol=args.tol)
        worst["structure"] = max(worst["structure"], rep["global"])
        worst["symmetry"] = max(worst["symmetry"], rep["symmetry"])
        worst["trace"] = max(worst["trace"], rep["trace"])
        cmr = contact_modulo_reduction(conn, tol=args.tol)
        worst["contact_reduction"] = max(worst["contact_reduction"], cmr["remainder"])
    limits = {"structure": args.tol, "symmetry": 1e-10, "trace": 1e-12,
              "contact_reduction": args.tol, "frame_gram": 1e-10}
    failed = [k for k in worst if worst[k] > limits[k]]
    report["suites"] = {k: {"max_residual": worst[k], "limit": limits[k],
                            "pass": worst[k] <= limits[k]} for k in worst}
    report["pass"] = not failed
    if failed:
        report["first_failure"] = failed[0]
    _emit(report, args.out)
    return PASS if not failed else FAIL


def _load_map(args):
    if args.map_file:
        with open(args.map_file) as fh:
            return map_from_json(json.load(fh))
    if args.builtin == "standard":
        return standard_embedding(args.p, args.q, args.pprime, args.qprime)
    if args.builtin == "whitney":
        return whitney_map(args.p, args.q, args.qprime, args.m)
    if args.builtin == "blockdiag":
        blocks = [whitney_map(args.p, 1, 1, 0)] + [
            standard_embedding(args.p, 1, args.p, 1)
            for _ in range(args.qprime - 1)]
        choices = [a % args.q for a in range(args.qprime)]
        return block_diagonal_map(args.p, args.q, blocks, choices)
    raise ValueError("no map given: use --builtin or --map-file")


def cmd_verify_map(args) -> int:
    _signature(args)
    f = _load_map(args)
    report = _header(args)
    report["source"] = list(f.source)
    report["target"] = list(f.target)
    bnd = verify_boundary_preserving(f, tol=args.tol, seed=args.seed,
                                     count=args.samples)
    # Whitney maps that drop source columns are CR but not immersive
    immersive = not (args.builtin == "whitney" and 0 < args.qprime < args.q)
    cr = verify_cr(f, tol=max(args.tol, 1e-9), seed=args.seed,
                   count=min(args.samples, 25), require_immersion=immersive)
    report["boundary"] = bnd
    report["cr"] = cr
    report["pass"] = bnd["pass"] and cr["pass"]
    _emit(report, args.out)
    return PASS if report["pass"] else FAIL


def cmd_rigidity(args) -> int:
    F = _signature(args)
    if args.pprime <= args.qprime:
        raise ValueError("require p' > q' >= 1")
    f = _load_map(args)
    report = run_rigidity_pipeline(f, seed=args.seed, count=args.samples,
                                   map_id=args.builtin or args.map_file)
    report.update(_header(args))
    report["bound_ok"] = bound_holds(F, SignatureForm(args.pprime, args.qprime))
    status = report["equivalence"]["status"]
    _emit(report, args.out)
    if args.expect == "report-only":
        return PASS
    return PASS if status == args.expect else FAIL


def _add_common(sp):
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--q", type=int, required=True)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--tol", type=float, default=1e-9)
    sp.add_argument("--out", help="write the JSON report to this path")


def _add_map_args(sp):
    sp.add_argument("--pprime", type=int, default=0)
    sp.add_argument("--qprime", type=int, default=0)
    sp.add_argument("--m", type=int, default=0)
    sp.add_argument("--builtin", choices=["standard", "whitney", "blockdiag"])
    sp.add_argument("--map-file")
    sp.add_argument("--samples", type=int, default=1000)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="shilov",
        description="Moving-frames verification suites for Shilov boundaries")
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("verify-geometry", help="structure-equation suites")
    _add_common(g)
    g.add_argument("--basepoints", type=int, default=5)
    g.add_argument("--jet-order", type=int, default=3)
    g.set_defaults(func=cmd_verify_geometry)

    m = sub.add_parser("verify-map", help="boundary/CR verification of a map")
    _add_common(m)
    _add_map_args(m)
    m.set_defaults(func=cmd_verify_map)

    r = sub.add_parser("rigidity", help="full rigidity pipeline")
    _add_common(r)
    _add_map_args(r)
    r.add_argument("--expect", choices=["equivalent", "inequivalent", "report-only"],
                   default="report-only")
    r.set_defaults(func=cmd_rigidity)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE
    except (np.linalg.LinAlgError, RigidityError, FloatingPointError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return INTERNAL


if __name__ == "__main__":
    sys.exit(main())
