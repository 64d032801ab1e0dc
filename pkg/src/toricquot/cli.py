"""Command-line entry point ``toricquot``.

Exit codes: 0 ok, 2 invalid spec, 3 resource bound exceeded, 4 numerical
degeneracy, 5 failed precondition (e.g. ``reduce`` on a non-split action).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time

import numpy as np

from . import __version__
from .curvature import bracket_witness, fitted_exponent, ray_scan
from .distance import quotient_distance_extended, quotient_distance_torus, reduction_isometry_check
from .errors import NumericalDegeneracy, SpecInvalid, ToricQuotError
from .reflections import chamber_complex, conjugacy_test, finite_extension_classify
from .specio import action_from_doc, build_report, dump_report, extended_from_doc, group_from_doc, load_spec
from .split import canonical_split_form, is_split
from .strata import (NonOrbifold, classify_stratum, enumerate_strata, local_reduction,
                     quotient_distance_finite, singular_set_dimension)

EXIT_OK = 0


def _load(path, kind: str):
    spec = load_spec(path)
    if spec.kind != kind:
        raise SpecInvalid(f"expected a {kind} spec, got a {spec.kind} spec")
    return spec


def _strata_table(action, max_planes: int):
    strata = enumerate_strata(action, max_planes)
    rows = []
    for s in strata:
        row = s.to_dict()
        row["classification"] = classify_stratum(action, s).to_dict()
        rows.append(row)
    return strata, rows


def _reduction_summary(red) -> dict:
    return {
        "rotated_planes": list(red.rotated_planes),
        "subspace_dim": red.subspace_basis.shape[1],
        "subspace_axes": [int(np.argmax(col)) for col in red.subspace_basis.T],
        "gamma_order": red.gamma.order,
        "gamma_restricts": red.restricts(),
    }


def cmd_analyze(args) -> tuple[dict, str]:
    spec = _load(args.spec, "action")
    action = action_from_doc(spec.doc)
    verdict = is_split(action)
    strata, rows = _strata_table(action, args.max_planes)
    sing = singular_set_dimension(action, strata)
    result = {
        "action": action.to_dict(),
        "kernel_factors": list(action.kernel_factors),
        "split": verdict.to_dict(),
        "strata": rows,
        "singular_set": sing.to_dict(),
        "non_orbifold_patterns": [list(s.pattern) for s, r in zip(strata, rows)
                                  if r["classification"]["verdict"] == NonOrbifold.kind],
    }
    if verdict.is_split:
        result["reduction"] = _reduction_summary(local_reduction(action))
        result["canonical_form"] = canonical_split_form(action).to_dict()
    else:
        seed = spec.doc.get("scan", {}).get("seed", 0)
        result["witness"] = bracket_witness(action, seed=seed).to_dict()
    ext = extended_from_doc(spec.doc, args.tol)
    if ext is not None:
        result["finite_extension"] = {"order": ext.finite_part.order,
                                      "classification": finite_extension_classify(ext).to_dict()}
    return result, spec.sha256


def cmd_strata(args):
    spec = _load(args.spec, "action")
    action = action_from_doc(spec.doc)
    strata, rows = _strata_table(action, args.max_planes)
    return {"strata": rows, "singular_set": singular_set_dimension(action, strata).to_dict()}, spec.sha256


def cmd_reduce(args):
    spec = _load(args.spec, "action")
    action = action_from_doc(spec.doc)
    red = local_reduction(action)
    result = {"reduction": red.to_dict(), "summary": _reduction_summary(red)}
    pairs = spec.doc.get("pairs")
    if pairs:
        check = reduction_isometry_check(action, pairs["count"], pairs["seed"], tol=max(args.tol, 1e-7))
        result["isometry_check"] = check.to_dict()
    return result, spec.sha256


def cmd_reflect(args):
    spec = _load(args.spec, "group")
    if "seed" not in spec.doc:
        raise SpecInvalid("group spec needs a 'seed' for the generic chamber point")
    group = group_from_doc(spec.doc, args.tol)
    return chamber_complex(group, seed=spec.doc["seed"]).to_dict(), spec.sha256


def cmd_conjugacy(args):
    if len(args.spec) != 2:
        raise SpecInvalid("conjugacy needs exactly two --spec group files")
    s1, s2 = (_load(p, "group") for p in args.spec)
    if "seed" not in s1.doc:
        raise SpecInvalid("first group spec needs a 'seed' for the intertwiner combination")
    G1 = group_from_doc(s1.doc, args.tol)
    G2 = group_from_doc(s2.doc, args.tol)
    res = conjugacy_test(G1, G2, budget=args.budget, tol=max(args.tol, 1e-8), seed=s1.doc["seed"])
    return res.to_dict(), [s1.sha256, s2.sha256]


def _point(text: str, m: int, name: str) -> np.ndarray:
    try:
        vals = json.loads(text) if text.strip().startswith("[") else [float(t) for t in text.split(",")]
        p = np.asarray(vals, dtype=float)
    except (ValueError, TypeError) as exc:
        raise SpecInvalid(f"cannot parse --{name} {text!r}") from exc
    if p.shape != (m,) or not np.all(np.isfinite(p)):
        raise SpecInvalid(f"--{name} must be {m} finite numbers")
    return p


def cmd_distance(args):
    if args.x is None or args.y is None:
        raise SpecInvalid("distance needs --x and --y")
    spec = load_spec(args.spec)
    if spec.kind == "group":
        group = group_from_doc(spec.doc, args.tol)
        x, y = _point(args.x, group.dim, "x"), _point(args.y, group.dim, "y")
        value = quotient_distance_finite(group, x, y)
        return {"kind": "finite", "value": value, "gap": 0.0, "group_order": group.order}, spec.sha256
    action = action_from_doc(spec.doc)
    x, y = _point(args.x, action.m, "x"), _point(args.y, action.m, "y")
    ext = extended_from_doc(spec.doc, args.tol)
    tol = max(args.tol, 1e-8)
    if ext is None:
        res = quotient_distance_torus(action, x, y, tol=tol)
    else:
        res = quotient_distance_extended(ext, x, y, tol=tol)
    return {"kind": "torus", **res.to_dict()}, spec.sha256


def cmd_curvature(args) -> int:
    """Writes CSV rather than a JSON report."""
    spec = _load(args.spec, "action")
    scan = spec.doc.get("scan")
    if not scan:
        raise SpecInvalid("curvature needs a 'scan' section with direction, radii and seed")
    action = action_from_doc(spec.doc)
    if len(scan["direction"]) != action.m:
        raise SpecInvalid(f"scan direction must have {action.m} entries")
    buf = io.StringIO()
    out = csv.writer(buf, lineterminator="\n")
    out.writerow(["radius", "plane_index", "sec", "sec_times_r2"])
    code = EXIT_OK
    try:
        samples = ray_scan(action, scan["direction"], scan["radii"], scan.get("planes_per_point", 4),
                           scan["seed"])
        for s in samples:
            out.writerow([repr(s.radius), s.plane_index, repr(s.sec), repr(s.sec_times_r2)])
        expo = fitted_exponent(samples)
        out.writerow(["# fitted_exponent", "undefined" if expo is None else f"{expo:.6f}", "", ""])
    except NumericalDegeneracy as exc:
        out.writerow(["error", type(exc).__name__, str(exc), ""])
        code = exc.exit_code
    _emit(buf.getvalue(), args.out)
    return code


COMMANDS = {
    "analyze": cmd_analyze,
    "strata": cmd_strata,
    "reduce": cmd_reduce,
    "reflect": cmd_reflect,
    "conjugacy": cmd_conjugacy,
    "distance": cmd_distance,
}


def _emit(text: str, path) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="toricquot", description="Analyze quotients of R^m by orthogonal torus actions.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("command", choices=sorted([*COMMANDS, "curvature"]))
    p.add_argument("--spec", action="append", required=True, metavar="PATH",
                   help="input spec (give twice for conjugacy)")
    p.add_argument("--out", metavar="PATH", help="output file (default stdout)")
    p.add_argument("--tol", type=float, default=1e-9, help="numerical tolerance (default 1e-9)")
    p.add_argument("--max-planes", type=int, default=12, help="refuse strata enumeration above this n")
    p.add_argument("--x", help="first point for distance, comma separated or JSON list")
    p.add_argument("--y", help="second point for distance")
    p.add_argument("--budget", type=int, default=10**6, help="pairing budget for conjugacy")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.tol <= 0 or not np.isfinite(args.tol):
        parser.error("--tol must be positive")
    if args.command != "conjugacy":
        if len(args.spec) != 1:
            parser.error(f"{args.command} takes a single --spec")
        args.spec = args.spec[0]
    try:
        if args.command == "curvature":
            return cmd_curvature(args)
        t0 = time.perf_counter()
        result, digest = COMMANDS[args.command](args)
        meta = {"elapsed_seconds": round(time.perf_counter() - t0, 6)}
        _emit(dump_report(build_report(args.command, digest, result, meta)), args.out)
        return EXIT_OK
    except ToricQuotError as exc:
        print(f"toricquot: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
