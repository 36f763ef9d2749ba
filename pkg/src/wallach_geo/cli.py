"""Command-line surface: catalog listing, structural verification,
geodesic generation/verification, restriction-system exploration and
homogeneous-geodesic checks.

Exit codes: 0 pass, 1 verification failure, 2 unknown space,
3 input/schema error, 4 metric/case mismatch.
"""

from __future__ import annotations

import argparse
import os
import re
import sys

import numpy as np

from .catalog import (
    build_product_spheres,
    build_so_blocks,
    build_stiefel,
    build_su3_flag,
    load_space_json,
    verify_fibration,
    verify_structure,
)
from .core import (
    GenericityError,
    InvalidMetricError,
    SpaceDefinitionError,
    StructureError,
    WallachGeoError,
    bracket,
)
from .curves import ProductExpCurve
from .geodesics import (
    closed_form_geodesic,
    gw_defect_all,
    nonexistence_probe,
    restriction_residual,
    solution_families,
)
from .metrics import DiagonalMetric
from .oracle import connection_defect, coset_distance, identity_checks, shoot_geodesic

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_UNKNOWN_SPACE = 2
EXIT_INPUT = 3
EXIT_METRIC = 4

DEFAULT_TOL = {"gw": 1e-9, "defect": 1e-9, "coset": 1e-6, "structural": 1e-12}
GRID_POINTS = 21


def _fmt_float(x: float) -> str:
    return format(float(x), ".17g")


def _dump_json(obj, indent: int = 0) -> str:
    """Deterministic JSON: insertion-ordered fields, 17-significant-digit
    floats, no whitespace variability across platforms."""
    pad = "  " * indent
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [
            f'{pad}  "{k}": {_dump_json(v, indent + 1)}' for k, v in obj.items()
        ]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        return "[" + ", ".join(_dump_json(v, indent) for v in obj) + "]"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(obj)
    if obj is None:
        return "null"
    return '"' + str(obj).replace("\\", "\\\\").replace('"', '\\"') + '"'


def _structural_tol() -> float:
    raw = os.environ.get("WALLACH_GEO_TOL")
    if raw is None:
        return DEFAULT_TOL["structural"]
    try:
        return float(raw)
    except ValueError:
        raise SpaceDefinitionError(f"WALLACH_GEO_TOL is not a number: {raw!r}") from None


class UnknownSpaceError(WallachGeoError):
    pass


def resolve_space(tokens):
    """Resolve a space spec: catalog name (with optional size arguments,
    attached or separate) or a path to a JSON definition."""
    if isinstance(tokens, str):
        tokens = [tokens]
    joined = " ".join(str(t) for t in tokens).strip()
    if joined.endswith(".json"):
        return load_space_json(joined)
    norm = re.sub(r"[(),]", " ", joined).strip().lower()
    m = re.fullmatch(r"(so-blocks|stiefel)[\s-]*([\d\s-]*)", norm)
    tol = _structural_tol()
    if m:
        name = m.group(1)
        nums = [int(q) for q in re.split(r"[\s-]+", m.group(2).strip()) if q]
        if name == "so-blocks":
            if len(nums) != 3:
                raise UnknownSpaceError("so-blocks needs three positive integers l m n")
            return build_so_blocks(*nums, tol_structural=tol)
        if len(nums) != 1:
            raise UnknownSpaceError("stiefel needs one integer n >= 2")
        return build_stiefel(nums[0], tol_structural=tol)
    if norm == "su3-flag":
        return build_su3_flag(tol_structural=tol)
    if norm == "product-spheres":
        return build_product_spheres(tol_structural=tol)
    raise UnknownSpaceError(f"unknown space {joined!r}")


def cmd_catalog(args) -> int:
    rows = [
        ("so-blocks l m n", build_so_blocks(2, 2, 2)),
        ("stiefel n", build_stiefel(3)),
        ("su3-flag", build_su3_flag()),
        ("product-spheres", build_product_spheres()),
    ]
    print(f"{'space':24s} {'dim g':>6s} {'module dims':>14s}  flags")
    for label, dec in rows:
        flags = []
        if dec.equivalence_note:
            flags.append("equivalent modules")
        if dec.commuting_pairs:
            pairs = ",".join(f"{i}{j}" for i, j in sorted(dec.commuting_pairs))
            flags.append(f"commuting pairs {{{pairs}}}")
        dims = ",".join(str(d) for d in dec.module_dims())
        note = f" [{dec.name}]" if "l m n" in label or label.startswith("stiefel") else ""
        print(f"{label:24s} {dec.context.dim:6d} {'(' + dims + ')':>14s}  {'; '.join(flags)}{note}")
    return EXIT_PASS


def _report_checks(report) -> list:
    return [
        {"name": c.name, "passed": c.passed, "max_residual": c.max_residual}
        for c in report.checks
    ]


def cmd_verify_space(args) -> int:
    dec = resolve_space(args.space)
    structure = verify_structure(dec)
    fibrations = [verify_fibration(dec, i) for i in (1, 2, 3)]
    identities = identity_checks(dec, seed=args.seed)
    ok = structure.verdict and all(f.verdict for f in fibrations) and identities.verdict
    out = {
        "space": dec.name,
        "module_dims": list(dec.module_dims()),
        "structure": _report_checks(structure),
        "fibrations": {f"i={i}": _report_checks(f) for i, f in zip((1, 2, 3), fibrations)},
        "identities": _report_checks(identities),
        "commuting_pairs": [f"{i}{j}" for i, j in sorted(dec.commuting_pairs)],
        "verdict": ok,
    }
    print(_dump_json(out))
    return EXIT_PASS if ok else EXIT_FAIL


def _match_case(metric, requested):
    """Normalize by lambda1 and match the closed-form metric patterns.

    Returns (case, c) or raises InvalidMetricError when no pattern fits.
    Ties prefer case 1 (c = 1 fits all three).
    """
    l1, l2, l3 = metric
    u, v = l2 / l1, l3 / l1
    tol = 1e-12
    candidates = []
    if abs(u - 1) <= tol:
        candidates.append((1, v))
    if abs(v - 1) <= tol:
        candidates.append((2, u))
    if abs(u - v) <= tol:
        candidates.append((3, 1.0 / u))
    if requested != "auto":
        case = int(requested)
        for cand in candidates:
            if cand[0] == case:
                return cand
        raise InvalidMetricError(
            f"metric {metric} does not match the case-{case} pattern"
        )
    if not candidates:
        raise InvalidMetricError(
            f"metric {metric} fits no closed-form case; see the restriction command"
        )
    return candidates[0]


def cmd_geodesic(args) -> int:
    dec = resolve_space(args.space)
    metric = tuple(args.metric)
    if min(metric) <= 0:
        raise InvalidMetricError("metric coefficients must be positive")
    case, c = _match_case(metric, args.case)
    tols = {
        "gw": args.tol_gw,
        "defect": args.tol_defect,
        "coset": args.tol_coset,
        "structural": _structural_tol(),
    }
    rng = np.random.default_rng(np.random.Philox(args.seed))
    steps = args.steps
    if steps % (GRID_POINTS - 1):
        steps += (GRID_POINTS - 1) - steps % (GRID_POINTS - 1)
    stride = steps // (GRID_POINTS - 1)
    grid = np.linspace(args.t0, args.t1, GRID_POINTS)
    notes = []
    compare_shot = args.t0 == 0.0
    if not compare_shot:
        notes.append("shooting comparison skipped (grid does not start at t = 0)")
    max_gw = max_defect = max_coset = 0.0
    per_t = np.zeros((GRID_POINTS, 3))  # defect, gw, coset maxima per grid point
    for trial in range(args.trials):
        draws = [dec.random_module_vector(p, rng) for p in ("m1", "m2", "m3")]
        for attempt in range(3):
            pairs = [(0, 1, (1, 2)), (0, 2, (1, 3)), (1, 2, (2, 3))]
            degenerate = [
                lab
                for a, b, lab in pairs
                if bracket(draws[a], draws[b]).norm_b() <= 1e-12
                and lab not in dec.commuting_pairs
            ]
            if not degenerate:
                break
            notes.append(f"trial {trial}: degenerate draw redrawn ({degenerate})")
            draws = [dec.random_module_vector(p, rng) for p in ("m1", "m2", "m3")]
        curve, g = closed_form_geodesic(dec, case, *draws, c)
        shot = None
        if compare_shot:
            shot = shoot_geodesic(dec, g, draws[0] + draws[1] + draws[2], args.t1, steps)
        for k, t in enumerate(grid):
            gw = float(np.abs(gw_defect_all(curve, g, t)).max())
            dn = connection_defect(curve, g, t).norm_b()
            cd = 0.0
            if shot is not None:
                cd = coset_distance(shot.samples[k * stride].group_point, curve.evaluate(t), dec)
            per_t[k] = np.maximum(per_t[k], (dn, gw, cd))
            max_gw, max_defect, max_coset = (
                max(max_gw, gw),
                max(max_defect, dn),
                max(max_coset, cd),
            )
    verdict = max_gw <= tols["gw"] and max_defect <= tols["defect"] and max_coset <= tols["coset"]
    report = {
        "space": dec.name,
        "metric": list(metric),
        "case": case,
        "trials": args.trials,
        "grid": {"t0": args.t0, "t1": args.t1, "steps": steps},
        "max_abs_gw": max_gw,
        "max_defect_norm": max_defect,
        "max_coset_dist": max_coset,
        "verdict": "pass" if verdict else "fail",
        "tolerances": tols,
        "seed": args.seed,
        "notes": notes,
    }
    text = _dump_json(report)
    print(text)
    if args.out:
        if args.format == "json":
            with open(args.out, "w") as f:
                f.write(text + "\n")
        else:
            with open(args.out, "w") as f:
                f.write("t,defect_norm,max_abs_gw,coset_dist\n")
                for k, t in enumerate(grid):
                    f.write(
                        f"{_fmt_float(t)},{_fmt_float(per_t[k, 0])},"
                        f"{_fmt_float(per_t[k, 1])},{_fmt_float(per_t[k, 2])}\n"
                    )
    return EXIT_PASS if verdict else EXIT_FAIL


def cmd_restriction(args) -> int:
    l2, l3 = args.lambda2, args.lambda3
    if l2 <= 0 or l3 <= 0:
        raise InvalidMetricError("lambda2 and lambda3 must be positive")
    tol = 1e-12
    applicable = []
    if abs(l2 - 1) <= tol:
        applicable += ["s1", "s2"]
    if abs(l3 - 1) <= tol:
        applicable += ["s3", "s4"]
    if abs(l2 - l3) <= tol:
        applicable += ["s5", "s6"]
    if applicable:
        lam = l3 if abs(l2 - 1) <= tol or abs(l2 - l3) <= tol else l2
        rows = []
        for extra in (0.2, -0.4, 0.75):
            for sol in solution_families(lam, extra):
                if sol.family in applicable:
                    res = float(np.abs(restriction_residual(sol, sol.lambda2, sol.lambda3)).max())
                    rows.append(
                        {
                            "family": sol.family,
                            "a": list(sol.a),
                            "b": list(sol.b),
                            "lambda2": sol.lambda2,
                            "lambda3": sol.lambda3,
                            "free": sol.free,
                            "max_abs_residual": res,
                        }
                    )
        out = {
            "lambda2": l2,
            "lambda3": l3,
            "mode": "families",
            "families": sorted(set(applicable)),
            "solutions": rows,
        }
        print(_dump_json(out))
        return EXIT_PASS
    best = nonexistence_probe(l2, l3, multistarts=args.trials, seed=args.seed)
    out = {
        "lambda2": l2,
        "lambda3": l3,
        "mode": "probe (best-effort)",
        "multistarts": args.trials,
        "best_residual_norm": best,
        "note": "a residual floor supports, but does not prove, nonexistence",
    }
    print(_dump_json(out))
    return EXIT_PASS


def cmd_go_check(args) -> int:
    dec = resolve_space(args.space)
    if not dec.commuting_pairs:
        print(_dump_json({"space": dec.name, "result": "hypothesis not met",
                          "note": "no commuting module pair"}))
        return EXIT_PASS
    rng = np.random.default_rng(np.random.Philox(args.seed))
    grid = np.linspace(0.0, 2.0, GRID_POINTS)
    worst = 0.0
    for _ in range(args.trials):
        lambdas = rng.uniform(0.25, 4.0, 3)
        g = DiagonalMetric(dec, lambdas)
        X = sum(
            (dec.random_module_vector(p, rng) for p in ("m1", "m2", "m3")),
            dec.context.zero(),
        )
        curve = ProductExpCurve(dec, [X])
        for t in grid:
            worst = max(worst, connection_defect(curve, g, t).norm_b())
            worst = max(worst, float(np.abs(gw_defect_all(curve, g, t)).max()))
    ok = worst <= args.tol_defect
    print(
        _dump_json(
            {
                "space": dec.name,
                "result": "pass" if ok else "fail",
                "trials": args.trials,
                "max_defect": worst,
                "tolerance": args.tol_defect,
                "seed": args.seed,
            }
        )
    )
    return EXIT_PASS if ok else EXIT_FAIL


def cmd_identities(args) -> int:
    dec = resolve_space(args.space)
    report = identity_checks(dec, seed=args.seed)
    out = {"space": dec.name, "checks": _report_checks(report), "verdict": report.verdict}
    print(_dump_json(out))
    return EXIT_PASS if report.verdict else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="wallach-geo",
        description="Geodesics on generalized Wallach spaces: catalog, "
        "verification and restriction-system tools.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    sub.add_parser("catalog", help="list catalog spaces").set_defaults(func=cmd_catalog)

    def add_space(sp):
        sp.add_argument("space", nargs="+", help="catalog name (e.g. stiefel 3) or JSON path")
        sp.add_argument("--seed", type=int, default=0)

    sp = sub.add_parser("verify-space", help="structural + fibration + identity checks")
    add_space(sp)
    sp.set_defaults(func=cmd_verify_space)

    sp = sub.add_parser("geodesic", help="build and verify closed-form geodesics")
    sp.add_argument("--space", required=True)
    sp.add_argument("--metric", type=float, nargs=3, required=True, metavar=("L1", "L2", "L3"))
    sp.add_argument("--case", default="auto", choices=["auto", "1", "2", "3"])
    sp.add_argument("--trials", type=int, default=5)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--t0", type=float, default=0.0)
    sp.add_argument("--t1", type=float, default=2.0)
    sp.add_argument("--steps", type=int, default=1000)
    sp.add_argument("--out", default=None)
    sp.add_argument("--format", default="json", choices=["json", "csv"])
    sp.add_argument("--tol-gw", type=float, default=DEFAULT_TOL["gw"])
    sp.add_argument("--tol-defect", type=float, default=DEFAULT_TOL["defect"])
    sp.add_argument("--tol-coset", type=float, default=DEFAULT_TOL["coset"])
    sp.set_defaults(func=cmd_geodesic)

    sp = sub.add_parser("restriction", help="solution families / nonexistence probe")
    sp.add_argument("--lambda2", type=float, required=True)
    sp.add_argument("--lambda3", type=float, required=True)
    sp.add_argument("--trials", type=int, default=200)
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(func=cmd_restriction)

    sp = sub.add_parser("go-check", help="homogeneous-geodesic check (commuting modules)")
    add_space(sp)
    sp.add_argument("--trials", type=int, default=10)
    sp.add_argument("--tol-defect", type=float, default=DEFAULT_TOL["defect"])
    sp.set_defaults(func=cmd_go_check)

    sp = sub.add_parser("identities", help="finite-difference lemma checks")
    add_space(sp)
    sp.set_defaults(func=cmd_identities)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except UnknownSpaceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_UNKNOWN_SPACE
    except (SpaceDefinitionError, StructureError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (InvalidMetricError, GenericityError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_METRIC
    except WallachGeoError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
