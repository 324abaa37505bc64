"""Command-line front end.

Exit codes: 0 success, 1 input/schema/IO error, 2 violated precondition or
hypothesis, 3 solver did not converge.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import jsonschema
import numpy as np

from . import __version__, axisym, config, report, specs
from . import graph_geometry as gg
from . import harmonics, obstacle
from . import sharp_family as sf
from . import stability_suite as ss
from .sphere_core import GridError, polar_angles

GOLDEN_DIR = Path(__file__).with_name("golden")


class NotConvergedError(RuntimeError):
    pass


_EXIT_CODES = [
    ((specs.SpecError, jsonschema.ValidationError, OSError, config.ConfigError), 1),
    ((gg.ConvergenceError, NotConvergedError), 3),
    ((ss.HypothesisError, sf.WindowError, gg.NotStarShapedError, harmonics.DegenerateInputError,
      harmonics.BandSpecError, GridError, obstacle.UnsupportedGridError, axisym.ProfileError, ValueError), 2),
]


def _error_name(exc: Exception) -> str:
    return getattr(exc, "name", None) or type(exc).__name__


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def _spec(args) -> dict:
    source = args.set if args.set is not None else args.spec_file
    if source is None:
        raise specs.SpecError("a set is required (--set or --spec-file)")
    return specs.load_spec(source)


def _graph(args, spec):
    return specs.build_graph(spec, args.grid_res, args.band_limit)


def _grid_info(s: gg.NormalGraphSet) -> dict:
    g = s.grid
    return {"n": g.dim, "mode": g.mode, "resolution": g.resolution, "band_limit": g.band_limit, "nodes": g.size}


def cmd_geometry(args):
    spec = _spec(args)
    s = _graph(args, spec)
    h = gg.mean_curvature(s)
    results = {
        "perimeter": gg.perimeter(s),
        "volume": gg.volume(s),
        "delta": gg.perimeter_deficit(s),
        "barycenter": gg.barycenter(s),
        "mean_curvature_max": float(np.max(h.values)),
        "mean_curvature_min": float(np.min(h.values)),
    }
    if args.no_asymmetry:
        results.update(delta_iso=gg.isoperimetric_deficit(s), delta_cmc=gg.cmc_deficit(s, h),
                       reference_curvature=gg.reference_curvature(s))
    else:
        results.update(gg.deficits(s).as_dict())
    return {"spec": spec, "grid": _grid_info(s), "results": results}, None


def cmd_decompose(args):
    spec = _spec(args)
    s = _graph(args, spec)
    dec = harmonics.decompose(s.u)
    results = {"mean": dec.mean, "linear": dec.linear, "degree_energy": dec.degree_energy,
               "remainder_l2_energy": harmonics.l2_energy(dec.remainder)}
    try:
        results["poincare_ratio"] = harmonics.poincare_ratio(dec.remainder)
    except harmonics.DegenerateInputError as exc:
        results["poincare_ratio"] = None
        results["poincare_note"] = str(exc)
    centered = s.u - dec.mean
    try:
        fb = harmonics.fuglede_bound(centered)
        results["sup_bound"] = {"lhs": fb.lhs, "rhs": fb.rhs, "constant": fb.constant,
                                "ratio": fb.ratio, "holds": fb.holds}
    except harmonics.DegenerateInputError as exc:
        results["sup_bound"] = {"note": str(exc)}
    rows = [{"degree": k, "energy": float(e)} for k, e in enumerate(dec.degree_energy)]
    return {"spec": spec, "grid": _grid_info(s), "results": results}, rows


def cmd_almgren(args):
    spec = _spec(args)
    count = args.samples
    if spec["kind"] == "planar":
        terms = axisym.almgren_planar(specs.build_planar(spec), count)
    elif spec["kind"] == "profile":
        terms = axisym.almgren_profile(specs.build_profile(spec), count)
    else:
        raise specs.SpecError("almgren needs a planar or profile set")
    out = terms.as_dict()
    out["relative_residual"] = terms.residual / terms.delta if terms.delta else None
    return {"spec": spec, "grid": {"samples": count}, "results": out}, None


def cmd_structure(args):
    spec = _spec(args)
    region = specs.build_planar(spec)
    st = axisym.planar_structure(region)
    results = {"delta": st.delta, "hole_perimeter": st.hole_perimeter, "hole_area": st.hole_area,
               "perimeter_ratio": st.perimeter_ratio, "area_ratio": st.area_ratio,
               "holes": len(region.holes)}
    return {"spec": spec, "grid": {"samples": 4096}, "results": results}, None


def _sharp_defaults(args):
    n = args.n
    decades = args.t_decades or ("1e-12:1e-10:6" if n >= 3 else "1e-8:1e-6:6")
    return n, decades


def cmd_sharp_family(args):
    n, decades = _sharp_defaults(args)
    ts = sf.t_decades(decades)
    if args.K == "auto":
        K = max(sf.auto_K(n, args.r0, args.sigma, float(t), samples=args.samples)[0] for t in ts)
    else:
        K = float(args.K)
    rows = []
    for t in ts:
        fam = sf.build_set(sf.SharpParams(n, K, args.r0, args.sigma, float(t)), samples=args.samples)
        row = {"t": float(t), "r1": fam.params.r1, **fam.functionals(), "h_r1": fam.h_r1, "mu": fam.mu,
               "valid": fam.validation.ok,
               "curvature_excess": fam.validation.worst["curvature_excess_exact"]}
        rows.append(row)
    deltas = np.array([r["delta"] for r in rows])
    sups = np.array([r["u_sup"] for r in rows])
    # sup norm against its predicted rate: delta^(1/(n-1)), or delta log(1/delta) for n = 2
    rates = deltas * np.log(1 / deltas) if n == 2 else deltas ** (1.0 / (n - 1))
    for row, rate in zip(rows, rates):
        row["ratio"] = row["u_sup"] / float(rate)
    results = {
        "K": K,
        "slope": sf.loglog_slope(deltas, sups),
        "delta_over_t_spread": float(np.max(deltas / ts) / np.min(deltas / ts)),
        "all_valid": all(r["valid"] for r in rows),
        "rows": rows,
    }
    ratio = sups / rates
    results["ratio_spread"] = float(np.max(ratio) / np.min(ratio))
    params = {"n": n, "K": args.K, "r0": args.r0, "sigma": args.sigma, "t_decades": decades}
    return {"spec": params, "grid": {"samples": args.samples}, "results": results}, rows


def cmd_truncate(args):
    spec = _spec(args)
    s = _graph(args, spec)
    lam = float(args.lam) if args.lam is not None else float(s.dim)
    res = obstacle.truncate_mean_curvature(s, lam, gtol=args.gtol, max_iter=args.max_iter)
    out = res.as_dict()
    if res.converged:
        out["verification"] = obstacle.verify_truncation(res, s).as_dict()
    theta = polar_angles(s.grid) if s.grid.mode == "axisym" else np.arctan2(s.grid.nodes[:, 1], s.grid.nodes[:, 0])
    rows = [{"angle": float(a), "u": float(u), "v": float(v), "contact": bool(c), "H_E": float(h)}
            for a, u, v, c, h in zip(theta, s.u.values, res.v.values, res.contact_mask, res.H_E.values)]
    report_dict = {"spec": spec, "grid": _grid_info(s), "results": out}
    if not res.converged:
        raise NotConvergedError(f"projected gradient stalled at {res.projected_gradient:.3e} "
                                f"after {res.iterations} iterations", report_dict, rows)
    return report_dict, rows


def _records_task(family_spec: str, estimate: str, p: float, alpha: float) -> dict:
    members = ss.family(family_spec)
    recs = [ss.records_for(m, estimate, p, alpha) for m in members]
    ratios = [r.ratio for r in recs if not r.degenerate]
    return {
        "estimate": estimate,
        "members": len(recs),
        "max_ratio": max(ratios) if ratios else None,
        "min_ratio": min(ratios) if ratios else None,
        "degenerate": sum(r.degenerate for r in recs),
        "records": [r.as_dict() for r in recs],
    }


def cmd_verify(args):
    task = _records_task(args.family, args.estimate, args.p, args.alpha)
    rows = [{"estimate": r["estimate_id"], "family": r["family_tag"], "lhs": r["lhs"],
             "rhs_raw": r["rhs_raw"], "ratio": r["ratio"]} for r in task["records"]]
    params = {"family": args.family, "estimate": args.estimate, "p": args.p, "alpha": args.alpha}
    return {"spec": params, "grid": {}, "results": task}, rows


def cmd_sweep(args):
    estimates = [e.strip() for e in args.estimate.split(",") if e.strip()]
    members = len(ss.family(args.family)) if args.jobs <= 1 else None
    if members is not None and members < 10:
        raise ValueError(f"sweeps need at least 10 family members, got {members}")
    jobs = [(args.family, e, args.p, args.alpha) for e in estimates]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            tables = list(pool.map(_records_task, *zip(*jobs)))
    else:
        tables = [_records_task(*j) for j in jobs]
    rows = [{"estimate": t["estimate"], "member": i, "lhs": r["lhs"], "rhs_raw": r["rhs_raw"], "ratio": r["ratio"]}
            for t in tables for i, r in enumerate(t["records"])]
    summary = [{k: t[k] for k in ("estimate", "members", "max_ratio", "min_ratio", "degenerate")} for t in tables]
    params = {"family": args.family, "estimates": estimates, "p": args.p, "alpha": args.alpha}
    return {"spec": params, "grid": {}, "results": {"summary": summary}}, rows


COMMANDS = {
    "geometry": cmd_geometry,
    "decompose": cmd_decompose,
    "almgren": cmd_almgren,
    "structure": cmd_structure,
    "sharp-family": cmd_sharp_family,
    "truncate": cmd_truncate,
    "verify": cmd_verify,
    "sweep": cmd_sweep,
}


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write the JSON report here (CSV goes next to it)")
    common.add_argument("--grid-res", type=int, help="override the grid resolution")
    common.add_argument("--band-limit", type=int, help="override the band limit")
    common.add_argument("--timing", action="store_true", help="include wall time in the report")

    set_args = argparse.ArgumentParser(add_help=False)
    set_args.add_argument("--set", help="inline JSON set spec or path to one")
    set_args.add_argument("--spec-file", help="path to a JSON set spec")

    parser = argparse.ArgumentParser(prog="isostab", description="Stability diagnostics for sets with bounded mean curvature.")
    parser.add_argument("--version", action="version", version=f"isostab {__version__}")
    parser.add_argument("--config", help=f"JSON config overriding defaults (also ${config.ENV_VAR})")
    parser.add_argument("--golden", action="store_true", help="re-run the stored corpus and diff the reports")
    parser.add_argument("--update-golden", action="store_true", help="rewrite the stored corpus reports")
    sub = parser.add_subparsers(dest="command")

    p = sub.add_parser("geometry", parents=[common, set_args], help="perimeter, volume, deficits, asymmetries")
    p.add_argument("--no-asymmetry", action="store_true", help="skip the center searches")
    sub.add_parser("decompose", parents=[common, set_args], help="low-mode splitting and sup bound")
    p = sub.add_parser("almgren", parents=[common, set_args], help="convex-envelope split of the deficit")
    p.add_argument("--samples", type=int, default=2048)
    sub.add_parser("structure", parents=[common, set_args], help="hole bookkeeping for planar regions")

    p = sub.add_parser("sharp-family", parents=[common], help="sweep the dimpled-ball family")
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--K", default="16", help="number or 'auto'")
    p.add_argument("--r0", type=float, default=0.06)
    p.add_argument("--sigma", type=float, default=3.5e-3)
    p.add_argument("--t-decades", help="lo:hi:count")
    p.add_argument("--samples", type=int, default=10000)

    p = sub.add_parser("truncate", parents=[common, set_args], help="obstacle-problem curvature truncation")
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--gtol", type=float)
    p.add_argument("--max-iter", type=int)

    for name in ("verify", "sweep"):
        p = sub.add_parser(name, parents=[common], help="inequality records over a family")
        p.add_argument("--estimate", required=True)
        p.add_argument("--family", required=True, help="name:key=value,... e.g. sharp:n=3")
        p.add_argument("--p", type=float, default=2.0)
        p.add_argument("--alpha", type=float, default=0.5)
        p.add_argument("--jobs", type=int, default=1)
    return parser


def execute(argv: list[str]) -> tuple[str, str | None]:
    """Run one command; returns the JSON text and optional CSV text."""
    args = build_parser().parse_args(argv)
    if args.command is None:
        raise specs.SpecError("no command given")
    start = time.perf_counter()
    try:
        body, rows = COMMANDS[args.command](args)
        failure = None
    except NotConvergedError as exc:
        failure = exc
        body, rows = exc.args[1], exc.args[2]
    doc = {
        "command": args.command,
        "version": __version__,
        "spec_hash": report.spec_hash({"command": args.command, "spec": body["spec"],
                                       "grid_res": args.grid_res, "band_limit": args.band_limit}),
        "spec": body["spec"],
        "grid": body["grid"],
        "results": body["results"],
    }
    if args.timing:
        doc["wall_time"] = time.perf_counter() - start
    text = report.dumps(doc)
    csv = report.csv_text(rows) if rows else None
    if args.out:
        out = Path(args.out)
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text)
        if csv is not None:
            out.with_suffix(".csv").write_text(csv)
    if failure is not None:
        failure.text = text
        raise failure
    return text, csv


# ---------------------------------------------------------------------------
# golden corpus
# ---------------------------------------------------------------------------

def golden_corpus() -> list[dict]:
    import json

    return json.loads((GOLDEN_DIR / "corpus.json").read_text())


def run_golden(update: bool = False, stream=None) -> int:
    stream = stream or sys.stdout
    failures = 0
    for entry in golden_corpus():
        text, _ = execute(entry["argv"])
        path = GOLDEN_DIR / f"{entry['name']}.json"
        if update:
            path.write_text(text)
            print(f"updated  {entry['name']}", file=stream)
            continue
        same = path.exists() and path.read_text() == text
        failures += not same
        print(f"{'match' if same else 'DIFFER'}  {entry['name']}", file=stream)
    return 1 if failures else 0


def run(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    if not argv:
        parser.print_help()
        return 1
    try:
        pre, _ = parser.parse_known_args(argv)
        if pre.config:
            os.environ[config.ENV_VAR] = pre.config
        if pre.golden or pre.update_golden:
            return run_golden(update=pre.update_golden)
        text, _ = execute(argv)
        if not pre.out:
            sys.stdout.write(text)
        return 0
    except SystemExit as exc:
        return int(exc.code or 0)
    except Exception as exc:
        for types, code in _EXIT_CODES:
            if isinstance(exc, types):
                if isinstance(exc, NotConvergedError) and not pre.out:
                    sys.stdout.write(exc.text)
                print(f"isostab: error [{_error_name(exc)}]: {exc.args[0] if exc.args else exc}", file=sys.stderr)
                return code
        raise


def main():
    sys.exit(run())
