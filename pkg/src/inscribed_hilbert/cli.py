"""Command-line runner for the area experiments.

Exit codes: 0 success, 1 invariant failure, 2 configuration error,
3 quadrature non-convergence in a required row.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys

import numpy as np

from . import experiments as ex
from . import fock_goncharov as fg
from .convex_domains import ConvexDomain, ConvexPolygonDomain, DomainError, EllipseDomain, square
from .hilbert import DEFAULT_CONFIG, QuadratureConfig, hilbert_distance
from .invariants import run_invariant_suite
from .projective import ProjectiveError
from .quadrature import region_area

EXIT_OK, EXIT_INVARIANT, EXIT_CONFIG, EXIT_QUADRATURE = 0, 1, 2, 3

log = logging.getLogger("inscribed_hilbert")


class ConfigError(Exception):
    pass


def _load_config(path: str | None) -> QuadratureConfig:
    if path is None:
        return DEFAULT_CONFIG
    try:
        with open(path) as fh:
            return QuadratureConfig.from_dict(json.load(fh))
    except (OSError, ValueError, TypeError) as exc:
        raise ConfigError(f"cannot load config {path}: {exc}") from exc


def _domain_arg(arg: str) -> ConvexDomain:
    """``disk``, ``square`` or a JSON file / inline JSON with a domain dict."""
    if arg == "disk":
        return EllipseDomain.disk()
    if arg == "square":
        return square()
    try:
        text = arg if arg.lstrip().startswith("{") else open(arg).read()
        return ConvexDomain.from_dict(json.loads(text))
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise ConfigError(f"cannot read domain {arg!r}: {exc}") from exc


def _points_arg(arg: str) -> ConvexPolygonDomain:
    try:
        pts = json.loads(arg)
        return ConvexPolygonDomain.from_points(pts)
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"cannot read region {arg!r}: {exc}") from exc


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        obj = obj.item()
    if isinstance(obj, float) and not math.isfinite(obj):
        return str(obj)
    return obj


def _emit(args, columns, rows, summary: dict):
    """Rows as CSV (stdout or --out), or everything as JSON when --out ends in .json."""
    if args.out and args.out.endswith(".json"):
        payload = {"columns": list(columns), "rows": [list(r) for r in rows], "summary": summary}
        with open(args.out, "w") as fh:
            json.dump(_jsonable(payload), fh, indent=2)
            fh.write("\n")
        return
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in r])
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(buf.getvalue())
    else:
        sys.stdout.write(buf.getvalue())
    if summary:
        sys.stderr.write(json.dumps(_jsonable(summary)) + "\n")


def _required_ok(records) -> bool:
    """Required rows converge, unless the quadrature flagged them divergent."""
    return all(r.area is None or r.area.converged or r.area.divergent for r in records)


# ---------------------------------------------------------------- commands

def cmd_triangle_table(args, cfg):
    rows = ex.run_triangle_table(args.T, cfg)
    cols = ("T", "area", "area_err", "ratio", "lower_bound", "evals", "converged")
    _emit(args, cols, [[r.to_dict()[c] for c in cols] for r in rows], {})
    return EXIT_OK if all(r.area.converged for r in rows) else EXIT_QUADRATURE


def _path_from_args(args) -> ex.DegenerationPath:
    if args.kind == "bulge-ray":
        return ex.DegenerationPath("bulge-ray", args.samples, (1.0, float(args.samples)), spacing="linear")
    param = {"constant": args.c, "loglog": 0.0, "power": args.eps}[args.g]
    return ex.DegenerationPath.graph(args.g, param, args.samples, args.x0, args.ratio)


def cmd_degenerate(args, cfg):
    run = ex.run_degeneration(_path_from_args(args), args.T, args.Y, cfg,
                              reference=(args.W0, args.Z0), bound=args.bound)
    _emit(args, ex.CSV_COLUMNS, run.rows(), {"summary": run.summary.to_dict(),
                                              "records": [r.to_dict() for r in run.records]})
    return EXIT_OK if _required_ok(run.tail()) else EXIT_QUADRATURE


def cmd_case_sweep(args, cfg):
    case = fg.classify_degeneration(args.z, args.w, args.ratio)
    sweep = ex.run_case_sweep(case, args.n, cfg, spacing=args.spacing, T=args.T, Y=args.Y)
    _emit(args, ex.CSV_COLUMNS, sweep.run.rows(),
          {"verdict": sweep.verdict.to_dict(), "summary": sweep.run.summary.to_dict()})
    return EXIT_OK if _required_ok(sweep.run.tail()) else EXIT_QUADRATURE


def cmd_bulge(args, cfg):
    run, verdict = ex.run_bulge_counterexample(args.n, cfg, args.T, args.Y)
    _emit(args, ex.CSV_COLUMNS, run.rows(),
          {"verdict": verdict.to_dict(), "summary": run.summary.to_dict()})
    return EXIT_OK if _required_ok(run.tail()) else EXIT_QUADRATURE


def cmd_invariants(args, cfg):
    report = run_invariant_suite(args.seed)
    text = report.text()
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK if report.passed else EXIT_INVARIANT


def cmd_area(args, cfg):
    if args.quad is not None:
        params = fg.QuadParams(*args.quad)
        res = ex.quadrilateral_area(params, cfg, args.method)
        info = {"params": params.to_dict(), "method": args.method}
    else:
        if args.domain is None or args.region is None:
            raise ConfigError("area needs --quad W Z T Y, or --domain with --region")
        res = region_area(_domain_arg(args.domain), _points_arg(args.region), cfg)
        info = {}
    info.update(res.to_dict())
    sys.stdout.write(json.dumps(_jsonable(info)) + "\n")
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(_jsonable(info), fh, indent=2)
    return EXIT_OK if res.converged or res.divergent else EXIT_QUADRATURE


def cmd_distance(args, cfg):
    d = hilbert_distance(_domain_arg(args.domain), args.x, args.y)
    sys.stdout.write(f"{d!r}\n")
    return EXIT_OK


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="inscribed-hilbert",
                                description="Hilbert area experiments for inscribed polygons.")
    p.add_argument("--config", help="JSON file with quadrature settings")
    p.add_argument("--out", help="output path; .json for JSON, anything else for CSV")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--verbose", "-v", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def tyargs(sp):
        sp.add_argument("--T", type=float, default=1.0, help="triple ratio of ABC")
        sp.add_argument("--Y", type=float, default=1.0, help="triple ratio of ACD")

    s = sub.add_parser("triangle-table", help="inscribed triangle area against T")
    s.add_argument("--T", type=float, nargs="+", default=[1e-3, 1e-2, 1e-1, 1.0, 10.0, 100.0, 1e3])
    s.set_defaults(func=cmd_triangle_table)

    s = sub.add_parser("degenerate", help="area along a degeneration path")
    s.add_argument("--kind", choices=("graph", "bulge-ray"), default="graph")
    s.add_argument("--g", choices=("constant", "loglog", "power"), default="constant")
    s.add_argument("--c", type=float, default=0.0, help="constant for --g constant")
    s.add_argument("--eps", type=float, default=0.5, help="exponent for --g power")
    s.add_argument("--samples", type=int, default=20)
    s.add_argument("--x0", type=float, default=1e-2)
    s.add_argument("--ratio", type=float, default=0.5)
    s.add_argument("--W0", type=float, default=1.0, help="reference W for (u, v)")
    s.add_argument("--Z0", type=float, default=1.0, help="reference Z for (u, v)")
    s.add_argument("--bound", type=float, default=ex.COMPARABILITY_BOUND)
    tyargs(s)
    s.set_defaults(func=cmd_degenerate)

    s = sub.add_parser("case-sweep", help="one case of the (Z, W) degeneration catalog")
    s.add_argument("--z", required=True, help="limit of Z: 0, + or inf")
    s.add_argument("--w", required=True, help="limit of W: 0, + or inf")
    s.add_argument("--ratio", required=True, help="limit of Z/W: 0 or inf")
    s.add_argument("--n", type=int, default=12)
    s.add_argument("--spacing", choices=("geometric", "linear"), default="geometric")
    tyargs(s)
    s.set_defaults(func=cmd_case_sweep)

    s = sub.add_parser("bulge-counterexample", help="bounded area with divergent bulge")
    s.add_argument("--n", type=int, default=16)
    tyargs(s)
    s.set_defaults(func=cmd_bulge)

    s = sub.add_parser("invariants", help="seeded property checks")
    s.set_defaults(func=cmd_invariants)

    s = sub.add_parser("area", help="one-off Hilbert area")
    s.add_argument("--quad", type=float, nargs=4, metavar=("W", "Z", "T", "Y"))
    s.add_argument("--method", choices=("split", "direct"), default="split")
    s.add_argument("--domain", help="disk, square, or domain JSON (file or inline)")
    s.add_argument("--region", help="JSON list of region vertices")
    s.set_defaults(func=cmd_area)

    s = sub.add_parser("distance", help="one-off Hilbert distance")
    s.add_argument("--domain", default="disk")
    s.add_argument("--x", type=float, nargs=2, required=True)
    s.add_argument("--y", type=float, nargs=2, required=True)
    s.set_defaults(func=cmd_distance)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = _load_config(args.config)
        return args.func(args, cfg)
    except (ConfigError, ProjectiveError, DomainError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
