"""Command-line interface: constants, p-areas, projections, verification.

    heisgeo constants  --n 1 --lambda 1
    heisgeo parea      --surface pansu.json
    heisgeo project    --surface pansu.json --random-dirs 5 --seed 7
    heisgeo verify     --which lemma_kr --n 2
    heisgeo report-all --output report.csv

Exit codes: 0 success, 1 verification failure, 2 usage error.  Output
files are byte-identical for identical argv and seed; per-row timings go
to the console and are written to files only with --timings.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .core import constants
from .quadrature import QuadratureSpec
from .surfaces import SchemaError, p_area, surface_from_spec
from . import projection, verify


def load_surface(path):
    """Surface from a JSON spec file; schema errors carry the field name."""
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as err:
        raise SchemaError(f"cannot read surface spec {path}: {err}") from err
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as err:
        raise SchemaError(f"{path}: invalid JSON: {err}") from err
    return surface_from_spec(obj)


def _add_quadrature_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--radial-nodes", type=int, default=256)
    parser.add_argument("--angular-nodes", type=int, default=512)
    parser.add_argument("--mc-samples", type=int, default=1_000_000)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--rel-tol", type=float, default=1e-8)
    parser.add_argument("--sphere-rule", choices=("product_angles", "monte_carlo"),
                        default="product_angles")


def _add_output_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--format", choices=("csv", "json", "pretty"), default="pretty")
    parser.add_argument("--output", type=str, default=None,
                        help="write the report to this path (csv or json format)")
    parser.add_argument("--timings", action="store_true",
                        help="include wall-clock seconds in file output "
                             "(disables byte-identical reruns)")


def _quad_from_args(args) -> QuadratureSpec:
    return QuadratureSpec(radial_nodes=args.radial_nodes,
                          angular_nodes=args.angular_nodes,
                          sphere_rule=args.sphere_rule,
                          mc_samples=args.mc_samples,
                          seed=args.seed,
                          rel_tol=args.rel_tol)


def _print_spec_header(spec: QuadratureSpec) -> None:
    print(f"# QuadratureSpec radial_nodes={spec.radial_nodes} "
          f"angular_nodes={spec.angular_nodes} sphere_rule={spec.sphere_rule} "
          f"mc_samples={spec.mc_samples} seed={spec.seed} rel_tol={spec.rel_tol!r} "
          f"singular_endpoint={spec.singular_endpoint}")


def _emit_report(reports, args) -> None:
    for report in reports:
        sys.stdout.write(report.pretty())
    if args.output is None:
        return
    fmt = args.format if args.format != "pretty" else "csv"
    if fmt == "csv":
        chunks = []
        for i, report in enumerate(reports):
            text = report.to_csv(timings=args.timings)
            if i > 0:  # keep a single column header in concatenated output
                text = text.split("\n", 2)[0] + "\n" + text.split("\n", 2)[2]
            chunks.append(text)
        payload = "".join(chunks)
    else:
        if len(reports) == 1:
            payload = reports[0].to_json(timings=args.timings) + "\n"
        else:
            merged = [json.loads(r.to_json(timings=args.timings)) for r in reports]
            payload = json.dumps({"reports": merged}, indent=2, sort_keys=True) + "\n"
    Path(args.output).write_text(payload)
    sys.stdout.write(f"wrote {args.output}\n")


def _cmd_constants(args) -> int:
    c = constants(args.n, args.lam)
    print(f"n            = {c.n}")
    print(f"lambda       = {c.lam!r}")
    print(f"C_n          = {c.c_n!r}")
    print(f"omega_{2 * c.n - 1}      = {c.omega!r}   (unit ball volume, R^{2 * c.n - 1})")
    print(f"S_{2 * c.n - 1}          = {c.s!r}   (unit sphere area, R^{2 * c.n})")
    print(f"A(Pansu)     = {c.pansu_area!r}")
    print(f"2 C_n omega  = {c.projection_constant!r}   (projected p-area constant)")
    return 0


def _cmd_parea(args) -> int:
    surface = load_surface(args.surface)
    spec = _quad_from_args(args)
    _print_spec_header(spec)
    res = p_area(surface, spec, excise=args.excise)
    print(f"p-area       = {res.value!r}")
    print(f"error est.   = {res.error_estimate!r}")
    print(f"evaluations  = {res.evaluations}")
    print(f"method       = {res.method}{'' if res.converged else '  [tolerance not met]'}")
    return 0


def _cmd_project(args) -> int:
    surface = load_surface(args.surface)
    spec = _quad_from_args(args)
    _print_spec_header(spec)
    directions = []
    if args.dir is not None:
        vec = tuple(float(part) for part in args.dir.split(","))
        directions.append(("dir=" + args.dir, projection.PansuDirection.from_direction(vec, args.lam)))
    if args.alpha is not None or args.beta is not None:
        alpha = args.alpha if args.alpha is not None else 0.0
        beta = args.beta if args.beta is not None else 0.0
        res = projection.projected_parea_ambient(
            surface, projection.AmbientDirection(alpha, beta), spec)
        print(f"alpha={alpha!r} beta={beta!r}  projected p-area = {res.value!r} "
              f"(+- {res.error_estimate!r})")
    if args.random_dirs:
        for i, d in enumerate(projection.PansuDirection.sample(
                surface.n, args.lam, args.random_dirs, args.seed)):
            directions.append((f"random[{i}]", d))
    if not directions and args.alpha is None and args.beta is None:
        print("nothing to project: pass --dir, --alpha/--beta, or --random-dirs",
              file=sys.stderr)
        return 2
    for label, d in directions:
        res = projection.projected_parea(surface, d, spec)
        print(f"{label}  projected p-area = {res.value!r} (+- {res.error_estimate!r})")
    return 0


def _cmd_verify(args) -> int:
    cfg = verify.VerifyConfig(
        which=args.which,
        n=args.n,
        lam=args.lam,
        surface=load_surface(args.surface) if args.surface else None,
        samples=args.samples,
        seed=args.seed,
        quadrature=_quad_from_args(args),
        tol=args.tol,
    )
    report = verify.run(cfg)
    _emit_report([report], args)
    return 0 if report.all_pass else 1


def _cmd_report_all(args) -> int:
    reports = verify.report_all(seed=args.seed, quadrature=_quad_from_args(args))
    _emit_report(reports, args)
    total = sum(len(r.rows) for r in reports)
    passed = sum(sum(row.passed for row in r.rows) for r in reports)
    ok = all(r.all_pass for r in reports)
    print(f"report-all: {passed}/{total} rows pass -> {'OK' if ok else 'FAIL'}")
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="heisgeo",
        description="Heisenberg-group p-areas, Pansu spheres, and projected p-areas")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("constants", help="dimensional constants and the Pansu p-area")
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--lambda", dest="lam", type=float, default=1.0)
    p.set_defaults(func=_cmd_constants)

    p = sub.add_parser("parea", help="p-area of a surface from a JSON spec")
    p.add_argument("--surface", required=True)
    p.add_argument("--excise", type=float, default=0.0,
                   help="exclude a parameter-radius ball around the poles")
    _add_quadrature_flags(p)
    p.set_defaults(func=_cmd_parea)

    p = sub.add_parser("project", help="projected p-areas along chosen directions")
    p.add_argument("--surface", required=True)
    p.add_argument("--dir", type=str, default=None,
                   help="comma-separated frame coefficients of a unit direction")
    p.add_argument("--alpha", type=float, default=None, help="polar angle (radians)")
    p.add_argument("--beta", type=float, default=None, help="azimuth (radians)")
    p.add_argument("--random-dirs", type=int, default=0)
    p.add_argument("--lambda", dest="lam", type=float, default=1.0)
    _add_quadrature_flags(p)
    p.set_defaults(func=_cmd_project)

    p = sub.add_parser("verify", help="run one verification report")
    p.add_argument("--which", required=True, choices=sorted(verify.VERIFIERS))
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--lambda", dest="lam", type=float, default=1.0)
    p.add_argument("--surface", type=str, default=None)
    p.add_argument("--samples", type=int, default=20)
    p.add_argument("--tol", type=float, default=None)
    _add_quadrature_flags(p)
    _add_output_flags(p)
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("report-all", help="run the full verification suite")
    _add_quadrature_flags(p)
    _add_output_flags(p)
    p.set_defaults(func=_cmd_report_all)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SchemaError as err:
        print(f"surface spec error: {err}", file=sys.stderr)
        return 2
    except ValueError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
