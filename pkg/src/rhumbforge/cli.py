"""Command-line interface.

Exit codes: 0 success, 1 a check reported failure (``verify``,
``examples``), 2 invalid input, 3 numerical failure (singularity, step
underflow, domain exit); numerical failures print a JSON diagnostic on
stderr. The default tolerance can be overridden with ``RHUMBFORGE_TOL``.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from .errors import (EvaluationError, GeometryError, IntegrationError, NoBracket,
                     QuadratureError, RhumbforgeError, ValidationError)
from .io import (export_curve, export_surface_mesh, load_scene, parse_number,
                 read_curve_csv)
from .loxodrome import Branch, Family, LoxodromeSpec, slope
from .numerics import (IntegratorConfig, arc_length, direction_field, integrate_loxodrome,
                       max_angle_deviation)
from .oracle import EXAMPLE_IDS, example_fixture
from .surface import surface_from_record

EXIT_OK, EXIT_FAILED, EXIT_INVALID, EXIT_NUMERIC = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def _default_tol():
    text = os.environ.get("RHUMBFORGE_TOL")
    if text is None:
        return 1e-10
    try:
        return float(text)
    except ValueError:
        raise ValidationError(f"RHUMBFORGE_TOL={text!r} is not a number") from None


def _common(p):
    p.add_argument("--branch", choices=[b.value for b in Branch], default="minus",
                   help="sign of the square-root term (default: minus)")
    p.add_argument("--tol", type=float, default=None,
                   help="integrator abs/rel tolerance (default 1e-10 or $RHUMBFORGE_TOL)")
    p.add_argument("--out", default=None, help="output file")


def _surface_args(p):
    p.add_argument("--scene", help="JSON scene file with a 'surface' record")
    p.add_argument("--a", default="0", help="offset of the profile rotation axis")
    p.add_argument("--b", default="0", help="twist rate")
    p.add_argument("--f", help="profile f(y)")
    p.add_argument("--g", help="profile g(y)")
    p.add_argument("--y-domain", nargs=2, metavar=("LO", "HI"))
    p.add_argument("--x-domain", nargs=2, metavar=("LO", "HI"), default=["-2*pi", "2*pi"])


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="rhumbforge", description="Loxodromes on twisted surfaces")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("surface", help="export the surface mesh (and scene curves)")
    _surface_args(p)
    _common(p)
    p.add_argument("--nx", type=int, default=None)
    p.add_argument("--ny", type=int, default=None)

    p = sub.add_parser("loxodrome", help="integrate one loxodrome and print a JSON summary")
    _surface_args(p)
    _common(p)
    p.add_argument("--family", choices=[f.value for f in Family], default="meridian")
    p.add_argument("--angle", help="constant angle in radians, e.g. 'pi/6'")
    p.add_argument("--start", nargs=2, metavar=("X0", "Y0"))
    p.add_argument("--span", nargs=2, metavar=("LO", "HI"))
    p.add_argument("--index", type=int, default=0, help="loxodrome record of --scene to use")
    p.add_argument("--format", choices=["csv", "obj"], default="csv")

    p = sub.add_parser("arclength", help="recompute the arc length of a stored curve")
    _surface_args(p)
    _common(p)
    p.add_argument("--curve", required=True, help="curve CSV written by 'loxodrome'")
    p.add_argument("--family", choices=[f.value for f in Family], default="meridian")
    p.add_argument("--angle", help="angle of the loxodrome; omit to differentiate the samples")

    p = sub.add_parser("verify", help="run the invariant checks on a surface")
    _surface_args(p)
    _common(p)
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--curves", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("examples", help="reproduce the three reference loxodromes")
    _common(p)
    return parser


def _config(args):
    tol = args.tol if args.tol is not None else _default_tol()
    return IntegratorConfig.with_tol(tol)


def _surface(args):
    if args.scene:
        return load_scene(args.scene).surface
    if args.f is None or args.g is None or args.y_domain is None:
        raise ValidationError("give --scene, or --f, --g and --y-domain")
    record = {"a": parse_number(args.a), "b": parse_number(args.b), "f": args.f, "g": args.g,
              "y_domain": [parse_number(t) for t in args.y_domain],
              "x_domain": [parse_number(t) for t in args.x_domain]}
    return surface_from_record(record)


def _emit(obj):
    print(json.dumps(obj, indent=2))


def summarize(surface, spec, curve) -> dict:
    return {
        "family": spec.family.value,
        "angle": spec.angle,
        "branch": spec.branch.value,
        "samples": len(curve),
        "start": list(spec.start),
        "u_range": [float(curve.u[0]), float(curve.u[-1])],
        "v_range": [float(curve.v[0]), float(curve.v[-1])],
        "arc_length": float(curve.s[-1]),
        "max_angle_deviation": max_angle_deviation(surface, curve, spec.angle),
    }


def cmd_surface(args):
    config = _config(args)
    scene = None
    if args.scene:
        scene = load_scene(args.scene, config)
        surface = scene.surface
    else:
        surface = _surface(args)
    nx = args.nx if args.nx is not None else (scene.nx if scene else 65)
    ny = args.ny if args.ny is not None else (scene.ny if scene else 65)
    out = args.out or (scene.mesh_path if scene else None) or "surface.obj"
    n_v, n_f = export_surface_mesh(surface, nx, ny, out)
    report = {"mesh": out, "vertices": n_v, "faces": n_f, "curves": []}
    if scene:
        for spec, path in zip(scene.loxodromes, scene.curve_paths):
            spec = LoxodromeSpec(spec.family, spec.angle, spec.start, spec.span,
                                 Branch(args.branch) if args.branch != "minus" else spec.branch,
                                 config)
            curve = integrate_loxodrome(surface, spec)
            export_curve(curve, path, scene.curve_format)
            report["curves"].append({"path": path, **summarize(surface, spec, curve)})
    _emit(report)
    return EXIT_OK


def cmd_loxodrome(args):
    config = _config(args)
    if args.scene and args.angle is None:
        scene = load_scene(args.scene, config)
        surface = scene.surface
        if not 0 <= args.index < len(scene.loxodromes):
            raise ValidationError(f"scene has no loxodrome #{args.index}")
        base = scene.loxodromes[args.index]
        spec = LoxodromeSpec(base.family, base.angle, base.start, base.span,
                             Branch(args.branch), config)
    else:
        surface = _surface(args)
        if args.angle is None or args.start is None or args.span is None:
            raise ValidationError("loxodrome needs --angle, --start and --span")
        spec = LoxodromeSpec(Family(args.family), parse_number(args.angle),
                             tuple(parse_number(t) for t in args.start),
                             tuple(parse_number(t) for t in args.span),
                             Branch(args.branch), config)
    curve = integrate_loxodrome(surface, spec)
    summary = summarize(surface, spec, curve)
    if args.out:
        export_curve(curve, args.out, args.format)
        summary["out"] = args.out
    _emit(summary)
    return EXIT_OK


def cmd_arclength(args):
    surface = _surface(args)
    family = Family(args.family)
    curve = read_curve_csv(args.curve, family)
    if args.angle is not None:
        angle = parse_number(args.angle)
        x0, y0 = (curve.u[0], curve.v[0]) if family is Family.MERIDIAN else (curve.v[0], curve.u[0])
        spec = LoxodromeSpec(family, angle, (x0, y0), (curve.u[0], curve.u[-1]), Branch(args.branch))
        curve.slope = direction_field(surface, spec)
    length = arc_length(surface, curve)
    _emit({"curve": args.curve, "arc_length": length, "stored_arc_length": float(curve.s[-1])})
    return EXIT_OK


def verify_surface(surface, samples=100, curves=5, seed=0, branch=Branch.MINUS, config=None):
    """Invariant checks on one surface; returns a JSON-ready report."""
    rng = np.random.default_rng(seed)
    x_lo, x_hi = surface.x_domain
    y_lo, y_hi = surface.y_domain
    checks = {}

    worst_metric = 0.0
    for _ in range(samples):
        x, y = rng.uniform(x_lo, x_hi), rng.uniform(y_lo, y_hi)
        tx, ty = surface.partials(x, y)
        g = surface.metric(x, y)
        worst_metric = max(worst_metric, abs(g.g11 - float(tx @ tx)),
                           abs(g.g12 - float(tx @ ty)), abs(g.g22 - float(ty @ ty)))
    checks["metric_equivalence"] = {"max_abs_error": worst_metric, "tol": 1e-9,
                                    "ok": worst_metric <= 1e-9}

    worst_root = 0.0
    tested = 0
    for _ in range(samples):
        x, y = rng.uniform(x_lo, x_hi), rng.uniform(y_lo, y_hi)
        angle = rng.uniform(0.05, math.pi - 0.05)
        g11, g12, g22 = surface.metric(x, y)
        s2, c2 = math.sin(angle) ** 2, math.cos(angle) ** 2
        for family in Family:
            try:
                m = slope(surface, family, x, y, angle, branch)
            except GeometryError:
                continue
            if family is Family.MERIDIAN:
                res = (g11 * g11 * s2 + 2 * g11 * g12 * s2 * m + (g12 * g12 - g11 * g22 * c2) * m * m) / (g11 * g11)
            else:
                res = ((g11 * g22 * c2 - g12 * g12) * m * m - 2 * g12 * g22 * s2 * m - g22 * g22 * s2) / (g22 * g22)
            worst_root = max(worst_root, abs(res))
            tested += 1
    checks["root_residual"] = {"max_rel_residual": worst_root, "samples": tested, "tol": 1e-9,
                               "ok": worst_root <= 1e-9}

    deviations = []
    attempts = 0
    while len(deviations) < curves and attempts < 20 * curves:
        attempts += 1
        family = Family.MERIDIAN if attempts % 2 else Family.PARALLEL
        angle = rng.uniform(0.2, math.pi / 2 - 0.2)
        x0, y0 = rng.uniform(x_lo, x_hi), rng.uniform(y_lo, y_hi)
        (u_lo, u_hi), u0 = ((x_lo, x_hi), x0) if family is Family.MERIDIAN else ((y_lo, y_hi), y0)
        half = 0.25 * (u_hi - u_lo)
        span = (max(u_lo, u0 - half), min(u_hi, u0 + half))
        spec = LoxodromeSpec(family, angle, (x0, y0), span, branch, config)
        try:
            curve = integrate_loxodrome(surface, spec, arc_length=False)
        except (IntegrationError, GeometryError):
            continue
        deviations.append(max_angle_deviation(surface, curve, angle))
    worst_angle = max(deviations) if deviations else None
    checks["angle_constancy"] = {"curves": len(deviations), "max_cos_deviation": worst_angle,
                                 "tol": 1e-6,
                                 "ok": bool(deviations) and worst_angle <= 1e-6}
    return {"ok": all(c["ok"] for c in checks.values()), "checks": checks}


def cmd_verify(args):
    surface = _surface(args)
    report = verify_surface(surface, args.samples, args.curves, args.seed,
                            Branch(args.branch), _config(args))
    _emit(report)
    return EXIT_OK if report["ok"] else EXIT_FAILED


def run_examples(config=None, branch=Branch.MINUS):
    """Integrate the three reference curves; one row per example."""
    rows = []
    for ex_id in EXAMPLE_IDS:
        ex = example_fixture(ex_id)
        spec = LoxodromeSpec(ex.spec.family, ex.spec.angle, ex.spec.start, ex.spec.span,
                             branch, config)
        curve = integrate_loxodrome(ex.surface, spec)
        lo, hi = spec.span
        ends = (float(curve.v[0]), float(curve.v[-1]))
        closed = (ex.closed_form(lo), ex.closed_form(hi))
        arc = float(curve.s[-1])
        ok = (ex.endpoint_ok(ends[0], ex.published_range[0])
              and ex.endpoint_ok(ends[1], ex.published_range[1]) and ex.arc_ok(arc))
        rows.append({"id": ex_id, "endpoints": ends, "closed_form": closed,
                     "published_range": ex.published_range, "arc_length": arc,
                     "published_arc_length": ex.published_arc_length, "ok": ok})
    return rows


def cmd_examples(args):
    rows = run_examples(_config(args), Branch(args.branch))
    lines = [f"{'id':<4} {'v(lo)':>12} {'v(hi)':>12} {'closed v(lo)':>13} {'closed v(hi)':>13} "
             f"{'arc':>10} {'published':>10}  status"]
    for r in rows:
        lines.append(f"{r['id']:<4} {r['endpoints'][0]:>12.7g} {r['endpoints'][1]:>12.7g} "
                     f"{r['closed_form'][0]:>13.7g} {r['closed_form'][1]:>13.7g} "
                     f"{r['arc_length']:>10.7g} {r['published_arc_length']:>10.7g}  "
                     f"{'pass' if r['ok'] else 'FAIL'}")
    text = "\n".join(lines)
    print(text)
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(rows, fh, indent=2)
    return EXIT_OK if all(r["ok"] for r in rows) else EXIT_FAILED


_COMMANDS = {"surface": cmd_surface, "loxodrome": cmd_loxodrome, "arclength": cmd_arclength,
             "verify": cmd_verify, "examples": cmd_examples}


def _diagnostic(exc):
    info = {"error": type(exc).__name__, "message": str(exc)}
    location = getattr(exc, "location", None)
    if location is not None:
        info["location"] = {"x": location[0], "y": location[1]}
    cause = exc.__cause__
    if cause is not None:
        info["cause"] = type(cause).__name__
    partial = getattr(exc, "partial", None)
    if partial is not None and hasattr(partial, "u"):
        info["partial_samples"] = len(partial)
    return info


def _protect_negative_values(argv):
    # argparse would read "-pi" or "-2*pi" as an option name; there are no
    # single-dash options besides -h
    out = []
    for tok in argv:
        if len(tok) > 1 and tok[0] == "-" and tok[1] != "-" and tok != "-h":
            tok = " " + tok
        out.append(tok)
    return out


def run_cli(argv=None) -> int:
    """Run one command; returns the exit code instead of exiting."""
    parser = build_parser()
    argv = _protect_negative_values(sys.argv[1:] if argv is None else list(argv))
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.command](args)
    except ValidationError as exc:
        print(f"rhumbforge: error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (IntegrationError, GeometryError, EvaluationError, QuadratureError, NoBracket) as exc:
        print(json.dumps(_diagnostic(exc)), file=sys.stderr)
        return EXIT_NUMERIC
    except RhumbforgeError as exc:  # pragma: no cover - every subclass is handled above
        print(f"rhumbforge: error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


def main():
    sys.exit(run_cli())
