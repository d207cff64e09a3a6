"""Command-line front end.

Data goes to stdout (or ``--out``), errors to stderr. Exit status is 0 on
success, 1 on a domain or numerical error and 2 on a usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import re
import sys
from pathlib import Path

import numpy as np

from . import counterexample as cx
from .errors import AhisoError
from .imcf import FLOW_COLUMNS, flow_spheres, geroch_audit
from .isoprofile import (
    EXPANSION_COLUMNS,
    MASS_COEFFICIENT,
    PROFILE_COLUMNS,
    Variant,
    compare_profile,
    expansion_residual_order,
    profile_expansion_check,
)
from .metric import load_metric, make_schwarzschild_ads, save_metric
from .numerics import DEFAULT_TOL, Tolerances
from .quantities import (
    ball_volume,
    christodoulou_yau,
    penrose_margin,
    renormalized_volume,
    renormalized_volume_derivative,
    sphere_geometry,
    stable_cmc_H_bound,
)

DIGITS = 12
_NUMBER = re.compile(r"^\s*([-+]?(\d+\.?\d*|\.\d+)([eE][-+]?\d+)?)?\s*(pi)?\s*$")


def parse_area(text: str) -> float:
    """A real literal, optionally with a ``pi`` suffix (``16pi``, ``pi``, ``2.5e3``)."""
    match = _NUMBER.match(text)
    if not match or (match.group(1) is None and match.group(4) is None):
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    value = float(match.group(1)) if match.group(1) is not None else 1.0
    return value * math.pi if match.group(4) else value


def parse_range(text: str) -> list[float]:
    """``lo:hi:n`` as n log-spaced values."""
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"expected lo:hi:n, got {text!r}")
    lo, hi = parse_area(parts[0]), parse_area(parts[1])
    try:
        n = int(parts[2])
    except ValueError:
        raise argparse.ArgumentTypeError(f"count must be an integer in {text!r}") from None
    if lo <= 0 or hi <= 0 or n < 1:
        raise argparse.ArgumentTypeError(f"need positive bounds and n >= 1 in {text!r}")
    if n == 1:
        return [lo]
    return [float(v) for v in np.logspace(math.log10(lo), math.log10(hi), n)]


def _fmt(x):
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (float, np.floating)):
        return float(f"{float(x):.{DIGITS}g}")
    if isinstance(x, dict):
        return {k: _fmt(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_fmt(v) for v in x]
    return x


def _cell(x):
    if isinstance(x, (float, np.floating)):
        return f"{float(x):.{DIGITS}g}"
    return str(x)


def _csv_text(columns, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_cell(v) for v in row])
    return buf.getvalue()


def _json_text(data) -> str:
    return json.dumps(_fmt(data), indent=2) + "\n"


def _emit(args, text: str):
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _note(message: str):
    print(message, file=sys.stderr)


def _tol(args) -> Tolerances:
    return DEFAULT_TOL.replace(abs_tol=args.abs_tol, rel_tol=args.rel_tol)


def _metric(args):
    if args.metric is None:
        if getattr(args, "mass", None) is not None:
            return make_schwarzschild_ads(args.mass)
        raise AhisoError("a metric is required (--metric or --mass)")
    try:
        return load_metric(args.metric)
    except (OSError, json.JSONDecodeError) as exc:
        raise AhisoError(f"cannot read metric {args.metric!r}: {exc}") from None


def _sphere_radius(metric, area):
    """Area radius for ``area``, snapping rounding-level undershoot onto the horizon."""
    s = math.sqrt(area / (4.0 * math.pi))
    sh = metric.horizon_radius
    return sh if sh * (1 - 1e-14) <= s < sh else s


# -- subcommands ---------------------------------------------------------------


def cmd_metric_info(args):
    metric = _metric(args)
    info = metric.describe()
    info["renormalized_volume"] = renormalized_volume(metric, _tol(args))
    if metric.has_horizon:
        info["penrose_margin"] = penrose_margin(metric, _tol(args))
    info["min_scalar_curvature"] = cx.min_scalar_curvature(metric)
    _emit(args, _json_text(info))


def cmd_quantities(args):
    metric = _metric(args)
    if args.area is None:
        raise AhisoError("quantities needs --area")
    s = _sphere_radius(metric, args.area)
    geom = sphere_geometry(metric, s)
    lhs, rhs0, rhs1, combined = christodoulou_yau(metric, s)
    data = {
        "s": geom.s,
        "area": geom.area,
        "mean_curvature": geom.mean_curvature,
        "hawking_mass": geom.hawking_mass,
        "scalar_curvature": geom.scalar_curvature,
        "traceless_sff_norm_sq": geom.traceless_sff_norm_sq,
        "ball_volume": ball_volume(metric, s, _tol(args)),
        "christodoulou_yau": {"lhs": lhs, "rhs_genus0": rhs0, "rhs_general": rhs1, "combined_lhs": combined},
        "stable_cmc_H_bound": stable_cmc_H_bound(metric, s),
    }
    _emit(args, _json_text(data))


def cmd_renorm_vol(args):
    metric = _metric(args)
    tol = _tol(args)
    data = {"renormalized_volume": renormalized_volume(metric, tol)}
    if metric.has_horizon:
        data["horizon_area"] = metric.horizon_area
        data["penrose_margin"] = penrose_margin(metric, tol)
    if metric.kind == "schwarzschild_ads":
        data["derivative"] = renormalized_volume_derivative(metric.mass, tol)
    _emit(args, _json_text(data))


def cmd_imcf(args):
    metric = _metric(args)
    area0 = args.area if args.area is not None else metric.horizon_area
    samples = flow_spheres(metric, area0, args.tmax, args.steps, _tol(args))
    min_inc, monotone = geroch_audit(samples)
    if args.format == "json":
        data = {"samples": [dict(zip(FLOW_COLUMNS, s.row())) for s in samples],
                "geroch_min_increment": min_inc, "geroch_monotone": monotone}
        _emit(args, _json_text(data))
    else:
        _emit(args, _csv_text(FLOW_COLUMNS, [s.row() for s in samples]))
        _note(f"geroch_min_increment={_cell(min_inc)} monotone={monotone}")


def cmd_profile(args):
    metric = _metric(args)
    if not args.areas:
        raise AhisoError("profile needs --areas")
    samples = compare_profile(metric, args.areas, _tol(args))
    if args.format == "json":
        _emit(args, _json_text([dict(zip(PROFILE_COLUMNS, s.row())) for s in samples]))
    else:
        _emit(args, _csv_text(PROFILE_COLUMNS, [s.row() for s in samples]))


def cmd_verify_expansion(args):
    variant = Variant(args.variant)
    areas = args.areas or parse_range("1e3:1e7:5")
    metric, mass = None, args.mass
    if variant is Variant.COMPACT_PERTURBATION:
        metric = _metric(args)
        mass = metric.mass
    elif mass is None:
        mass = 0.0 if variant is Variant.HYPERBOLIC_BALL else 1.0
    report = expansion_residual_order(mass, areas, variant, metric=metric)
    if args.format == "json":
        data = {"variant": variant.value, "mass": mass,
                "rows": [dict(zip(EXPANSION_COLUMNS, r)) for r in report.rows()],
                "fitted_order": report.fitted_order}
        _emit(args, _json_text(data))
    else:
        _emit(args, _csv_text(EXPANSION_COLUMNS, report.rows()))
        _note(f"fitted_order={_cell(report.fitted_order)}")


def cmd_profile_expansion(args):
    metric = _metric(args)
    volumes = args.volumes or parse_range("1e4:1e6:3")
    rows = profile_expansion_check(metric, volumes)
    target = MASS_COEFFICIENT * metric.mass
    if args.format == "json":
        data = {"target": target, "rows": [{"volume": v, "extracted": e} for v, e in rows]}
        _emit(args, _json_text(data))
    else:
        _emit(args, _csv_text(("volume", "extracted"), rows))
        _note(f"target={_cell(target)}")


def cmd_counterexample(args):
    kwargs = {k: getattr(args, k) for k in ("r0", "eps", "mass") if getattr(args, k) is not None}
    params = cx.CounterexampleParams(**kwargs)
    metric = cx.construct(params)
    report = cx.verify(metric, args.areas or cx.DEFAULT_AREAS)
    if args.metric_out:
        metric_path = Path(args.metric_out)
    elif args.out:
        out = Path(args.out)
        metric_path = out.with_name(out.stem + ".metric.json")
    else:
        metric_path = Path("counterexample.metric.json")
    save_metric(metric, metric_path)
    data = report.to_dict()
    data["params"] = {"r0": params.r0, "eps": params.eps, "mass": params.mass,
                      "s1": params.s1, "bump_width": params.bump_width}
    data["metric_file"] = str(metric_path)
    _emit(args, _json_text(data))


# -- parser --------------------------------------------------------------------


def _common(p, *, metric=True, mass=False, area=False, areas=False, fmt=False):
    if metric:
        p.add_argument("--metric", help="inline JSON metric or @path to a metric file")
    if mass:
        p.add_argument("--mass", type=float, help="Schwarzschild-AdS mass")
    if area:
        p.add_argument("--area", type=parse_area, help="sphere area, e.g. 16pi")
    if areas:
        p.add_argument("--areas", type=parse_range, help="lo:hi:n log-spaced areas")
    if fmt:
        p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", help="write output to this file instead of stdout")
    p.add_argument("--abs-tol", type=float, default=DEFAULT_TOL.abs_tol)
    p.add_argument("--rel-tol", type=float, default=DEFAULT_TOL.rel_tol)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ahiso", description="Isoperimetric numerics in asymptotically hyperbolic 3-manifolds.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("metric-info", help="horizon, renormalized volume and curvature summary")
    _common(p, mass=True)
    p.set_defaults(func=cmd_metric_info)

    p = sub.add_parser("quantities", help="geometry of the coordinate sphere of a given area")
    _common(p, mass=True, area=True)
    p.set_defaults(func=cmd_quantities)

    p = sub.add_parser("renorm-vol", help="renormalized volume and Penrose margin")
    _common(p, mass=True)
    p.set_defaults(func=cmd_renorm_vol)

    p = sub.add_parser("imcf", help="inverse mean curvature flow of centered spheres")
    _common(p, mass=True, area=True, fmt=True)
    p.add_argument("--tmax", type=float, default=3.0)
    p.add_argument("--steps", type=int, default=200)
    p.set_defaults(func=cmd_imcf)

    p = sub.add_parser("profile", help="coordinate balls against the horizon-plus-ball competitor")
    _common(p, mass=True, areas=True, fmt=True)
    p.set_defaults(func=cmd_profile)

    p = sub.add_parser("verify-expansion", help="large-area series residuals and their order")
    _common(p, mass=True, areas=True, fmt=True)
    p.add_argument("--variant", choices=[v.value for v in Variant], default="full")
    p.set_defaults(func=cmd_verify_expansion)

    p = sub.add_parser("profile-expansion", help="recover the mass coefficient of A(V)")
    _common(p, mass=True, fmt=True)
    p.add_argument("--volumes", type=parse_range, help="lo:hi:n log-spaced volumes")
    p.set_defaults(func=cmd_profile_expansion)

    p = sub.add_parser("counterexample", help="build and verify the perturbed metric")
    _common(p, metric=False, areas=True)
    p.add_argument("--r0", type=float)
    p.add_argument("--eps", type=float)
    p.add_argument("--mass", type=float)
    p.add_argument("--metric-out", help="metric file path (default: next to --out)")
    p.set_defaults(func=cmd_counterexample)
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        Tolerances(args.abs_tol, args.rel_tol)
    except ValueError as exc:
        parser.error(str(exc))
    try:
        args.func(args)
    except AhisoError as exc:
        _note(f"ahiso {args.command}: {type(exc).__name__}: {exc}")
        return 1
    return 0


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
