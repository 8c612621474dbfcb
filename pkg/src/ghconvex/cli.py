"""Batch command line front-end.

Commands: constants, scan, margins, curvature, stability, geodesics,
counterexample.  Reports are JSON (default) or CSV; every report embeds the
fully resolved run specification, and a fixed seed makes byte-identical
output.  Exit codes: 0 success, 1 an --expect assertion failed, 2 usage or
validation errors.
"""

from __future__ import annotations

import argparse
import io
import json
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from . import barriers, convexity, geodesics, stability
from .errors import GHConvexError
from .potential import load_config
from .surfaces import parse_surface

__all__ = ["RunSpec", "run", "main"]


def _fmt(v) -> str:
    if isinstance(v, str):
        return v
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return format(float(v), ".17g")


@dataclass
class RunSpec:
    """Fully resolved run parameters, embedded in every report."""

    command: str
    params: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"command": self.command, **self.params}


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _json_report(spec: RunSpec, body: dict) -> str:
    return json.dumps({"runspec": spec.to_dict(), **body}, indent=2, sort_keys=True) + "\n"


def _csv_report(spec: RunSpec, header: list[str], rows, trailer: Optional[str] = None) -> str:
    buf = io.StringIO()
    buf.write("# runspec: " + json.dumps(spec.to_dict(), sort_keys=True) + "\n")
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(_fmt(v) for v in row) + "\n")
    if trailer:
        buf.write(trailer + "\n")
    return buf.getvalue()


def _surface_from_args(args) -> dict:
    """Surface spec from --surface (JSON text, @file, or family name plus
    family flags like --r/--a/--level)."""
    s = args.surface
    if s is None:
        raise GHConvexError("scan requires --surface")
    if s.startswith("@"):
        with open(s[1:], "r", encoding="utf-8") as fh:
            return json.load(fh)
    s = s.strip()
    if s.startswith("{"):
        return json.loads(s)
    spec: dict = {"family": s}
    for key in ("r", "a", "level", "offset", "span"):
        val = getattr(args, key.replace("-", "_"), None)
        if val is not None:
            spec[key] = val
    for key in ("centre", "point", "axis", "normal"):
        val = getattr(args, key, None)
        if val is not None:
            spec[key] = val
    if args.foci is not None:
        spec["foci"] = json.loads(args.foci)
    return spec


def _check_expect(expect: Optional[str], positive: bool, what: str) -> int:
    if expect is None:
        return 0
    want = expect == "positive"
    if want != positive:
        print(f"expectation failed: {what}", file=sys.stderr)
        return 1
    return 0


def _cmd_constants(args) -> int:
    kmax = args.kmax
    spec = RunSpec("constants", {"kmax": kmax, "format": args.format, "seed": args.seed})
    C = barriers.constant_C()
    rk = {k: barriers.constant_Rk(k) for k in range(2, kmax + 1)}
    if args.format == "json":
        body = {"C": C, "R_k": {str(k): v for k, v in rk.items()}}
        _emit(_json_report(spec, body), args.out)
    else:
        rows = [["C", "", _fmt(C)]] + [["R_k", k, _fmt(v)] for k, v in rk.items()]
        _emit(_csv_report(spec, ["constant", "k", "value"], rows), args.out)
    return 0


def _cmd_scan(args) -> int:
    config = load_config(args.config)
    surf_spec = _surface_from_args(args)
    surface = parse_surface(surf_spec)
    sampling = convexity.ScanSampling(grid=(args.grid, args.grid), random=args.random, seed=args.seed)
    spec = RunSpec(
        "scan",
        {
            "config": args.config,
            "surface": surf_spec,
            "k": args.k,
            "grid": args.grid,
            "random": args.random,
            "seed": args.seed,
            "format": args.format,
            "expect": args.expect,
        },
    )
    report = convexity.convexity_scan(
        config, surface, args.k, sampling, keep_samples=(args.format == "csv")
    )
    if args.format == "json":
        _emit(_json_report(spec, report.to_dict()), args.out)
    else:
        trailer = (
            f"# verdict: {report.verdict}, min_eigensum: {_fmt(report.min_eigensum)}, "
            f"samples: {report.samples}, skipped: {report.skipped}"
        )
        _emit(
            _csv_report(
                spec,
                ["p0", "p1", "x", "y", "z", "eigensum", "scale"],
                report.samples_table,
                trailer,
            ),
            args.out,
        )
    if args.expect is None:
        return 0
    wanted = {"positive": "StrictlyConvex", "negative": "Violated"}[args.expect]
    if report.verdict != wanted:
        print(
            f"expectation failed: verdict {report.verdict}, wanted {wanted}",
            file=sys.stderr,
        )
        return 1
    return 0


def _cmd_margins(args) -> int:
    config = load_config(args.config)
    lo, hi, steps = args.pmin, args.pmax, args.steps
    if lo is None or hi is None:
        raise GHConvexError("margins requires --pmin and --pmax")
    params = np.linspace(lo, hi, steps)
    spec = RunSpec(
        "margins",
        {
            "config": args.config,
            "family": args.family,
            "pmin": lo,
            "pmax": hi,
            "steps": steps,
            "dirs": args.dirs,
            "seed": args.seed,
            "direction": args.direction,
            "format": args.format,
        },
    )
    if args.family == "sphere":
        curves = barriers.sphere_margin_curve(config, params, args.dirs, args.seed)
    elif args.family == "cylinder":
        curves = barriers.cylinder_margin_curve(config, params, n_samples=args.dirs, seed=args.seed)
    elif args.family == "plane":
        direction = args.direction or [0.0, 0.0, 1.0]
        curves = barriers.plane_margin_curve(config, direction, params, n_samples=args.dirs, seed=args.seed)
    elif args.family == "codim2":
        curves = barriers.codim2_margin_curve(config, params, args.dirs, args.seed)
    else:
        raise GHConvexError(f"unknown margin family {args.family}")
    if args.family == "codim2":
        header = ["parameter", "min_minor1", "max_det_aux", "threshold"]
        rows = [[c.parameter, c.min_minor1, c.max_det_aux, c.threshold] for c in curves]
        body = {
            "threshold": curves[0].threshold if curves else None,
            "curve": [
                {
                    "parameter": c.parameter,
                    "min_minor1": c.min_minor1,
                    "max_det_aux": c.max_det_aux,
                }
                for c in curves
            ],
        }
    else:
        header = ["parameter", "min_margin", "threshold", "argmin_x", "argmin_y", "argmin_z"]
        rows = [[c.parameter, c.margin, c.threshold, *c.argmin] for c in curves]
        body = {
            "threshold": curves[0].threshold if curves else None,
            "curve": [
                {"parameter": c.parameter, "min_margin": c.margin, "argmin": [float(v) for v in c.argmin]}
                for c in curves
            ],
        }
    if args.format == "json":
        _emit(_json_report(spec, body), args.out)
    else:
        _emit(_csv_report(spec, header, rows), args.out)
    return 0


def _segment(args, config) -> stability.SegmentSurface:
    return stability.SegmentSurface(config, args.i, args.j)


def _cmd_curvature(args) -> int:
    config = load_config(args.config)
    seg = _segment(args, config)
    n = args.samples
    spec = RunSpec(
        "curvature",
        {"config": args.config, "i": args.i, "j": args.j, "samples": n, "format": args.format},
    )
    half = (seg.a - seg.delta) * (1.0 - 1e-9)
    ts = np.linspace(-half, half, n)
    K, M, N, terms = stability.mn_decomposition_batch(seg, ts)
    rows = np.column_stack([ts, K, M, N, *terms])
    if args.format == "json":
        body = {
            "a": seg.a,
            "profile": [
                {
                    "t": float(r[0]),
                    "K": float(r[1]),
                    "M": float(r[2]),
                    "N": float(r[3]),
                    "terms": [float(v) for v in r[4:]],
                }
                for r in rows
            ],
        }
        _emit(_json_report(spec, body), args.out)
    else:
        _emit(_csv_report(spec, ["t", "K", "M", "N", "I", "II", "III", "IV"], rows), args.out)
    return 0


def _cmd_stability(args) -> int:
    config = load_config(args.config)
    seg = _segment(args, config)
    spec = RunSpec(
        "stability",
        {
            "config": args.config,
            "i": args.i,
            "j": args.j,
            "samples": args.samples,
            "format": args.format,
            "expect": args.expect,
        },
    )
    min_k, argmin_t = stability.strong_stability_scan(seg, args.samples)
    holds, s, threshold = stability.sufficient_condition(seg)
    body = {
        "min_K": min_k,
        "argmin_t": argmin_t,
        "strongly_stable": bool(min_k > 0),
        "sufficient_condition": {"holds": holds, "s": s if np.isfinite(s) else None, "threshold": threshold},
    }
    if args.format == "json":
        _emit(_json_report(spec, body), args.out)
    else:
        rows = [[min_k, argmin_t, holds, s if np.isfinite(s) else "inf", threshold]]
        _emit(
            _csv_report(spec, ["min_K", "argmin_t", "sufficient_holds", "s", "threshold"], rows),
            args.out,
        )
    return _check_expect(args.expect, min_k > 0, f"min_K = {min_k:.6g}")


def _cmd_geodesics(args) -> int:
    config = load_config(args.config)
    strategy = geodesics.SeedStrategy(random=args.random, seed=args.seed)
    spec = RunSpec(
        "geodesics",
        {
            "config": args.config,
            "random": args.random,
            "seed": args.seed,
            "format": args.format,
        },
    )
    points = geodesics.find_critical_points(config, strategy)
    if args.format == "json":
        _emit(_json_report(spec, {"critical_points": [p.to_dict() for p in points]}), args.out)
    else:
        rows = [
            [*p.x, p.residual, p.length, p.in_hull, *p.hessian_signature]
            for p in points
        ]
        _emit(
            _csv_report(
                spec,
                ["x", "y", "z", "residual", "length", "in_hull", "sig_neg", "sig_zero", "sig_pos"],
                rows,
            ),
            args.out,
        )
    return 0


def _parse_rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise GHConvexError(f"not a rational number: {text!r}") from exc


def _cmd_counterexample(args) -> int:
    a = _parse_rational(args.a)
    eps = _parse_rational(args.eps)
    m = _parse_rational(args.m)
    value = stability.counterexample_closed_form(a, eps, m)
    spec = RunSpec(
        "counterexample",
        {"a": str(a), "eps": str(eps), "m": str(m), "format": args.format, "expect": args.expect},
    )
    exact = str(value)
    approx = float(value)
    if args.format == "json":
        body = {"value": exact, "value_float": approx, "certifies_instability": bool(approx > 0)}
        _emit(_json_report(spec, body), args.out)
    else:
        _emit(
            _csv_report(spec, ["a", "eps", "m", "value", "value_float"], [[str(a), str(eps), str(m), exact, _fmt(approx)]]),
            args.out,
        )
    return _check_expect(args.expect, approx > 0, f"closed form = {exact}")


def _vec3(text: str) -> list[float]:
    parts = [float(p) for p in text.replace(",", " ").split()]
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("expected three numbers")
    return parts


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="ghconvex",
        description="Convexity, stability and geodesic diagnostics for "
        "multi-centre Gibbons-Hawking geometries.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, seed=True):
        p.add_argument("--out", help="write the report here instead of stdout")
        p.add_argument("--format", choices=["json", "csv"], default="json")
        if seed:
            p.add_argument("--seed", type=int, default=0, help="RNG seed (default 0)")

    p = sub.add_parser("constants", help="threshold constants C and R_k")
    p.add_argument("--kmax", type=int, default=10)
    common(p)
    p.set_defaults(func=_cmd_constants)

    p = sub.add_parser("scan", help="k-convexity scan of a barrier surface")
    p.add_argument("--config", required=True, help="potential JSON file")
    p.add_argument("--surface", required=True, help='JSON text, @file, or family name (e.g. "sphere" with --r)')
    p.add_argument("--k", type=int, default=3, choices=[1, 2, 3])
    p.add_argument("--grid", type=int, default=128, help="grid is NxN over the chart box")
    p.add_argument("--random", type=int, default=10 ** 4)
    p.add_argument("--expect", choices=["positive", "negative"])
    p.add_argument("--r", type=float, help="sphere/cylinder/ellipsoid radius parameter")
    p.add_argument("--a", type=float, help="two-foci half distance")
    p.add_argument("--level", type=float, help="multi-foci level L")
    p.add_argument("--offset", type=float, help="plane offset")
    p.add_argument("--span", type=float, help="cylinder/plane chart half-width")
    p.add_argument("--centre", type=_vec3, help="sphere centre")
    p.add_argument("--point", type=_vec3, help="cylinder axis point")
    p.add_argument("--axis", type=_vec3, help="cylinder axis direction")
    p.add_argument("--normal", type=_vec3, help="plane normal")
    p.add_argument("--foci", help="JSON list of focus points")
    common(p)
    p.set_defaults(func=_cmd_scan)

    p = sub.add_parser("margins", help="margin curve across radii/offsets")
    p.add_argument("--config", required=True)
    p.add_argument("--family", required=True, choices=["sphere", "cylinder", "plane", "codim2"])
    p.add_argument("--pmin", type=float, required=True, help="first swept radius/offset")
    p.add_argument("--pmax", type=float, required=True, help="last swept radius/offset")
    p.add_argument("--steps", type=int, default=50)
    p.add_argument("--dirs", type=int, default=512, help="samples per swept value")
    p.add_argument("--direction", type=_vec3, help="plane direction (default e3)")
    common(p)
    p.set_defaults(func=_cmd_margins)

    p = sub.add_parser("curvature", help="Gaussian curvature profile over a segment")
    p.add_argument("--config", required=True)
    p.add_argument("--i", type=int, required=True, help="first endpoint centre index")
    p.add_argument("--j", type=int, required=True, help="second endpoint centre index")
    p.add_argument("--samples", type=int, default=200)
    common(p, seed=False)
    p.set_defaults(func=_cmd_curvature, seed=0)

    p = sub.add_parser("stability", help="strong-stability scan of a segment surface")
    p.add_argument("--config", required=True)
    p.add_argument("--i", type=int, required=True)
    p.add_argument("--j", type=int, required=True)
    p.add_argument("--samples", type=int, default=500)
    p.add_argument("--expect", choices=["positive", "negative"])
    common(p, seed=False)
    p.set_defaults(func=_cmd_stability, seed=0)

    p = sub.add_parser("geodesics", help="invariant closed geodesics (critical points)")
    p.add_argument("--config", required=True)
    p.add_argument("--random", type=int, default=1000, help="random hull seeds")
    common(p)
    p.set_defaults(func=_cmd_geodesics)

    p = sub.add_parser("counterexample", help="closed-form instability certificate")
    p.add_argument("--a", required=True, help="half distance (rational, e.g. 1 or 1/2)")
    p.add_argument("--eps", required=True, help="satellite offset (rational)")
    p.add_argument("--m", default="0", help="mass term (rational)")
    p.add_argument("--expect", choices=["positive", "negative"])
    common(p, seed=False)
    p.set_defaults(func=_cmd_counterexample, seed=0)

    return ap


def run(argv: Optional[list[str]] = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    print(f"seed: {getattr(args, 'seed', 0)}", file=sys.stderr)
    try:
        return args.func(args)
    except GHConvexError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
