"""Command line interface: ``c2fit interp | offset-fit | report | render``.

Exit codes: 0 success, 2 parse error, 3 tolerance unachievable,
4 geometry error, 5 verification failed.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from .assembly import CompositeSpline, fit, fit_path, verify_c2, verify_error
from .curves import CurveSource
from .documents import (
    PathDocument,
    SplineDocument,
    format_report,
    parse_function,
    parse_interval,
    report_rows,
    sample_curve,
    tool_version,
)
from .errors import GeometryError, ParseError, ToleranceError
from .paths import corner_compensation
from .svg import render_svg

log = logging.getLogger("c2fit")

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_TOLERANCE = 3
EXIT_GEOMETRY = 4
EXIT_VERIFY = 5

C2_EPS = 1e-8


def _source_polyline(src: CurveSource, n: int = 400) -> np.ndarray:
    a, b = src.domain
    t = np.linspace(a, b, n)
    pts = src.derivative(t)
    return np.column_stack([t, pts[:, 0]]) if src.dim == 1 else pts


def _fitted_polyline(comp: CompositeSpline) -> np.ndarray:
    pts = sample_curve(comp)
    if comp.dim == 1:
        a, b = comp.domain
        t = np.concatenate([np.linspace(s, e, 24, endpoint=False)
                            for s, e in comp.partition.intervals()] + [np.array([b])])
        return np.column_stack([t, pts[:, 0]])
    return pts


def _sources_from_provenance(prov: dict, path_override: PathDocument | None) -> list[CurveSource]:
    """Rebuild the exact sources a spline document was fitted to."""
    src = prov.get("source", {})
    if path_override is None and src.get("kind") == "function":
        a, b = src["interval"]
        return [parse_function(src["spec"], (a, b))]
    if path_override is None:
        if src.get("kind") != "path":
            raise ParseError("spline document has no source; pass --source")
        path_override = PathDocument.from_dict(src["document"])
    path = path_override.build()
    radius = prov.get("radius")
    if radius:
        path = corner_compensation(path, radius)
    return list(path.pieces)


def _verify(curves, sources, d, samples):
    rows, passed, worst_c2 = [], True, 0.0
    for i, (comp, src) in enumerate(zip(curves, sources)):
        err = verify_error(comp, src, d, samples)
        c2 = verify_c2(comp, C2_EPS)
        rows.extend(report_rows(i, comp, src, err))
        passed &= err.passed and c2.passed
        worst_c2 = max(worst_c2, c2.worst)
    return rows, passed, worst_c2


def _emit(args, curves, sources, prov, layers) -> int:
    doc = SplineDocument(curves, prov)
    if args.out:
        doc.write(args.out)
    rows, passed, worst_c2 = _verify(curves, sources, prov["tolerance"], args.samples)
    table = format_report(rows)
    if args.report:
        Path(args.report).write_text(table, encoding="utf-8")
    else:
        sys.stdout.write(table)
    if args.svg:
        layers = layers + [("fitted", [_fitted_polyline(c) for c in curves])]
        Path(args.svg).write_text(render_svg(layers), encoding="utf-8")
    worst = max(r.measured for r in rows)
    log.info("%d curve(s), %d segment(s), max deviation %.3g (tolerance %.3g), max C2 jump %.3g",
             len(curves), len(rows), worst, prov["tolerance"], worst_c2)
    if not passed:
        log.error("verification failed")
        return EXIT_VERIFY
    return EXIT_OK


def cmd_interp(args) -> int:
    prov = {"tool": tool_version(), "tolerance": args.tolerance, "radius": None,
            "strategy": args.strategy, "exact_cubic": args.exact_cubic}
    if args.function:
        if not args.interval:
            raise ParseError("--function needs --interval a:b")
        a, b = parse_interval(args.interval)
        src = parse_function(args.function, (a, b))
        sources = [src]
        curves = [fit(src, args.tolerance, strategy=args.strategy, exact_cubic=args.exact_cubic)]
        prov["source"] = {"kind": "function", "spec": args.function, "interval": [a, b]}
    elif args.input:
        pdoc = PathDocument.read(args.input)
        path = pdoc.build()
        sources = list(path.pieces)
        curves = fit_path(path, args.tolerance, args.strategy, workers=args.jobs,
                          exact_cubic=args.exact_cubic)
        prov["source"] = {"kind": "path", "document": pdoc.to_dict()}
    else:
        raise ParseError("give a path document or --function")
    layers = [("source", [_source_polyline(s) for s in sources])]
    return _emit(args, curves, sources, prov, layers)


def cmd_offset_fit(args) -> int:
    if args.radius == 0.0:
        raise GeometryError("--radius must be non-zero")
    pdoc = PathDocument.read(args.input)
    path = pdoc.build()
    comp_path = corner_compensation(path, args.radius)
    curves = fit_path(comp_path, args.tolerance, args.strategy, workers=args.jobs,
                      exact_cubic=args.exact_cubic)
    prov = {"tool": tool_version(), "tolerance": args.tolerance, "radius": args.radius,
            "strategy": args.strategy, "exact_cubic": args.exact_cubic, "source": {"kind": "path", "document": pdoc.to_dict()}}
    layers = [("source", [_source_polyline(s) for s in path.pieces])]
    return _emit(args, curves, list(comp_path.pieces), prov, layers)


def cmd_report(args) -> int:
    doc = SplineDocument.read(args.spline)
    override = PathDocument.read(args.source) if args.source else None
    sources = _sources_from_provenance(doc.provenance, override)
    if len(sources) != len(doc.curves):
        raise ParseError(f"{len(doc.curves)} curves but {len(sources)} source pieces")
    for i, (comp, src) in enumerate(zip(doc.curves, sources)):
        if comp.dim != src.dim:
            raise ParseError(f"curve {i}: dim {comp.dim} does not match source dim {src.dim}")
        lo, hi = src.domain
        if comp.domain[0] < lo or comp.domain[1] > hi:
            raise ParseError(f"curve {i}: domain {comp.domain} outside source domain {src.domain}")
    d = args.tolerance if args.tolerance is not None else doc.provenance.get("tolerance")
    if d is None:
        raise ParseError("no tolerance in provenance; pass --tolerance")
    rows, passed, worst_c2 = _verify(doc.curves, sources, d, args.samples)
    sys.stdout.write(format_report(rows))
    log.info("max deviation %.3g (tolerance %.3g), max C2 jump %.3g: %s",
             max(r.measured for r in rows), d, worst_c2, "pass" if passed else "FAIL")
    return EXIT_OK if passed else EXIT_VERIFY


def cmd_render(args) -> int:
    doc = SplineDocument.read(args.spline)
    layers = []
    if args.source:
        path = PathDocument.read(args.source).build()
        layers.append(("source", [_source_polyline(s) for s in path.pieces]))
    layers.append(("fitted", [_fitted_polyline(c) for c in doc.curves]))
    Path(args.svg).write_text(render_svg(layers), encoding="utf-8")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="c2fit", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def fitting_flags(p):
        p.add_argument("--tolerance", type=float, required=True, help="max deviation d")
        p.add_argument("--strategy", choices=("adaptive", "uniform"), default="adaptive")
        p.add_argument("--samples", type=int, default=64, help="verification samples per segment")
        p.add_argument("--out", help="spline document to write")
        p.add_argument("--svg", help="SVG overlay to write")
        p.add_argument("--report", help="write the error table here instead of stdout")
        p.add_argument("--jobs", type=int, default=1, help="fit path pieces in parallel")
        p.add_argument("--exact-cubic", action="store_true",
                       help="one segment for polynomial pieces of degree <= 3")

    p = sub.add_parser("interp", help="fit a path document or builtin function")
    p.add_argument("input", nargs="?", help="path document (JSON)")
    p.add_argument("--function", help="builtin: poly:c0,c1,..|sin:a,w,p|cos:a,w,p|exp:s,r")
    p.add_argument("--interval", help="a:b for --function (use --interval=-2:3 for negatives)")
    fitting_flags(p)
    p.set_defaults(func=cmd_interp)

    p = sub.add_parser("offset-fit", help="offset a planar path and fit the toolpath")
    p.add_argument("input", help="path document (JSON)")
    p.add_argument("--radius", type=float, required=True, help="signed offset, > 0 is left")
    fitting_flags(p)
    p.set_defaults(func=cmd_offset_fit)

    p = sub.add_parser("report", help="re-verify a spline document")
    p.add_argument("spline")
    p.add_argument("--source", help="path document the spline was fitted to")
    p.add_argument("--samples", type=int, default=64)
    p.add_argument("--tolerance", type=float, help="override the recorded tolerance")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("render", help="draw a spline document as SVG")
    p.add_argument("spline")
    p.add_argument("--source")
    p.add_argument("--svg", required=True)
    p.set_defaults(func=cmd_render)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="c2fit: %(message)s")
    if getattr(args, "tolerance", None) is not None and not args.tolerance > 0:
        parser.error("--tolerance must be positive")
    if getattr(args, "samples", 64) < 16:
        parser.error("--samples must be at least 16")
    try:
        return args.func(args)
    except (ParseError, OSError) as exc:
        log.error("%s", exc)
        return EXIT_PARSE
    except ToleranceError as exc:
        log.error("tolerance unachievable: %s", exc)
        return EXIT_TOLERANCE
    except GeometryError as exc:
        where = f" (junction {exc.junction})" if exc.junction is not None else ""
        log.error("geometry error%s: %s", where, exc)
        return EXIT_GEOMETRY


if __name__ == "__main__":
    sys.exit(main())
