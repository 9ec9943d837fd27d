"""JSON path and spline documents, builtin functions and the error-report table.

Path document::

    {"format": "c2fit-path", "version": 1, "units": "mm", "closed": false,
     "tolerance": 1e-9,
     "pieces": [{"type": "line", "points": [[0, 0], [1, 0]]},
                {"type": "bezier", "points": [[1, 0], [2, 0], [2, 1], [3, 1]]},
                {"type": "arc", "center": [0, 0], "radius": 1,
                 "start_angle": 0, "sweep": 1.57},
                {"type": "polynomial", "coeffs": [0, 0, 1], "interval": [0, 1]},
                {"type": "function", "spec": "sin:1,2", "interval": [0, 3]}]}

Polynomial and function pieces are planar graphs (t, f(t)). Spline documents
store, per curve, the breakpoints and each segment's knots, per-axis
coefficients and coefficient offsets (coefficients minus the first one, kept
at full accuracy for derivative evaluation), plus a merged
single-knot-vector view.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from importlib import metadata

import jsonschema
import numpy as np

from .assembly import CompositeSpline, ErrorReport
from .bspline import KnotVector, SegmentSpline
from .curves import (
    Arc,
    BezierSegment,
    CurveSource,
    GraphCurve,
    LineSegment,
    Polynomial,
    cosine,
    exponential,
    sine,
)
from .error_control import Partition, combined_constant, error_bound, local_constants
from .errors import ParseError
from .paths import G0_TOL, PiecewisePath

PATH_FORMAT = "c2fit-path"
SPLINE_FORMAT = "c2fit-spline"
VERSION = 1

_point = {"type": "array", "items": {"type": "number"}, "minItems": 1, "maxItems": 3}
_interval = {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2}

PATH_SCHEMA = {
    "type": "object",
    "required": ["format", "version", "pieces"],
    "properties": {
        "format": {"const": PATH_FORMAT},
        "version": {"const": VERSION},
        "units": {"type": "string"},
        "closed": {"type": "boolean"},
        "tolerance": {"type": "number", "exclusiveMinimum": 0},
        "pieces": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "required": ["type"],
                "oneOf": [
                    {"properties": {"type": {"const": "line"},
                                    "points": {"type": "array", "items": _point,
                                               "minItems": 2, "maxItems": 2}},
                     "required": ["points"]},
                    {"properties": {"type": {"const": "bezier"},
                                    "points": {"type": "array", "items": _point, "minItems": 2}},
                     "required": ["points"]},
                    {"properties": {"type": {"const": "arc"},
                                    "center": {**_point, "minItems": 2, "maxItems": 2},
                                    "radius": {"type": "number", "exclusiveMinimum": 0},
                                    "start_angle": {"type": "number"},
                                    "sweep": {"type": "number"}},
                     "required": ["center", "radius", "start_angle", "sweep"]},
                    {"properties": {"type": {"const": "polynomial"},
                                    "coeffs": {"type": "array", "items": {"type": "number"},
                                               "minItems": 1},
                                    "interval": _interval},
                     "required": ["coeffs", "interval"]},
                    {"properties": {"type": {"const": "function"},
                                    "spec": {"type": "string"},
                                    "interval": _interval},
                     "required": ["spec", "interval"]},
                ],
            },
        },
    },
}

_segment = {
    "type": "object",
    "required": ["knots", "coeffs"],
    "properties": {
        "knots": {"type": "array", "items": {"type": "number"}, "minItems": 10, "maxItems": 10},
        "coeffs": {"type": "array", "minItems": 1, "maxItems": 3,
                   "items": {"type": "array", "items": {"type": "number"},
                             "minItems": 6, "maxItems": 6}},
        "offsets": {"type": "array", "minItems": 1, "maxItems": 3,
                    "items": {"type": "array", "items": {"type": "number"},
                              "minItems": 6, "maxItems": 6}},
    },
}

SPLINE_SCHEMA = {
    "type": "object",
    "required": ["format", "version", "curves", "provenance"],
    "properties": {
        "format": {"const": SPLINE_FORMAT},
        "version": {"const": VERSION},
        "provenance": {"type": "object"},
        "curves": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["dim", "breakpoints", "segments"],
                "properties": {
                    "dim": {"type": "integer", "minimum": 1, "maximum": 3},
                    "breakpoints": {"type": "array", "items": {"type": "number"}, "minItems": 2},
                    "segments": {"type": "array", "items": _segment, "minItems": 1},
                    "merged": {"type": "object"},
                },
            },
        },
    },
}


def _validate(doc, schema, what: str) -> None:
    try:
        jsonschema.validate(doc, schema)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ParseError(f"invalid {what} at {where}: {exc.message}") from None


def _load_json(text: str, what: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{what} is not valid JSON: {exc}") from None


def dumps(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True, allow_nan=False) + "\n"


def tool_version() -> str:
    try:
        return f"c2fit {metadata.version('c2fit')}"
    except metadata.PackageNotFoundError:
        return "c2fit"


# builtin functions -------------------------------------------------------

def parse_function(spec: str, interval=(-math.inf, math.inf)) -> CurveSource:
    """Scalar source from a whitelisted spec.

    ``poly:c0,c1,...`` (ascending powers), ``sin[:amp[,freq[,phase]]]``,
    ``cos[:amp[,freq[,phase]]]`` and ``exp[:scale[,rate]]``.
    """
    name, _, args = spec.strip().partition(":")
    try:
        values = [float(v) for v in args.split(",")] if args.strip() else []
    except ValueError:
        raise ParseError(f"bad numeric arguments in function spec {spec!r}") from None
    if not all(math.isfinite(v) for v in values):
        raise ParseError(f"non-finite argument in function spec {spec!r}")
    if name == "poly":
        if not values:
            raise ParseError("poly needs at least one coefficient")
        return Polynomial(values, interval)
    makers = {"sin": (sine, 3), "cos": (cosine, 3), "exp": (exponential, 2)}
    if name not in makers:
        raise ParseError(f"unknown builtin function {name!r}; use poly, sin, cos or exp")
    maker, nmax = makers[name]
    if len(values) > nmax:
        raise ParseError(f"{name} takes at most {nmax} arguments")
    return maker(*values, domain=interval)


def parse_interval(text: str) -> tuple[float, float]:
    try:
        a, b = (float(v) for v in text.split(":"))
    except ValueError:
        raise ParseError(f"interval must look like a:b, got {text!r}") from None
    if not (math.isfinite(a) and math.isfinite(b) and b > a):
        raise ParseError(f"interval {text!r} must satisfy a < b")
    return a, b


# path documents ----------------------------------------------------------

@dataclass
class PathDocument:
    pieces: list[dict]
    closed: bool = False
    units: str = "mm"
    tolerance: float = G0_TOL

    @classmethod
    def from_dict(cls, doc) -> PathDocument:
        _validate(doc, PATH_SCHEMA, "path document")
        return cls(doc["pieces"], doc.get("closed", False), doc.get("units", "mm"),
                   doc.get("tolerance", G0_TOL))

    @classmethod
    def loads(cls, text: str) -> PathDocument:
        return cls.from_dict(_load_json(text, "path document"))

    @classmethod
    def read(cls, path) -> PathDocument:
        with open(path, encoding="utf-8") as fh:
            return cls.loads(fh.read())

    def to_dict(self) -> dict:
        return {"format": PATH_FORMAT, "version": VERSION, "units": self.units,
                "closed": self.closed, "tolerance": self.tolerance, "pieces": self.pieces}

    def dumps(self) -> str:
        return dumps(self.to_dict())

    def build(self) -> PiecewisePath:
        """Curve sources for every piece, checked for G0 joins."""
        sources = []
        for i, piece in enumerate(self.pieces):
            try:
                sources.append(_build_piece(piece))
            except ValueError as exc:
                raise ParseError(f"piece {i}: {exc}") from None
        return PiecewisePath(sources, closed=self.closed, tol=self.tolerance)


def _build_piece(piece: dict) -> CurveSource:
    kind = piece["type"]
    if kind == "line":
        return LineSegment(*piece["points"])
    if kind == "bezier":
        return BezierSegment(piece["points"])
    if kind == "arc":
        return Arc(piece["center"], piece["radius"], piece["start_angle"], piece["sweep"])
    a, b = (float(v) for v in piece["interval"])
    if not b > a:
        raise ValueError(f"interval [{a}, {b}] is empty")
    if kind == "polynomial":
        return GraphCurve(Polynomial(piece["coeffs"], (a, b)))
    return GraphCurve(parse_function(piece["spec"], (a, b)))


def polyline_document(points, closed: bool = False) -> PathDocument:
    pts = [list(map(float, p)) for p in points]
    pieces = [{"type": "line", "points": [p, q]} for p, q in zip(pts, pts[1:])]
    if closed:
        pieces.append({"type": "line", "points": [pts[-1], pts[0]]})
    return PathDocument(pieces, closed)


# spline documents --------------------------------------------------------

def _curve_to_dict(comp: CompositeSpline) -> dict:
    knots, coeffs = comp.merged()
    return {
        "dim": comp.dim,
        "breakpoints": list(comp.partition.breakpoints),
        "segments": [{"knots": list(s.knots.knots), "coeffs": s.coeffs.tolist(),
                      "offsets": s.offsets.tolist()}
                     for s in comp.segments],
        "merged": {"knots": [float(u) for u in knots], "coeffs": coeffs.tolist()},
    }


def _curve_from_dict(doc: dict, index: int) -> CompositeSpline:
    try:
        segs = tuple(SegmentSpline(KnotVector(s["knots"]), s["coeffs"], offsets=s.get("offsets"))
                     for s in doc["segments"])
        comp = CompositeSpline(Partition(tuple(doc["breakpoints"])), segs)
    except ValueError as exc:
        raise ParseError(f"curve {index}: {exc}") from None
    if comp.dim != doc["dim"]:
        raise ParseError(f"curve {index}: declared dim {doc['dim']} but coefficients have {comp.dim}")
    return comp


@dataclass
class SplineDocument:
    """Fitted curves plus how they were made.

    ``provenance`` holds the tolerance, offset radius, strategy, tool version
    and a description of the source.
    """

    curves: list[CompositeSpline]
    provenance: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"format": SPLINE_FORMAT, "version": VERSION,
                "provenance": self.provenance,
                "curves": [_curve_to_dict(c) for c in self.curves]}

    def dumps(self) -> str:
        return dumps(self.to_dict())

    def write(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.dumps())

    @classmethod
    def from_dict(cls, doc) -> SplineDocument:
        _validate(doc, SPLINE_SCHEMA, "spline document")
        return cls([_curve_from_dict(c, i) for i, c in enumerate(doc["curves"])],
                   doc["provenance"])

    @classmethod
    def loads(cls, text: str) -> SplineDocument:
        return cls.from_dict(_load_json(text, "spline document"))

    @classmethod
    def read(cls, path) -> SplineDocument:
        with open(path, encoding="utf-8") as fh:
            return cls.loads(fh.read())


# error report ------------------------------------------------------------

REPORT_COLUMNS = ("curve", "index", "t_start", "t_end", "M_i", "bound", "measured", "pass")


@dataclass(frozen=True)
class ReportRow:
    curve: int
    index: int
    t_start: float
    t_end: float
    M_i: float
    bound: float
    measured: float
    passed: bool


def report_rows(curve: int, comp: CompositeSpline, source: CurveSource,
                err: ErrorReport) -> list[ReportRow]:
    """One row per segment: the Euclidean error constant, its bound and the measured error."""
    rows = []
    for i, (a, b) in enumerate(comp.partition.intervals()):
        m = combined_constant(local_constants(source, (a, b)))
        rows.append(ReportRow(curve, i, a, b, m, error_bound(m, b - a),
                              float(err.segment_max[i]), bool(err.segment_max[i] <= err.d)))
    return rows


def format_report(rows: list[ReportRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(REPORT_COLUMNS)
    for r in rows:
        writer.writerow([r.curve, r.index, repr(r.t_start), repr(r.t_end), repr(r.M_i),
                         repr(r.bound), repr(r.measured), "yes" if r.passed else "no"])
    return buf.getvalue()


def parse_report(text: str) -> list[ReportRow]:
    reader = csv.DictReader(io.StringIO(text))
    return [ReportRow(int(r["curve"]), int(r["index"]), float(r["t_start"]), float(r["t_end"]),
                      float(r["M_i"]), float(r["bound"]), float(r["measured"]), r["pass"] == "yes")
            for r in reader]


def sample_curve(comp: CompositeSpline, per_segment: int = 24) -> np.ndarray:
    """Dense polyline through the composite, shape (n, dim)."""
    ts = [np.linspace(a, b, per_segment, endpoint=False) for a, b in comp.partition.intervals()]
    t = np.concatenate(ts + [np.array([comp.domain[1]])])
    return comp.evaluate(t)
