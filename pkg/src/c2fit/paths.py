"""Piecewise paths, junction classification and offsetting with corner compensation."""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from .curves import Arc, CurveSource, LineSegment, Restricted
from .errors import GeometryError
from .offset import OffsetCurve

CORNER_THRESHOLD = math.radians(1.0)
G0_TOL = 1e-9


@dataclass(frozen=True)
class Junction:
    """Joint between piece ``index`` and the next piece (cyclically for closed paths).

    ``angle`` is the turning angle between the unit tangents, signed
    (counter-clockwise positive) for planar paths.
    """

    index: int
    kind: str
    angle: float


def end_tangent(piece: CurveSource, at_end: bool) -> np.ndarray:
    """Unit tangent at the start or end of a piece, using higher derivatives at cusps."""
    t = piece.domain[1] if at_end else piece.domain[0]
    for k in (1, 2, 3):
        v = piece.derivative(t, k)
        n = np.linalg.norm(v)
        if n > 1e-12:
            # approaching an end through a cusp, an even-order derivative points backwards
            return -v / n if (k % 2 == 0 and at_end) else v / n
    raise GeometryError(f"piece {piece!r} has no tangent direction")


def turning_angle(ta: np.ndarray, tb: np.ndarray) -> float:
    if ta.size == 2:
        return math.atan2(ta[0] * tb[1] - ta[1] * tb[0], float(ta @ tb))
    return math.acos(float(np.clip(ta @ tb, -1.0, 1.0)))


class PiecewisePath:
    """Ordered pieces joined end to start.

    Args:
        pieces: Curve sources of equal dimension.
        closed: Whether the last piece connects back to the first.
        corner_threshold: Turning angle above which a junction is a corner.
        tol: G0 tolerance, scaled by max(1, coordinate magnitude).
        roles: Optional label per piece, e.g. "offset" or "corner".
    """

    def __init__(
        self,
        pieces: Sequence[CurveSource],
        closed: bool = False,
        corner_threshold: float = CORNER_THRESHOLD,
        tol: float = G0_TOL,
        roles: Sequence[str] | None = None,
    ):
        pieces = list(pieces)
        if not pieces:
            raise GeometryError("a path needs at least one piece")
        dims = {p.dim for p in pieces}
        if len(dims) != 1:
            raise GeometryError(f"pieces have mixed dimensions {sorted(dims)}")
        self.pieces = pieces
        self.closed = closed
        self.corner_threshold = corner_threshold
        self.tol = tol
        self.roles = tuple(roles) if roles is not None else ("piece",) * len(pieces)
        if len(self.roles) != len(pieces):
            raise ValueError("one role per piece expected")
        self.junctions = self._classify()

    @property
    def dim(self) -> int:
        return self.pieces[0].dim

    def __len__(self) -> int:
        return len(self.pieces)

    def __iter__(self):
        return iter(self.pieces)

    def __getitem__(self, i):
        return self.pieces[i]

    def _pairs(self):
        n = len(self.pieces)
        last = n if self.closed else n - 1
        for j in range(last):
            yield j, self.pieces[j], self.pieces[(j + 1) % n]

    def _classify(self) -> list[Junction]:
        out = []
        for j, a, b in self._pairs():
            pa = a.derivative(a.domain[1])
            pb = b.derivative(b.domain[0])
            scale = max(1.0, float(np.max(np.abs(pa))), float(np.max(np.abs(pb))))
            gap = float(np.linalg.norm(pa - pb))
            if gap > self.tol * scale:
                raise GeometryError(f"pieces do not meet at junction {j} (gap {gap:.3g})", junction=j)
            angle = turning_angle(end_tangent(a, True), end_tangent(b, False))
            kind = "corner" if abs(angle) > self.corner_threshold else "smooth"
            out.append(Junction(j, kind, angle))
        return out

    @property
    def corners(self) -> list[Junction]:
        return [j for j in self.junctions if j.kind == "corner"]


def offset_piece(piece: CurveSource, r: float) -> CurveSource:
    """Offset of one piece: exact for lines and arcs, analytic otherwise."""
    if isinstance(piece, LineSegment):
        d = piece.p1 - piece.p0
        length = np.linalg.norm(d)
        if length == 0.0:
            raise GeometryError("zero-length line cannot be offset")
        n = np.array([-d[1], d[0]]) / length
        return LineSegment(piece.p0 + r * n, piece.p1 + r * n)
    if isinstance(piece, Arc):
        # left normal points to the center on counter-clockwise arcs
        radius = piece.radius - r * math.copysign(1.0, piece.sweep)
        if radius <= 0.0:
            raise GeometryError(f"offset {r} collapses arc of radius {piece.radius}")
        return Arc(piece.center, radius, piece.start_angle, piece.sweep)
    return OffsetCurve(piece, r)


def _intersect_near_ends(a: CurveSource, a_dom, b: CurveSource, b_dom, junction: int):
    """Parameters (s, u) with a(s) = b(u), s near the end of a, u near the start of b."""
    s, u = a_dom[1], b_dom[0]
    pa, pb = a.derivative(s), b.derivative(u)
    da, db = a.derivative(s, 1), b.derivative(u, 1)
    # tangent-line intersection as the starting guess
    m = np.column_stack([da, -db])
    try:
        alpha, beta = np.linalg.solve(m, pb - pa)
        s, u = s + alpha, u + beta
    except np.linalg.LinAlgError:
        pass
    for _ in range(60):
        if not (a.domain[0] <= s <= a.domain[1] and b.domain[0] <= u <= b.domain[1]):
            raise GeometryError(f"pieces too short to trim at junction {junction}", junction)
        g = a.derivative(s) - b.derivative(u)
        if np.linalg.norm(g) <= 1e-14 * max(1.0, float(np.max(np.abs(a.derivative(s))))):
            break
        m = np.column_stack([a.derivative(s, 1), -b.derivative(u, 1)])
        try:
            ds, du = np.linalg.solve(m, -g)
        except np.linalg.LinAlgError as exc:
            raise GeometryError(f"cannot trim inside corner at junction {junction}", junction) from exc
        s, u = s + ds, u + du
    if not (a.domain[0] <= s <= a.domain[1] and b.domain[0] <= u <= b.domain[1]):
        raise GeometryError(f"pieces too short to trim at junction {junction}", junction)
    g = a.derivative(s) - b.derivative(u)
    if np.linalg.norm(g) > 1e-10 * max(1.0, float(np.max(np.abs(a.derivative(s))))):
        raise GeometryError(f"offset pieces do not intersect at junction {junction}", junction)
    if not (a_dom[0] < s <= a_dom[1] and b_dom[0] <= u < b_dom[1]):
        raise GeometryError(f"pieces too short to trim at junction {junction}", junction)
    return s, u


def _rebuild(piece: CurveSource, lo: float, hi: float) -> CurveSource:
    if (lo, hi) == tuple(piece.domain):
        return piece
    if isinstance(piece, LineSegment):
        pts = piece.derivative(np.array([lo, hi]))
        return LineSegment(pts[0], pts[1])
    return Restricted(piece, lo, hi)


def corner_compensation(path: PiecewisePath, r: float) -> PiecewisePath:
    """Offset a planar path by ``r`` and repair its junctions.

    On the outside of a turn the offset pieces are extended along their end
    tangents. Turns up to 90 degrees meet at the miter point, which for a
    right angle is the square corner at (|r|, |r|) from the path corner;
    sharper turns are extended by |r| and closed with a connecting segment, so
    the inserted geometry keeps at least |r| from the corner. On the inside of
    a turn both offsets are trimmed to their intersection.

    Returns:
        A G0 path whose pieces carry the roles "offset" or "corner".
    """
    if r == 0.0:
        raise ValueError("offset radius must be non-zero")
    if path.dim != 2:
        raise GeometryError("corner compensation needs a planar path")
    n = len(path)
    offs = [offset_piece(p, r) for p in path.pieces]
    doms = [list(o.domain) for o in offs]
    inserted: dict[int, list[CurveSource]] = {}

    for junc in path.junctions:
        j = junc.index
        k = (j + 1) % n
        if abs(junc.angle) >= math.pi - 1e-9:
            raise GeometryError(f"path reverses direction at junction {j}", junction=j)
        ea = offs[j].derivative(doms[j][1])
        sb = offs[k].derivative(doms[k][0])
        scale = max(1.0, float(np.max(np.abs(ea))))
        if np.linalg.norm(ea - sb) <= 1e-12 * scale:
            continue
        ta = end_tangent(path.pieces[j], True)
        tb = end_tangent(path.pieces[k], False)
        if r * junc.angle < 0.0:
            ar = abs(r)
            if abs(junc.angle) <= math.pi / 2:
                miter = ea + ar * math.tan(abs(junc.angle) / 2) * ta
                inserted[j] = [LineSegment(ea, miter), LineSegment(miter, sb)]
            else:
                ea2 = ea + ar * ta
                sb2 = sb - ar * tb
                inserted[j] = [LineSegment(ea, ea2), LineSegment(ea2, sb2), LineSegment(sb2, sb)]
        else:
            s, u = _intersect_near_ends(offs[j], doms[j], offs[k], doms[k], j)
            doms[j][1] = s
            doms[k][0] = u
            if not doms[k][0] < doms[k][1] or not doms[j][0] < doms[j][1]:
                raise GeometryError(f"pieces too short to trim at junction {j}", junction=j)

    pieces: list[CurveSource] = []
    roles: list[str] = []
    for i, off in enumerate(offs):
        pieces.append(_rebuild(off, *doms[i]))
        roles.append("offset")
        for extra in inserted.get(i, []):
            if np.linalg.norm(extra.p1 - extra.p0) > 1e-12 * max(1.0, float(np.max(np.abs(extra.p0)))):
                pieces.append(extra)
                roles.append("corner")
    return PiecewisePath(pieces, closed=path.closed, corner_threshold=path.corner_threshold,
                         tol=path.tol, roles=roles)
