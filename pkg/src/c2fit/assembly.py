"""Piecewise C2 splines over a partition, with continuity and tolerance checks."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .bspline import SegmentSpline
from .curves import CurveSource
from .error_control import (
    Partition,
    _EndCache,
    adaptive_segments,
    sampled_deviation,
    uniform_partition,
)
from .errors import DomainError
from .paths import PiecewisePath


@dataclass(frozen=True, eq=False)
class CompositeSpline:
    """One segment per partition interval, evaluated piecewise."""

    partition: Partition
    segments: tuple[SegmentSpline, ...]

    def __post_init__(self):
        segs = tuple(self.segments)
        object.__setattr__(self, "segments", segs)
        if len(segs) != len(self.partition):
            raise ValueError(f"{len(segs)} segments for {len(self.partition)} intervals")
        for (a, b), seg in zip(self.partition.intervals(), segs):
            if seg.domain != (a, b):
                raise ValueError(f"segment domain {seg.domain} does not match interval ({a}, {b})")
        if len({s.dim for s in segs}) != 1:
            raise ValueError("segments have mixed dimensions")

    @property
    def dim(self) -> int:
        return self.segments[0].dim

    @property
    def domain(self) -> tuple[float, float]:
        return self.partition.domain

    def __len__(self) -> int:
        return len(self.segments)

    def segment_index(self, t) -> np.ndarray:
        bp = np.asarray(self.partition.breakpoints)
        idx = np.searchsorted(bp, t, side="right") - 1
        return np.clip(idx, 0, len(self.segments) - 1)

    def evaluate(self, t, order: int = 0) -> np.ndarray:
        """Evaluate anywhere on the domain; each interval is closed on the right
        only for the last segment."""
        scalar = np.ndim(t) == 0
        tt = np.atleast_1d(np.asarray(t, dtype=float))
        a, b = self.domain
        if tt.size and (tt.min() < a or tt.max() > b or np.isnan(tt).any()):
            raise DomainError(f"parameter outside composite domain [{a}, {b}]")
        out = np.empty((tt.size, self.dim))
        idx = self.segment_index(tt)
        for i in np.unique(idx):
            mask = idx == i
            out[mask] = self.segments[i].evaluate(tt[mask], order)
        return out[0] if scalar else out

    __call__ = evaluate

    def with_segment(self, i: int, seg: SegmentSpline) -> CompositeSpline:
        segs = list(self.segments)
        segs[i] = seg
        return CompositeSpline(self.partition, tuple(segs))

    def merged(self) -> tuple[list[float], np.ndarray]:
        """Single knot vector and coefficient array describing the whole curve.

        Interior knots at the thirds have multiplicity 1 and breakpoints
        multiplicity 3; adjacent segments share their common end coefficient.
        """
        knots = list(self.segments[0].knots.knots[:4])
        coeffs = [self.segments[0].coeffs[:, 0]]
        for seg in self.segments:
            u = seg.knots.knots
            knots.extend(u[4:6])
            knots.extend([u[6]] * 3)
            coeffs.extend(seg.coeffs[:, 1:].T)
        knots.append(self.segments[-1].knots.knots[-1])
        return knots, np.array(coeffs).T


def assemble(source: CurveSource, partition: Partition) -> CompositeSpline:
    """Interpolating segments on every interval of ``partition``.

    Adjacent segments are built from the same endpoint derivatives, which makes
    the composite C2 at every breakpoint.
    """
    ends = _EndCache(source)
    segs = tuple(ends.segment(a, b) for a, b in partition.intervals())
    return CompositeSpline(partition, segs)


def fit(source: CurveSource, d: float, domain=None, strategy: str = "adaptive",
        **kwargs) -> CompositeSpline:
    """Partition ``domain`` for tolerance ``d`` and assemble the spline."""
    if strategy == "adaptive":
        part, segs = adaptive_segments(source, domain, d, **kwargs)
        return CompositeSpline(part, tuple(segs))
    if strategy == "uniform":
        part = uniform_partition(source, domain, d, **kwargs)
    else:
        raise ValueError(f"unknown strategy {strategy!r}")
    return assemble(source, part)


def fit_path(path: PiecewisePath, d: float, strategy: str = "adaptive",
             workers: int = 1, **kwargs) -> list[CompositeSpline]:
    """Fit every piece of a path separately; junctions keep the path's own continuity.

    Pieces are independent, so ``workers > 1`` fits them on a thread pool;
    results keep piece order.
    """
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(lambda p: fit(p, d, strategy=strategy, **kwargs), path.pieces))
    return [fit(piece, d, strategy=strategy, **kwargs) for piece in path.pieces]


@dataclass(frozen=True)
class ContinuityReport:
    """Relative jumps |left - right| / max(1, |left|, |right|) per breakpoint.

    ``jumps`` has one row per interior breakpoint and columns for orders 0, 1, 2.
    """

    breakpoints: tuple[float, ...]
    jumps: np.ndarray
    eps: float

    @property
    def passed(self) -> bool:
        return bool(np.all(self.jumps <= self.eps))

    @property
    def worst(self) -> float:
        return float(self.jumps.max()) if self.jumps.size else 0.0


def verify_c2(comp: CompositeSpline, eps: float = 1e-8) -> ContinuityReport:
    """Compare one-sided value, slope and second derivative at each interior breakpoint."""
    inner = comp.partition.breakpoints[1:-1]
    jumps = np.zeros((len(inner), 3))
    if inner:
        jets = np.array([seg.end_jets() for seg in comp.segments])
        lv, rv = jets[:-1, 1], jets[1:, 0]
        scale = np.maximum(1.0, np.maximum(np.linalg.norm(lv, axis=2), np.linalg.norm(rv, axis=2)))
        jumps = np.linalg.norm(lv - rv, axis=2) / scale
    return ContinuityReport(tuple(inner), jumps, eps)


@dataclass(frozen=True)
class ErrorReport:
    """Sampled deviation between a composite and its source."""

    d: float
    segment_max: np.ndarray
    segment_argmax: np.ndarray

    @property
    def max_deviation(self) -> float:
        return float(self.segment_max.max())

    @property
    def argmax(self) -> float:
        return float(self.segment_argmax[int(self.segment_max.argmax())])

    @property
    def worst_segment(self) -> int:
        return int(self.segment_max.argmax())

    @property
    def passed(self) -> bool:
        return self.max_deviation <= self.d


def verify_error(comp: CompositeSpline, source: CurveSource, d: float,
                 samples_per_segment: int = 64) -> ErrorReport:
    """Dense-sample every segment against the source at equal parameters."""
    if samples_per_segment < 16:
        raise ValueError("use at least 16 samples per segment")
    maxima = np.zeros(len(comp))
    where = np.zeros(len(comp))
    for i, seg in enumerate(comp.segments):
        maxima[i], where[i] = sampled_deviation(source, seg, samples_per_segment)
    return ErrorReport(float(d), maxima, where)
