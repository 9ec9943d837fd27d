"""C2 cubic B-spline segments interpolating value, slope and curvature at both ends.

On the unit knot vector {0,0,0,0,1/3,2/3,1,1,1,1} the six coefficients follow
directly from the six endpoint conditions. A general interval [t0, t1] is
mapped onto [0, 1]; derivatives scale by powers of its length, and the
coefficients carry over unchanged while the knots are rescaled.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bspline import KnotVector, SegmentSpline
from .curves import CurveSource


@dataclass(frozen=True, eq=False)
class HermiteEndData:
    """Endpoint data in the unit parameterization, one entry per axis.

    ``f01`` is delta * F'(t0) and ``f02`` is delta**2 * F''(t0) with
    delta = t1 - t0; likewise at the right end.
    """

    f00: np.ndarray
    f01: np.ndarray
    f02: np.ndarray
    f10: np.ndarray
    f11: np.ndarray
    f12: np.ndarray

    def __post_init__(self):
        for name in ("f00", "f01", "f02", "f10", "f11", "f12"):
            object.__setattr__(self, name, np.atleast_1d(np.asarray(getattr(self, name), dtype=float)))

    @classmethod
    def from_values(cls, *values) -> HermiteEndData:
        """Build from six scalars or six per-axis arrays, in f00..f12 order."""
        if len(values) == 1:
            values = tuple(values[0])
        if len(values) != 6:
            raise ValueError("expected six endpoint values")
        return cls(*values)

    def as_array(self) -> np.ndarray:
        """Shape (6, dim)."""
        return np.array([self.f00, self.f01, self.f02, self.f10, self.f11, self.f12])

    @property
    def dim(self) -> int:
        return self.f00.size


def unit_coefficients(data: HermiteEndData) -> np.ndarray:
    """B-spline coefficients on the unit knot vector, shape (dim, 6)."""
    return coefficients_from_values(*data.as_array())


# rows: coefficient index; columns: f01, f02, f11, f12
_SLOPE_WEIGHTS = np.array([
    [0.0, 0.0, 0.0, 0.0],
    [1.0 / 9.0, 0.0, 0.0, 0.0],
    [1.0 / 3.0, 1.0 / 27.0, 0.0, 0.0],
    [0.0, 0.0, -1.0 / 3.0, 1.0 / 27.0],
    [0.0, 0.0, -1.0 / 9.0, 0.0],
    [0.0, 0.0, 0.0, 0.0],
])
_RIGHT = np.array([False, False, False, True, True, True])[:, None]


def coefficient_pair(f00, f01, f02, f10, f11, f12) -> tuple[np.ndarray, np.ndarray]:
    """Coefficients and their offsets from the first one, each shape (dim, 6).

    The offsets add the chord f10 - f00 to the derivative terms instead of
    differencing rounded coefficients, which keeps the small terms that
    carry the derivatives when the values are large.
    """
    slopes = _SLOPE_WEIGHTS @ np.array([f01, f02, f11, f12], dtype=float).reshape(4, -1)
    f00 = np.asarray(f00, dtype=float)
    f10 = np.asarray(f10, dtype=float)
    coeffs = slopes + np.where(_RIGHT, f10, f00)
    offsets = slopes + np.where(_RIGHT, f10 - f00, 0.0)
    return coeffs.T, offsets.T


def coefficients_from_values(f00, f01, f02, f10, f11, f12) -> np.ndarray:
    """``unit_coefficients`` on bare per-axis arrays, shape (dim, 6)."""
    return coefficient_pair(f00, f01, f02, f10, f11, f12)[0]


def interior_second_derivatives(data: HermiteEndData) -> tuple[np.ndarray, np.ndarray]:
    """b''(1/3) and b''(2/3) of the unit segment built from ``data``."""
    f00, f01, f02, f10, f11, f12 = data.as_array()
    at_third = -9.0 * f00 - 6.0 * f01 - 5.0 / 6.0 * f02 + 9.0 * f10 - 3.0 * f11 + f12 / 3.0
    at_two_thirds = 9.0 * f00 + 3.0 * f01 + f02 / 3.0 - 9.0 * f10 + 6.0 * f11 - 5.0 / 6.0 * f12
    return at_third, at_two_thirds


def _check_interval(interval) -> tuple[float, float]:
    t0, t1 = (float(v) for v in interval)
    if not t1 > t0:
        raise ValueError(f"degenerate interval [{t0}, {t1}]")
    return t0, t1


def end_data_from_derivatives(left: np.ndarray, right: np.ndarray, delta: float) -> HermiteEndData:
    """Scale raw derivatives (rows k = 0, 1, 2) at both ends to the unit interval."""
    return HermiteEndData(
        left[0], delta * left[1], delta * delta * left[2],
        right[0], delta * right[1], delta * delta * right[2],
    )


def scale_to_unit(source: CurveSource, interval) -> HermiteEndData:
    """Endpoint data of ``source`` on ``interval`` in the unit parameterization."""
    t0, t1 = _check_interval(interval)
    ders = np.stack([source.derivative(np.array([t0, t1]), k) for k in range(3)])
    return end_data_from_derivatives(ders[:, 0], ders[:, 1], t1 - t0)


def segment_from_data(data: HermiteEndData, interval) -> SegmentSpline:
    t0, t1 = _check_interval(interval)
    coeffs, offsets = coefficient_pair(*data.as_array())
    return SegmentSpline(KnotVector.segment(t0, t1), coeffs, offsets=offsets)


def interp_segment(source: CurveSource, interval) -> SegmentSpline:
    """The cubic segment matching F, F', F'' of ``source`` at both interval ends."""
    return segment_from_data(scale_to_unit(source, interval), interval)


def endpoint_data_of(spline: SegmentSpline) -> HermiteEndData:
    """Read back unit-scaled endpoint derivatives from an existing segment."""
    t0, t1 = spline.domain
    ends = np.array([t0, t1])
    ders = np.stack([spline.evaluate(ends, k) for k in range(3)])
    return end_data_from_derivatives(ders[:, 0], ders[:, 1], t1 - t0)
