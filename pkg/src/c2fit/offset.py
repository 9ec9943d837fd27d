"""Analytic offsets O(t) = C(t) + r n(t) of planar curves.

n is the unit normal obtained by rotating the unit tangent a quarter turn
counter-clockwise, so r > 0 offsets to the left of the direction of travel.
"""

from __future__ import annotations

import warnings

import numpy as np

from .curves import CurveSource
from .errors import OffsetWarning, RegularityError

EPS_REGULAR = 1e-12


def _rot90(v: np.ndarray) -> np.ndarray:
    return np.column_stack([-v[:, 1], v[:, 0]])


def _dot(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.einsum("ij,ij->i", a, b)


class OffsetCurve(CurveSource):
    """Offset of a regular planar curve at signed distance ``radius``.

    Derivatives of order k need base derivatives of order k + 1, so offsets
    provide orders 0..2.
    """

    max_order = 2

    def __init__(self, base: CurveSource, radius: float, eps_regular: float = EPS_REGULAR):
        if base.dim != 2:
            raise ValueError("offsets are defined for planar curves only")
        self.base = base
        self.radius = float(radius)
        self.eps_regular = eps_regular
        self.domain = base.domain
        self.dim = 2

    def _tangent_derivatives(self, t: np.ndarray, k: int) -> list[np.ndarray]:
        """Unit tangent T and its derivatives up to order k."""
        u = self.base._derivative(t, 1)
        s = np.linalg.norm(u, axis=1)
        if np.any(s <= self.eps_regular):
            bad = float(t[np.argmin(s)])
            raise RegularityError(f"base tangent vanishes at t={bad}")
        out = [u / s[:, None]]
        if k >= 1:
            u1 = self.base._derivative(t, 2)
            ds = _dot(u, u1) / s
            out.append(u1 / s[:, None] - u * (ds / s**2)[:, None])
        if k >= 2:
            u2 = self.base._derivative(t, 3)
            dds = (_dot(u1, u1) + _dot(u, u2)) / s - _dot(u, u1) ** 2 / s**3
            out.append(
                u2 / s[:, None]
                - 2.0 * u1 * (ds / s**2)[:, None]
                - u * (dds / s**2)[:, None]
                + 2.0 * u * (ds**2 / s**3)[:, None]
            )
        return out

    def _derivative(self, t, k):
        if k > self.max_order:
            raise ValueError("offset curves provide derivatives up to order 2")
        tangent = self._tangent_derivatives(t, k)[k]
        return self.base._derivative(t, k) + self.radius * _rot90(tangent)

    def curvature(self, t) -> np.ndarray:
        """Signed curvature of the base curve."""
        tt = np.atleast_1d(np.asarray(t, dtype=float))
        u = self.base._derivative(tt, 1)
        u1 = self.base._derivative(tt, 2)
        cross = u[:, 0] * u1[:, 1] - u[:, 1] * u1[:, 0]
        return cross / np.linalg.norm(u, axis=1) ** 3

    def folds(self, t) -> np.ndarray:
        """Mask of parameters where 1 - r*kappa <= 0 (local self-intersection)."""
        return 1.0 - self.radius * self.curvature(t) <= 0.0

    def second_derivative_sup(self, a, b):
        return np.zeros(2) if self.base.is_straight else None

    @property
    def is_straight(self):
        return self.base.is_straight

    def __repr__(self):
        return f"OffsetCurve({self.base!r}, {self.radius})"


def offset_eval(off: OffsetCurve, t: float, axis: int, k: int) -> float:
    """One coordinate of the k-th offset derivative at t.

    Emits an OffsetWarning where the offset folds over itself; the value is
    returned regardless.
    """
    if k > OffsetCurve.max_order:
        raise ValueError("offset derivatives are available up to order 2")
    value = off.evaluate(t, axis, k)
    if off.folds(t)[0]:
        warnings.warn(f"offset folds at t={t} (1 - r*kappa <= 0)", OffsetWarning, stacklevel=2)
    return value
