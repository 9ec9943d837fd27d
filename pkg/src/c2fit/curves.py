"""Source curves: analytic functions, polynomials, lines, Bezier segments, arcs.

Every source exposes ``derivative(t, k)`` for k = 0..3, vectorized over t, and
may report an exact per-axis sup|F''| on a subinterval through
``second_derivative_sup``. Sources without a closed form return None there and
the error controller falls back to sampling.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from collections.abc import Callable, Sequence
from functools import lru_cache

import numpy as np
from numpy.polynomial import polynomial as P

from .errors import DomainError

MAX_ORDER = 3
JET_POWER_DEGREE = 6


def _params(t):
    tt = np.atleast_1d(np.asarray(t, dtype=float))
    return tt, np.ndim(t) == 0


def _real_roots(coeffs: np.ndarray) -> np.ndarray:
    """Real roots of a polynomial in ascending coefficients (empty if constant)."""
    coeffs = np.trim_zeros(np.asarray(coeffs, dtype=float), "b")
    if coeffs.size <= 1:
        return np.empty(0)
    r = P.polyroots(coeffs)
    return np.sort(r.real[np.abs(r.imag) <= 1e-12 * np.maximum(1.0, np.abs(r.real))])


class CurveSource(ABC):
    """A parametric curve t -> F(t) in R^dim with derivatives to order 3."""

    domain: tuple[float, float]
    dim: int

    @abstractmethod
    def _derivative(self, t: np.ndarray, k: int) -> np.ndarray:
        """Return the k-th derivative at a 1-D array of parameters, shape (n, dim)."""

    def derivative(self, t, k: int = 0) -> np.ndarray:
        """k-th derivative; shape (dim,) for scalar t, (len(t), dim) for arrays."""
        if not 0 <= k <= MAX_ORDER:
            raise ValueError(f"derivative order {k} not in 0..{MAX_ORDER}")
        tt, scalar = _params(t)
        self._check(tt)
        out = self._derivative(tt, k)
        return out[0] if scalar else out

    __call__ = derivative

    def _jet(self, t: float) -> np.ndarray:
        """F, F' and F'' at one parameter inside the domain, shape (3, dim)."""
        tt = np.array([t])
        return np.stack([self._derivative(tt, k)[0] for k in range(3)])

    def evaluate(self, t: float, axis: int = 0, k: int = 0) -> float:
        """Scalar access: k-th derivative of one coordinate axis."""
        return float(self.derivative(t, k)[axis])

    def _check(self, tt: np.ndarray) -> None:
        a, b = self.domain
        slack = 1e-12 * max(1.0, abs(a) if np.isfinite(a) else 1.0, abs(b) if np.isfinite(b) else 1.0)
        if tt.size and (tt.min() < a - slack or tt.max() > b + slack or np.isnan(tt).any()):
            raise DomainError(f"parameter outside source domain [{a}, {b}]")

    def second_derivative_sup(self, a: float, b: float) -> np.ndarray | None:
        """Exact per-axis max of |F''| on [a, b], or None without a closed form."""
        return None

    def _second_derivative_profile(self, a: float, b: float):
        """(``second_derivative_sup``, |F''| at a and b with shape (2, dim))."""
        ends = np.abs(self._derivative(np.array([a, b]), 2))
        return self.second_derivative_sup(a, b), ends

    @property
    def is_straight(self) -> bool:
        """True when F'' vanishes identically."""
        return False

    @property
    def polynomial_degree(self) -> int | None:
        """Degree when every axis is a polynomial in t, else None."""
        return None


class Polynomial(CurveSource):
    """Polynomial curve, coefficients in ascending powers of t.

    Args:
        coeffs: 1-D sequence for a scalar function, or an array of shape
            (dim, degree + 1) with one row per axis.
        domain: Parameter interval.
    """

    def __init__(self, coeffs, domain=(-math.inf, math.inf)):
        c = np.array(coeffs, dtype=float)
        if c.ndim == 1:
            c = c[None, :]
        if c.ndim != 2 or c.shape[0] not in (1, 2, 3) or c.shape[1] == 0:
            raise ValueError(f"bad coefficient array of shape {c.shape}")
        self.coeffs = c
        self.dim = c.shape[0]
        self.domain = (float(domain[0]), float(domain[1]))
        self._ders = [c]
        for _ in range(MAX_ORDER):
            prev = self._ders[-1]
            if prev.shape[1] > 1:
                self._ders.append(P.polyder(prev, axis=1))
            else:
                self._ders.append(np.zeros_like(prev))
        self._straight = not np.any(self._ders[2])
        # |F''| can only peak at the interval ends or where the third derivative vanishes
        self._crit = [_real_roots(P.polyder(row)) for row in self._ders[2]]
        # jet rows: d^k/dt^k t^j = j!/(j-k)! t^(j-k)
        j = np.arange(c.shape[1])
        self._jet_scale = np.array([np.ones_like(j), j, j * (j - 1)], dtype=float)
        self._jet_power = np.maximum(j[None, :] - np.arange(3)[:, None], 0)
        self._second_power = np.arange(self._ders[2].shape[1])

    def _derivative(self, t, k):
        return P.polyval(t, self._ders[k].T).T.reshape(t.size, self.dim)

    def _jet(self, t):
        return (self._jet_scale * float(t) ** self._jet_power) @ self.coeffs.T

    def second_derivative_sup(self, a, b):
        return self._second_derivative_profile(a, b)[0]

    def _second_derivative_profile(self, a, b):
        ends = np.abs((np.array([[a], [b]]) ** self._second_power) @ self._ders[2].T)
        out = ends.max(axis=0)
        for i, crit in enumerate(self._crit):
            inside = crit[(crit > a) & (crit < b)]
            if inside.size:
                out[i] = max(out[i], float(np.max(np.abs(P.polyval(inside, self._ders[2][i])))))
        return out, ends

    @property
    def is_straight(self):
        return self._straight

    @property
    def polynomial_degree(self):
        nz = np.flatnonzero(np.any(self.coeffs != 0.0, axis=0))
        return int(nz[-1]) if nz.size else 0

    def __repr__(self):
        return f"Polynomial({self.coeffs.tolist()}, domain={self.domain})"


class FunctionSource(CurveSource):
    """Curve given by explicit callables for F, F', F'', F'''.

    Args:
        derivatives: Four callables mapping an array of t to values of shape
            (n,) for dim 1 or (n, dim).
        domain: Parameter interval.
        sup2: Optional callable (a, b) -> per-axis exact max |F''| on [a, b].
        name: Label used in reprs and documents.
    """

    def __init__(
        self,
        derivatives: Sequence[Callable],
        domain=(-math.inf, math.inf),
        sup2: Callable | None = None,
        name: str = "function",
    ):
        if len(derivatives) != MAX_ORDER + 1:
            raise ValueError("need callables for derivative orders 0..3")
        self._funcs = list(derivatives)
        self.domain = (float(domain[0]), float(domain[1]))
        self._sup2 = sup2
        self.name = name
        probe = np.asarray(self._funcs[0](np.array([self._probe_point()])), dtype=float)
        self.dim = 1 if probe.ndim == 1 else probe.shape[1]

    def _probe_point(self):
        a, b = self.domain
        if math.isfinite(a):
            return a
        return b if math.isfinite(b) else 0.0

    def _derivative(self, t, k):
        return np.asarray(self._funcs[k](t), dtype=float).reshape(t.size, self.dim)

    def second_derivative_sup(self, a, b):
        if self._sup2 is None:
            return None
        return np.atleast_1d(np.asarray(self._sup2(a, b), dtype=float))

    def __repr__(self):
        return f"FunctionSource({self.name!r}, domain={self.domain})"


def _trig_abs_sup(phase0: float, phase1: float, shift: float) -> float:
    """max |sin(theta + shift)| for theta between phase0 and phase1."""
    lo, hi = sorted((phase0, phase1))
    # |sin| peaks where theta + shift = pi/2 + k*pi
    k = math.ceil((lo + shift - math.pi / 2) / math.pi)
    if math.pi / 2 + k * math.pi - shift <= hi:
        return 1.0
    return max(abs(math.sin(lo + shift)), abs(math.sin(hi + shift)))


def sine(amplitude: float = 1.0, frequency: float = 1.0, phase: float = 0.0,
         domain=(-math.inf, math.inf)) -> FunctionSource:
    """amplitude * sin(frequency * t + phase) with exact sup|F''|."""
    A, w, c = float(amplitude), float(frequency), float(phase)

    def d(k):
        def f(t):
            return A * w**k * np.sin(w * t + c + k * math.pi / 2)
        return f

    def sup2(a, b):
        return abs(A) * w * w * _trig_abs_sup(w * a + c, w * b + c, 0.0)

    return FunctionSource([d(k) for k in range(4)], domain, sup2, f"sin:{A!r},{w!r},{c!r}")


def cosine(amplitude: float = 1.0, frequency: float = 1.0, phase: float = 0.0,
           domain=(-math.inf, math.inf)) -> FunctionSource:
    """amplitude * cos(frequency * t + phase)."""
    src = sine(amplitude, frequency, phase + math.pi / 2, domain)
    src.name = f"cos:{float(amplitude)!r},{float(frequency)!r},{float(phase)!r}"
    return src


def exponential(scale: float = 1.0, rate: float = 1.0,
                domain=(-math.inf, math.inf)) -> FunctionSource:
    """scale * exp(rate * t); |F''| is monotone so its sup sits at an endpoint."""
    s, r = float(scale), float(rate)

    def d(k):
        return lambda t: s * r**k * np.exp(r * t)

    def sup2(a, b):
        return abs(s) * r * r * max(math.exp(r * a), math.exp(r * b))

    return FunctionSource([d(k) for k in range(4)], domain, sup2, f"exp:{s!r},{r!r}")


class LineSegment(CurveSource):
    """Straight segment p0 + t (p1 - p0), t in [0, 1]."""

    def __init__(self, p0, p1):
        self.p0 = np.array(p0, dtype=float)
        self.p1 = np.array(p1, dtype=float)
        if self.p0.shape != self.p1.shape or self.p0.ndim != 1 or not 1 <= self.p0.size <= 3:
            raise ValueError("line endpoints must be points of equal dimension 1..3")
        self.dim = self.p0.size
        self.domain = (0.0, 1.0)

    def _derivative(self, t, k):
        if k == 0:
            return self.p0 + t[:, None] * (self.p1 - self.p0)
        if k == 1:
            return np.broadcast_to(self.p1 - self.p0, (t.size, self.dim)).copy()
        return np.zeros((t.size, self.dim))

    def second_derivative_sup(self, a, b):
        return np.zeros(self.dim)

    @property
    def is_straight(self):
        return True

    @property
    def polynomial_degree(self):
        return 1

    @property
    def length(self) -> float:
        return float(np.linalg.norm(self.p1 - self.p0))

    def __repr__(self):
        return f"LineSegment({self.p0.tolist()}, {self.p1.tolist()})"


@lru_cache(maxsize=32)
def _binomials(n: int) -> tuple[np.ndarray, np.ndarray]:
    i = np.arange(n + 1)
    return i, np.array([math.comb(n, j) for j in i], dtype=float)


def _bernstein(n: int, t: np.ndarray) -> np.ndarray:
    i, binom = _binomials(n)
    return binom * t[:, None] ** i * (1.0 - t[:, None]) ** (n - i)


class BezierSegment(CurveSource):
    """Bezier curve of arbitrary degree on t in [0, 1].

    Args:
        points: Control points, shape (degree + 1, dim).
    """

    def __init__(self, points):
        pts = np.array(points, dtype=float)
        if pts.ndim != 2 or pts.shape[0] < 2 or not 1 <= pts.shape[1] <= 3:
            raise ValueError("need at least two control points of dimension 1..3")
        self.points = pts
        self.dim = pts.shape[1]
        self.domain = (0.0, 1.0)
        # hodograph control points, scaled by n!/(n-k)!
        self._hodo = [pts]
        for _ in range(MAX_ORDER):
            prev = self._hodo[-1]
            m = prev.shape[0] - 1
            self._hodo.append(m * np.diff(prev, axis=0) if m > 0 else np.zeros((1, self.dim)))
        self._straight = not np.any(self._hodo[2])
        self._power = None
        self._as_poly = None

    @property
    def degree(self) -> int:
        return self.points.shape[0] - 1

    def _derivative(self, t, k):
        h = self._hodo[k]
        return _bernstein(h.shape[0] - 1, t) @ h

    def _polynomial(self) -> Polynomial:
        if self._as_poly is None:
            self._as_poly = Polynomial(self.power_coefficients(), self.domain)
        return self._as_poly

    def _jet(self, t):
        # the power basis is well conditioned on [0, 1] for low degrees
        if self.degree <= JET_POWER_DEGREE:
            return self._polynomial()._jet(t)
        return super()._jet(t)

    def power_coefficients(self) -> np.ndarray:
        """Ascending power-basis coefficients, shape (dim, degree + 1)."""
        if self._power is None:
            n = self.degree
            c = np.zeros((self.dim, n + 1))
            for j in range(n + 1):
                for i in range(j + 1):
                    c[:, j] += math.comb(n, j) * math.comb(j, i) * (-1) ** (j - i) * self.points[i]
            self._power = c
        return self._power

    def second_derivative_sup(self, a, b):
        return self._polynomial().second_derivative_sup(a, b)

    def _second_derivative_profile(self, a, b):
        return self._polynomial()._second_derivative_profile(a, b)

    @property
    def is_straight(self):
        return self._straight

    @property
    def polynomial_degree(self):
        return self.degree

    def __repr__(self):
        return f"BezierSegment({self.points.tolist()})"


def bezier_derivatives(seg: BezierSegment, t: float, k: int) -> np.ndarray:
    """Exact k-th derivative of a Bezier segment; zero for k above its degree."""
    if not 0.0 <= t <= 1.0:
        raise DomainError(f"Bezier parameter {t} outside [0, 1]")
    if k < 0:
        raise ValueError("negative derivative order")
    if k > MAX_ORDER:
        if k > seg.degree:
            return np.zeros(seg.dim)
        pts = seg.points
        for _ in range(k):
            pts = (pts.shape[0] - 1) * np.diff(pts, axis=0)
        return _bernstein(pts.shape[0] - 1, np.array([t]))[0] @ pts
    return seg.derivative(t, k)


class Arc(CurveSource):
    """Circular arc center + R (cos th, sin th), th = start + sweep * t, t in [0, 1].

    A positive sweep runs counter-clockwise.
    """

    def __init__(self, center, radius: float, start_angle: float, sweep: float):
        self.center = np.array(center, dtype=float)
        if self.center.shape != (2,):
            raise ValueError("arc center must be a 2-D point")
        if not radius > 0.0:
            raise ValueError("arc radius must be positive")
        if sweep == 0.0:
            raise ValueError("arc sweep must be non-zero")
        self.radius = float(radius)
        self.start_angle = float(start_angle)
        self.sweep = float(sweep)
        self.dim = 2
        self.domain = (0.0, 1.0)

    def _derivative(self, t, k):
        th = self.start_angle + self.sweep * t
        scale = self.radius * self.sweep**k
        shift = k * math.pi / 2
        out = scale * np.column_stack([np.cos(th + shift), np.sin(th + shift)])
        if k == 0:
            out += self.center
        return out

    def second_derivative_sup(self, a, b):
        th0 = self.start_angle + self.sweep * a
        th1 = self.start_angle + self.sweep * b
        s = self.radius * self.sweep**2
        return np.array([s * _trig_abs_sup(th0, th1, math.pi / 2), s * _trig_abs_sup(th0, th1, 0.0)])

    def __repr__(self):
        return f"Arc({self.center.tolist()}, {self.radius}, {self.start_angle}, {self.sweep})"


def circle(center, radius: float) -> Arc:
    return Arc(center, radius, 0.0, 2.0 * math.pi)


class GraphCurve(CurveSource):
    """Planar graph (t, f(t)) of a scalar source."""

    def __init__(self, func: CurveSource):
        if func.dim != 1:
            raise ValueError("graph curves need a scalar function")
        self.func = func
        self.dim = 2
        self.domain = func.domain

    def _derivative(self, t, k):
        x = t if k == 0 else np.full(t.size, 1.0 if k == 1 else 0.0)
        return np.column_stack([x, self.func._derivative(t, k)[:, 0]])

    def _jet(self, t):
        return np.column_stack([[t, 1.0, 0.0], self.func._jet(t)[:, 0]])

    def second_derivative_sup(self, a, b):
        inner = self.func.second_derivative_sup(a, b)
        return None if inner is None else np.array([0.0, inner[0]])

    def _second_derivative_profile(self, a, b):
        inner, ends = self.func._second_derivative_profile(a, b)
        sup = None if inner is None else np.array([0.0, inner[0]])
        return sup, np.column_stack([np.zeros(2), ends[:, 0]])

    @property
    def is_straight(self):
        return self.func.is_straight

    @property
    def polynomial_degree(self):
        inner = self.func.polynomial_degree
        return None if inner is None else max(1, inner)

    def __repr__(self):
        return f"GraphCurve({self.func!r})"


class Restricted(CurveSource):
    """The same curve on a sub-interval of its parameter domain."""

    def __init__(self, base: CurveSource, a: float, b: float):
        lo, hi = base.domain
        if not lo <= a < b <= hi:
            raise ValueError(f"[{a}, {b}] is not a sub-interval of {base.domain}")
        self.base = base
        self.domain = (float(a), float(b))
        self.dim = base.dim

    def _derivative(self, t, k):
        return self.base._derivative(t, k)

    def _jet(self, t):
        return self.base._jet(t)

    def second_derivative_sup(self, a, b):
        return self.base.second_derivative_sup(a, b)

    def _second_derivative_profile(self, a, b):
        return self.base._second_derivative_profile(a, b)

    @property
    def is_straight(self):
        return self.base.is_straight

    @property
    def polynomial_degree(self):
        return self.base.polynomial_degree

    def __repr__(self):
        return f"Restricted({self.base!r}, {self.domain[0]}, {self.domain[1]})"
