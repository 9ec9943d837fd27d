"""B-spline basis functions and curve evaluation over clamped knot vectors.

Basis functions follow the Cox-de Boor recursion with the 0/0 := 0 convention.
Spans are half-open except the last non-empty span, which is closed so that a
clamped spline evaluates to its last coefficient at the right end.

Derivatives are obtained by differencing coefficients into a spline of one
degree lower over the knot vector with its first and last knot removed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cache, cached_property

import numpy as np

from .errors import DomainError

DEGREE = 3


@dataclass(frozen=True)
class KnotVector:
    """Nondecreasing sequence of parameter values."""

    knots: tuple[float, ...]

    def __post_init__(self):
        knots = tuple(float(u) for u in self.knots)
        if len(knots) < 2:
            raise ValueError("a knot vector needs at least two knots")
        if any(b < a for a, b in zip(knots, knots[1:])):
            raise ValueError(f"knots must be nondecreasing: {knots}")
        object.__setattr__(self, "knots", knots)

    @classmethod
    def segment(cls, a: float, b: float) -> KnotVector:
        """Clamped cubic knot vector on [a, b] with interior knots at the thirds."""
        if not b > a:
            raise ValueError(f"degenerate interval [{a}, {b}]")
        h = (b - a) / 3.0
        return cls((a, a, a, a, a + h, a + 2.0 * h, b, b, b, b))

    def __len__(self) -> int:
        return len(self.knots)

    def __getitem__(self, i):
        return self.knots[i]

    @property
    def first(self) -> float:
        return self.knots[0]

    @property
    def last(self) -> float:
        return self.knots[-1]

    def n_basis(self, degree: int) -> int:
        return len(self.knots) - degree - 1

    def reduced(self) -> KnotVector:
        """Knot vector with the first and last knot dropped."""
        return KnotVector(self.knots[1:-1])

    def is_segment_form(self, rtol: float = 1e-12) -> bool:
        """True for the 10-knot clamped form with knots at the interval thirds."""
        u = self.knots
        if len(u) != 10 or not u[9] > u[0]:
            return False
        a, b = u[0], u[9]
        want = KnotVector.segment(a, b).knots
        tol = rtol * max(1.0, abs(a), abs(b))
        return all(abs(x - y) <= tol for x, y in zip(u, want))


UNIT_KNOTS = KnotVector.segment(0.0, 1.0)


def _check_domain(knots: KnotVector, t: np.ndarray) -> None:
    if t.size and (t.min() < knots.first or t.max() > knots.last or np.isnan(t).any()):
        raise DomainError(
            f"parameter outside knot span [{knots.first}, {knots.last}]"
        )


def basis_matrix(knots: KnotVector, degree: int, t) -> np.ndarray:
    """Evaluate all basis functions of one degree at many parameters.

    Args:
        knots: Knot vector.
        degree: Polynomial degree (>= 0).
        t: Scalar or 1-D array of parameters inside [knots.first, knots.last].

    Returns:
        Array of shape (len(t), n_basis).
    """
    u = np.asarray(knots.knots)
    t = np.atleast_1d(np.asarray(t, dtype=float))
    _check_domain(knots, t)
    m = len(u) - 1
    if degree < 0 or m - degree < 1:
        raise ValueError(f"degree {degree} not supported by {len(u)} knots")

    n = np.zeros((t.size, m))
    for i in range(m):
        if u[i] < u[i + 1]:
            n[:, i] = (u[i] <= t) & (t < u[i + 1])
    nonempty = np.flatnonzero(u[:-1] < u[1:])
    n[t == u[-1], nonempty[-1]] = 1.0

    for p in range(1, degree + 1):
        nxt = np.zeros((t.size, m - p))
        for i in range(m - p):
            d1 = u[i + p] - u[i]
            d2 = u[i + p + 1] - u[i + 1]
            if d1 > 0.0:
                nxt[:, i] += (t - u[i]) / d1 * n[:, i]
            if d2 > 0.0:
                nxt[:, i] += (u[i + p + 1] - t) / d2 * n[:, i + 1]
        n = nxt
    return n


def basis_eval(knots: KnotVector, index: int, degree: int, t: float) -> float:
    """Value of the basis function N_{index,degree} at t."""
    count = knots.n_basis(degree)
    if not 0 <= index < count:
        raise IndexError(f"basis index {index} out of range 0..{count - 1}")
    return float(basis_matrix(knots, degree, t)[0, index])


def derivative_coefficients(knots: KnotVector, coeffs: np.ndarray, degree: int):
    """Coefficients of the derivative spline.

    Returns:
        (reduced knot vector, coefficients of shape (dim, n - 1)).
    """
    u = knots.knots
    c = np.asarray(coeffs, dtype=float)
    n = c.shape[-1]
    out = np.zeros(c.shape[:-1] + (n - 1,))
    for i in range(n - 1):
        span = u[i + degree + 1] - u[i + 1]
        if span > 0.0:
            out[..., i] = degree * (c[..., i + 1] - c[..., i]) / span
    return knots.reduced(), out


@dataclass(frozen=True, eq=False)
class SegmentSpline:
    """A spline curve b(t) = sum_i coeffs[:, i] N_{i,degree}(t).

    The curve is evaluated as coeffs[:, 0] + sum_i offsets[:, i] N_i(t), which
    equals the sum above by partition of unity. Offsets computed directly from
    the interpolation data keep derivatives accurate far from the origin,
    where the absolute coefficients lose the small differences that make up
    the second derivative.

    Attributes:
        knots: Knot vector, normally the 10-knot segment form.
        coeffs: Array of shape (dim, n_basis), one row per coordinate axis.
        degree: Polynomial degree.
        offsets: coeffs - coeffs[:, :1], optionally supplied at higher
            accuracy than the subtraction would give.
    """

    knots: KnotVector
    coeffs: np.ndarray
    degree: int = field(default=DEGREE)
    offsets: np.ndarray | None = None

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=float)
        if c.ndim == 1:
            c = c[None, :]
        if c.ndim != 2 or c.shape[0] not in (1, 2, 3):
            raise ValueError(f"coeffs must have shape (dim, n) with dim 1..3, got {c.shape}")
        if c.shape[1] != self.knots.n_basis(self.degree):
            raise ValueError(
                f"{c.shape[1]} coefficients per axis, knot vector needs "
                f"{self.knots.n_basis(self.degree)}"
            )
        if self.offsets is None:
            off = c - c[:, :1]
        else:
            off = np.array(self.offsets, dtype=float).reshape(c.shape)
            scale = max(1.0, float(np.max(np.abs(c))))
            if np.any(off[:, 0] != 0.0) or np.max(np.abs(c[:, :1] + off - c)) > 1e-12 * scale:
                raise ValueError("offsets do not match the coefficients")
        c.setflags(write=False)
        off.setflags(write=False)
        object.__setattr__(self, "coeffs", c)
        object.__setattr__(self, "offsets", off)

    @classmethod
    def trusted(cls, knots: KnotVector, coeffs: np.ndarray, offsets: np.ndarray) -> SegmentSpline:
        """Cubic segment from arrays already known to be consistent, without checks.

        The arrays are frozen in place, so callers must not keep writing to them.
        """
        seg = object.__new__(cls)
        coeffs.setflags(write=False)
        offsets.setflags(write=False)
        for name, value in (("knots", knots), ("coeffs", coeffs), ("degree", DEGREE),
                            ("offsets", offsets)):
            object.__setattr__(seg, name, value)
        return seg

    @property
    def dim(self) -> int:
        return self.coeffs.shape[0]

    @property
    def domain(self) -> tuple[float, float]:
        return self.knots.first, self.knots.last

    @cached_property
    def _derivatives(self):
        out = [(self.knots, self.offsets, self.degree)]
        for _ in range(2):
            knots, coeffs, degree = out[-1]
            if degree == 0:
                break
            reduced, dc = derivative_coefficients(knots, coeffs, degree)
            out.append((reduced, dc, degree - 1))
        return out

    @cached_property
    def _segment_form(self) -> bool:
        a, b = self.domain
        return self.degree == DEGREE and b > a and self.knots == KnotVector.segment(a, b)

    def _evaluate_segment_form(self, t: np.ndarray, order: int) -> np.ndarray:
        a, b = self.domain
        length = b - a
        u = np.clip(3.0 * (t - a) / length, 0.0, 3.0)
        span = np.minimum(u.astype(int), 2)
        powers = (u - span)[:, None] ** np.arange(4)
        table = _unit_segment_tables()[order][span]
        basis = np.einsum("np,npj->nj", powers, table)
        out = basis @ self.offsets.T
        if order == 0:
            return out + self.coeffs[:, 0]
        return out / length**order

    def end_jets(self) -> np.ndarray:
        """Value, first and second derivative at both ends, shape (2, 3, dim)."""
        if not self._segment_form:
            ends = np.array(self.domain)
            return np.stack([self.evaluate(ends, k) for k in range(3)], axis=1)
        table = _unit_segment_tables()
        # w = 0 on the first span and w = 1 on the last one
        rows = np.stack([table[:, 0, 0, :], table[:, 2, :, :].sum(axis=1)])
        a, b = self.domain
        scale = (3.0 / (b - a)) ** np.arange(3) / 3.0 ** np.arange(3)
        out = rows @ self.offsets.T * scale[None, :, None]
        out[:, 0] += self.coeffs[:, 0]
        return out

    def evaluate(self, t, order: int = 0) -> np.ndarray:
        """Position (order 0) or derivative (order 1, 2) at t.

        Returns an array of shape (dim,) for scalar t and (len(t), dim) otherwise.
        """
        if order not in (0, 1, 2):
            raise ValueError(f"unsupported derivative order {order}")
        scalar = np.ndim(t) == 0
        tt = np.atleast_1d(np.asarray(t, dtype=float))
        _check_domain(self.knots, tt)
        if self._segment_form:
            out = self._evaluate_segment_form(tt, order)
        elif order >= len(self._derivatives):
            out = np.zeros((tt.size, self.dim))
        else:
            knots, coeffs, degree = self._derivatives[order]
            out = basis_matrix(knots, degree, tt) @ coeffs.T
            if order == 0:
                out += self.coeffs[:, 0]
        return out[0] if scalar else out

    __call__ = evaluate

    def with_coeffs(self, coeffs) -> SegmentSpline:
        return SegmentSpline(self.knots, coeffs, self.degree)


def _poly_mul_linear(poly: list, c0, c1) -> list:
    """poly(u) * (c0 + c1 u) on ascending coefficient lists."""
    out = [Fraction(0)] * (len(poly) + 1)
    for i, c in enumerate(poly):
        out[i] += c * c0
        out[i + 1] += c * c1
    return out


def _poly_add(p: list, q: list) -> list:
    n = max(len(p), len(q))
    return [(p[i] if i < len(p) else 0) + (q[i] if i < len(q) else 0) for i in range(n)]


@cache
def _unit_segment_tables() -> np.ndarray:
    """Power coefficients of the unit-segment cubic basis and its derivatives.

    Polynomials are written in the span-local variable w = 3u - span in
    [0, 1], which keeps the coefficients small on every span.

    Returns:
        Array of shape (3, 3, 4, 6) indexed by (derivative order, span,
        power of w, basis function), computed exactly in rationals.
    """
    u = [Fraction(0)] * 4 + [Fraction(1, 3), Fraction(2, 3)] + [Fraction(1)] * 4
    out = np.zeros((3, 3, 4, 6))
    for span in range(3):
        basis = [[Fraction(1)] if i == 3 + span else [] for i in range(9)]
        for p in range(1, 4):
            nxt = []
            for i in range(len(basis) - 1):
                term = []
                if u[i + p] > u[i]:
                    d = u[i + p] - u[i]
                    term = _poly_add(term, _poly_mul_linear(basis[i], -u[i] / d, 1 / d))
                if u[i + p + 1] > u[i + 1]:
                    d = u[i + p + 1] - u[i + 1]
                    term = _poly_add(term, _poly_mul_linear(basis[i + 1], u[i + p + 1] / d, -1 / d))
                nxt.append(term)
            basis = nxt
        for j, poly in enumerate(basis):
            for k in range(3):
                local = []
                for c in reversed(poly):
                    local = _poly_add(_poly_mul_linear(local, Fraction(span, 3), Fraction(1, 3)), [c])
                for power, c in enumerate(local):
                    out[k, span, power, j] = float(c)
                poly = [c * i for i, c in enumerate(poly)][1:]
    out.setflags(write=False)
    return out


def curve_eval(spline: SegmentSpline, t, order: int = 0) -> np.ndarray:
    """Evaluate a spline or one of its first two derivatives."""
    return spline.evaluate(t, order)
