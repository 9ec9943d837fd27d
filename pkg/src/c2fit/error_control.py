"""Error constants, step-size rules and adaptive partitions.

For a segment on [t0, t1] of length L the interpolation error obeys

    |F(t) - B(t)| <= M / 8 * L**2,
    M = 7 sup|F''| + max(5/6 |F''(t0)| + 1/3 |F''(t1)|, 1/3 |F''(t0)| + 5/6 |F''(t1)|),

so a tolerance d is met by steps L <= sqrt(8 d / M). For curves in the plane or
in space the per-axis bounds combine in the Euclidean norm, giving
L <= sqrt(8 d) / (sum_axis M_axis**2) ** (1/4).
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .bspline import UNIT_KNOTS, KnotVector, SegmentSpline, basis_matrix
from .curves import CurveSource
from .errors import ToleranceError
from .hermite import coefficient_pair

SAFETY = 0.05
GRID = 129
REFINE_ITERATIONS = 24
VERIFY_SAMPLES = 33
UNBOUNDED = math.inf


@dataclass(frozen=True)
class SecondDerivEstimate:
    """sup|F''| on an interval and |F''| at its ends, for one axis."""

    sup_abs: float
    at_left: float
    at_right: float
    samples_used: int
    exact: bool = False

    def __post_init__(self):
        if self.sup_abs < max(self.at_left, self.at_right):
            object.__setattr__(self, "sup_abs", max(self.at_left, self.at_right))


@dataclass(frozen=True)
class Partition:
    """Breakpoints a = t0 < t1 < ... < tn = b."""

    breakpoints: tuple[float, ...]

    def __post_init__(self):
        bp = tuple(float(t) for t in self.breakpoints)
        if len(bp) < 2:
            raise ValueError("a partition needs at least two breakpoints")
        if any(not b > a for a, b in zip(bp, bp[1:])):
            raise ValueError("breakpoints must be strictly increasing")
        object.__setattr__(self, "breakpoints", bp)

    @classmethod
    def uniform(cls, a: float, b: float, n: int) -> Partition:
        pts = np.linspace(a, b, n + 1)
        pts[0], pts[-1] = a, b
        return cls(tuple(pts))

    def __len__(self) -> int:
        return len(self.breakpoints) - 1

    @property
    def domain(self) -> tuple[float, float]:
        return self.breakpoints[0], self.breakpoints[-1]

    def intervals(self):
        return list(zip(self.breakpoints, self.breakpoints[1:]))

    @property
    def max_step(self) -> float:
        return max(b - a for a, b in self.intervals())


@dataclass(frozen=True)
class ToleranceBudget:
    """Total tolerance d split into per-axis caps with sum(cap**2) <= d**2.

    Caps are proportional to the axis constants, matching the Euclidean
    step rule where every axis uses the same step.
    """

    d: float
    per_axis_cap: tuple[float, ...]

    @classmethod
    def from_constants(cls, d: float, constants: Sequence[float]) -> ToleranceBudget:
        _check_tolerance(d)
        m = np.asarray(constants, dtype=float)
        norm = float(np.linalg.norm(m))
        if norm == 0.0:
            caps = np.full(m.size, d / math.sqrt(m.size))
        else:
            caps = d * m / norm
        return cls(float(d), tuple(float(c) for c in caps))


def _check_tolerance(d: float) -> None:
    if not d > 0.0:
        raise ValueError(f"tolerance must be positive, got {d}")


def _check_interval(source: CurveSource, interval) -> tuple[float, float]:
    a, b = (float(v) for v in interval)
    lo, hi = source.domain
    if not b > a:
        raise ValueError(f"degenerate interval [{a}, {b}]")
    if a < lo or b > hi:
        raise ValueError(f"interval [{a}, {b}] outside source domain {source.domain}")
    return a, b


def _second_derivative_bounds(source: CurveSource, a: float, b: float, safety: float = SAFETY,
                              grid: int = GRID):
    """Per-axis (sup|F''|, |F''(a)|, |F''(b)|, samples used, exact) on [a, b]."""
    dim = source.dim
    if source.is_straight:
        z = np.zeros(dim)
        return z, z, z, 0, True
    exact, ends = source._second_derivative_profile(a, b)
    if exact is not None:
        return np.asarray(exact, dtype=float), ends[0], ends[1], 2, True

    t = np.linspace(a, b, grid)
    vals = np.abs(source._derivative(t, 2))
    best = vals.max(axis=0)
    j = vals.argmax(axis=0)
    lo = t[np.maximum(j - 1, 0)]
    hi = t[np.minimum(j + 1, grid - 1)]
    used = grid
    # bracket the grid maximizer and halve it each pass, all axes at once
    for _ in range(REFINE_ITERATIONS):
        pts = lo[:, None] + (hi - lo)[:, None] * np.linspace(0.0, 1.0, 5)[None, :]
        v = np.abs(source._derivative(pts.ravel(), 2)).reshape(dim, 5, dim)
        v = v[np.arange(dim), :, np.arange(dim)]
        used += 5 * dim
        k = v.argmax(axis=1)
        best = np.maximum(best, v.max(axis=1))
        width = (hi - lo) / 4.0
        centre = pts[np.arange(dim), k]
        lo = np.maximum(centre - width, a)
        hi = np.minimum(centre + width, b)
    return (1.0 + safety) * best, ends[0], ends[1], used, False


def _constants(source: CurveSource, a: float, b: float, safety: float = SAFETY) -> np.ndarray:
    sup, left, right, _, _ = _second_derivative_bounds(source, a, b, safety)
    sup = np.maximum(sup, np.maximum(left, right))
    return 7.0 * sup + np.maximum(5.0 / 6.0 * left + right / 3.0, left / 3.0 + 5.0 / 6.0 * right)


def estimate_second_derivative(source: CurveSource, interval, axis: int = 0,
                               safety: float = SAFETY) -> SecondDerivEstimate:
    """Estimate sup|F''| on ``interval`` for one axis.

    Straight sources give zero and sources with a closed form give the exact
    value. Otherwise |F''| is sampled on a 129-point grid, the maximum is
    refined by repeatedly halving a bracket around the best grid point, and
    the result is inflated by ``1 + safety``.
    """
    a, b = _check_interval(source, interval)
    if not 0 <= axis < source.dim:
        raise IndexError(f"axis {axis} out of range for a {source.dim}-D source")
    sup, left, right, used, exact = _second_derivative_bounds(source, a, b, safety)
    return SecondDerivEstimate(float(sup[axis]), float(left[axis]), float(right[axis]), used, exact)


def segment_constant(est: SecondDerivEstimate) -> float:
    """The error constant M of one axis on one interval."""
    l, r = est.at_left, est.at_right
    return 7.0 * est.sup_abs + max(5.0 / 6.0 * l + r / 3.0, l / 3.0 + 5.0 / 6.0 * r)


def local_constants(source: CurveSource, interval, safety: float = SAFETY) -> np.ndarray:
    """Per-axis error constants on an interval."""
    a, b = _check_interval(source, interval)
    return _constants(source, a, b, safety)


def error_bound(Mi: float, interval_length: float) -> float:
    """Guaranteed max deviation of a segment: M / 8 * length**2."""
    if not interval_length > 0.0:
        raise ValueError("interval length must be positive")
    return Mi / 8.0 * interval_length**2


def max_step_scalar(M: float, d: float) -> float:
    """Largest admissible interval length; ``UNBOUNDED`` (inf) when M == 0."""
    _check_tolerance(d)
    if M < 0.0:
        raise ValueError("error constant must be non-negative")
    if M == 0.0:
        return UNBOUNDED
    return math.sqrt(8.0 * d / M)


def _step_rule(m: np.ndarray, d: float) -> float:
    nz = m[m > 0.0]
    if nz.size == 0:
        return UNBOUNDED
    if nz.size == 1:
        return math.sqrt(8.0 * d / float(nz[0]))
    return math.sqrt(8.0 * d) / float(nz @ nz) ** 0.25


def max_step_parametric(M_per_axis: Sequence[float], d: float) -> float:
    """Largest interval length keeping the Euclidean deviation below d.

    With a single non-flat axis this is exactly the scalar rule.
    """
    _check_tolerance(d)
    m = np.asarray(M_per_axis, dtype=float)
    if np.any(m < 0.0):
        raise ValueError("error constants must be non-negative")
    return _step_rule(m, d)


def combined_constant(M_per_axis: Sequence[float]) -> float:
    """Euclidean combination sqrt(sum M**2), so the bound is combined / 8 * L**2."""
    return float(np.linalg.norm(np.asarray(M_per_axis, dtype=float)))


@lru_cache(maxsize=16)
def _unit_grid(samples: int) -> np.ndarray:
    u = np.linspace(0.0, 1.0, samples)
    u.setflags(write=False)
    return u


@lru_cache(maxsize=16)
def unit_basis(samples: int) -> np.ndarray:
    """Basis matrix of the unit segment at ``samples`` uniform parameters."""
    return basis_matrix(UNIT_KNOTS, 3, _unit_grid(samples))


def _deviation(source: CurveSource, t0: float, t1: float, coeffs: np.ndarray,
               offsets: np.ndarray, samples: int):
    t = t0 + (t1 - t0) * _unit_grid(samples)
    t[-1] = t1
    fitted = coeffs[:, 0] + unit_basis(samples) @ offsets.T
    dev = np.linalg.norm(source._derivative(t, 0) - fitted, axis=1)
    j = int(dev.argmax())
    return float(dev[j]), float(t[j])


def sampled_deviation(source: CurveSource, seg: SegmentSpline, samples: int = VERIFY_SAMPLES):
    """Max sampled deviation between source and segment.

    Euclidean for curves, absolute for scalar functions.

    Returns:
        (max deviation, parameter where it occurs).
    """
    t0, t1 = seg.domain
    return _deviation(source, t0, t1, seg.coeffs, seg.offsets, samples)


class _EndCache:
    """Memoized F, F', F'' at breakpoints.

    Callers have already checked the breakpoints against the source domain,
    so evaluation skips the per-call checks.
    """

    def __init__(self, source: CurveSource):
        self.source = source
        self._cache: dict[float, np.ndarray] = {}

    def __call__(self, t: float) -> np.ndarray:
        if t not in self._cache:
            self._cache[t] = self.source._jet(t)
        return self._cache[t]

    def coefficients(self, a: float, b: float) -> tuple[np.ndarray, np.ndarray]:
        """Coefficients and their offsets from the first one."""
        left, right = self(a), self(b)
        h = b - a
        values = (left[0], h * left[1], h * h * left[2], right[0], h * right[1], h * h * right[2])
        return coefficient_pair(*values)

    def segment(self, a: float, b: float) -> SegmentSpline:
        coeffs, offsets = self.coefficients(a, b)
        return SegmentSpline.trusted(KnotVector.segment(a, b), coeffs, offsets)


def _certified_step(source, t, window, d, safety):
    """Shrink ``window`` until the step rule on [t, t + window] admits it.

    Each candidate is checked against the constants of its own window, since
    the endpoint terms can grow when the window shrinks.

    Returns:
        (step, admissible step on that window), the latter a hint for the
        next trial window.
    """
    w = window
    for _ in range(8):
        h = _step_rule(_constants(source, t, t + w, safety), d)
        if h >= w:
            return w, h
        w = h
    return w, w


def _reproduced_exactly(source: CurveSource) -> bool:
    deg = source.polynomial_degree
    return deg is not None and deg <= 3


def _march(source, a, b, d, safety, verify_samples, min_step, exact_cubic):
    """Breakpoints and verified segments of the greedy partition."""
    snap = 1e-12 * (b - a)
    ends = _EndCache(source)
    breaks = [a]
    segments = []
    t = a
    last = hint = None
    whole = exact_cubic and _reproduced_exactly(source)
    while t < b:
        remaining = b - t
        window = remaining if last is None else min(remaining, 2.0 * last, hint)
        if whole:
            step = remaining
        else:
            step, hint = _certified_step(source, t, window, d, safety)
            if step < remaining < 2.0 * step:
                # split the rest evenly rather than leave a sliver, whose
                # second derivative would carry roundoff amplified by 1/h**2
                step = remaining / 2.0
        while True:
            if step < min_step:
                raise ToleranceError(
                    f"step {step:.3g} below minimum {min_step:.3g} at t={t} for tolerance {d}"
                )
            nxt = b if t + step >= b - snap else t + step
            coeffs, offsets = ends.coefficients(t, nxt)
            dev, _ = _deviation(source, t, nxt, coeffs, offsets, verify_samples)
            if dev <= d:
                break
            step /= 2.0
        segments.append(SegmentSpline.trusted(KnotVector.segment(t, nxt), coeffs, offsets))
        breaks.append(nxt)
        last = nxt - t
        t = nxt
    return Partition(tuple(breaks)), segments


def _adaptive_setup(source, domain, d, min_step):
    _check_tolerance(d)
    a, b = _check_interval(source, domain if domain is not None else source.domain)
    if not (math.isfinite(a) and math.isfinite(b)):
        raise ValueError("adaptive partition needs a finite domain")
    return a, b, (1e-9 * (b - a) if min_step is None else min_step)


def adaptive_partition(source: CurveSource, domain=None, d: float = 1e-3, *,
                       safety: float = SAFETY, verify_samples: int = VERIFY_SAMPLES,
                       min_step: float | None = None, exact_cubic: bool = False) -> Partition:
    """Greedy left-to-right partition whose fitted segments stay within ``d``.

    At each breakpoint the local error constants over a trial window give a
    step from the step rule; the segment fitted over that step is then checked
    by dense sampling and the step is halved until the check passes.

    With ``exact_cubic`` a polynomial source of degree <= 3, which one segment
    reproduces exactly, takes the whole domain as a single (still verified)
    step instead of the step-rule march.

    Raises:
        ValueError: non-positive tolerance or bad domain.
        ToleranceError: the step fell below ``min_step``.
    """
    a, b, min_step = _adaptive_setup(source, domain, d, min_step)
    return _march(source, a, b, d, safety, verify_samples, min_step, exact_cubic)[0]


def adaptive_segments(source: CurveSource, domain=None, d: float = 1e-3, *,
                      safety: float = SAFETY, verify_samples: int = VERIFY_SAMPLES,
                      min_step: float | None = None, exact_cubic: bool = False):
    """Like ``adaptive_partition`` but also returns the verified segments."""
    a, b, min_step = _adaptive_setup(source, domain, d, min_step)
    return _march(source, a, b, d, safety, verify_samples, min_step, exact_cubic)


def uniform_partition(source: CurveSource, domain=None, d: float = 1e-3,
                      safety: float = SAFETY, exact_cubic: bool = False) -> Partition:
    """Equal steps from the error constants over the whole domain."""
    _check_tolerance(d)
    a, b = _check_interval(source, domain if domain is not None else source.domain)
    if exact_cubic and _reproduced_exactly(source):
        return Partition((a, b))
    h = max_step_parametric(local_constants(source, (a, b), safety), d)
    n = 1 if h >= b - a else math.ceil((b - a) / h)
    return Partition.uniform(a, b, n)
