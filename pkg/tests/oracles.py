"""Reference implementations written independently of the package.

These follow the textbook recursions literally (scalar, recursive, no
vectorization) so that the library code can be checked against them.
"""

from fractions import Fraction


def cox_de_boor(knots, i, p, t):
    """N_{i,p}(t) by the plain recursion, 0/0 taken as 0.

    The last nonempty span is closed on the right so the final basis
    function equals 1 at the right end.
    """
    if p == 0:
        lo, hi = knots[i], knots[i + 1]
        if lo <= t < hi:
            return 1
        last = max(j for j in range(len(knots) - 1) if knots[j] < knots[j + 1])
        return 1 if (i == last and t == hi) else 0
    out = 0
    den = knots[i + p] - knots[i]
    if den != 0:
        out += (t - knots[i]) / den * cox_de_boor(knots, i, p - 1, t)
    den = knots[i + p + 1] - knots[i + 1]
    if den != 0:
        out += (knots[i + p + 1] - t) / den * cox_de_boor(knots, i + 1, p - 1, t)
    return out


def de_boor_value(knots, coeffs, t, p=3):
    """Sum of coeffs[i] * N_{i,p}(t) through the recursion above."""
    return sum(c * cox_de_boor(knots, i, p, t) for i, c in enumerate(coeffs))


def de_casteljau(points, t):
    """Point on a Bezier curve by repeated linear interpolation."""
    pts = [tuple(p) for p in points]
    while len(pts) > 1:
        pts = [tuple((1 - t) * a + t * b for a, b in zip(p, q)) for p, q in zip(pts, pts[1:])]
    return pts[0]


def central_difference(f, t, h):
    return (f(t + h) - f(t - h)) / (2 * h)


UNIT = [Fraction(0)] * 4 + [Fraction(1, 3), Fraction(2, 3)] + [Fraction(1)] * 4
