import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from c2fit import (
    Arc,
    BezierSegment,
    DomainError,
    GraphCurve,
    LineSegment,
    Polynomial,
    Restricted,
    bezier_derivatives,
    circle,
    cosine,
    exponential,
    sine,
)
from oracles import de_casteljau

# frozen from the de Casteljau oracle
CUBIC_POINTS = [(0, 0), (1, 0), (2, 1), (3, 3)]
CUBIC_AT_HALF = (1.5, 0.75)

rng = np.random.default_rng(5)
coord = st.floats(-100, 100)
point2 = st.tuples(coord, coord)


def fd_check(src, t, k, h=1e-5, rtol=1e-5):
    fd = (src(t + h, k - 1) - src(t - h, k - 1)) / (2 * h)
    exact = src(t, k)
    scale = max(1.0, float(np.max(np.abs(exact))), float(np.max(np.abs(src(t, k - 1)))))
    assert np.max(np.abs(fd - exact)) <= rtol * scale


def test_bezier_linear_derivative():
    seg = BezierSegment([(1, 2), (4, -2)])
    for t in (0.0, 0.4, 1.0):
        assert_allclose(bezier_derivatives(seg, t, 1), [3, -4], atol=1e-15)


def test_bezier_value_matches_de_casteljau():
    seg = BezierSegment(CUBIC_POINTS)
    assert de_casteljau(CUBIC_POINTS, 0.5) == CUBIC_AT_HALF
    assert_allclose(bezier_derivatives(seg, 0.5, 0), CUBIC_AT_HALF, atol=1e-15)
    for t in rng.uniform(0, 1, 20):
        assert_allclose(seg(t), de_casteljau(CUBIC_POINTS, t), atol=1e-13)


def test_bezier_beyond_degree_is_zero():
    seg = BezierSegment([(0, 0), (1, 2), (3, 1)])
    assert_allclose(bezier_derivatives(seg, 0.3, 3), [0, 0], atol=0)


def test_bezier_domain_and_ends():
    seg = BezierSegment(CUBIC_POINTS)
    assert_allclose(seg(0.0), CUBIC_POINTS[0])
    assert_allclose(seg(1.0), CUBIC_POINTS[-1])
    with pytest.raises(DomainError):
        bezier_derivatives(seg, 1.2, 0)
    with pytest.raises(ValueError):
        BezierSegment([(0, 0)])


@settings(max_examples=40, deadline=None)
@given(st.lists(point2, min_size=2, max_size=6), st.floats(0.05, 0.95))
def test_bezier_derivatives_match_finite_differences(points, t):
    seg = BezierSegment(points)
    for k in (1, 2, 3):
        fd_check(seg, t, k)


def test_bezier_power_form():
    seg = BezierSegment(CUBIC_POINTS)
    p = Polynomial(seg.power_coefficients(), (0, 1))
    t = np.linspace(0, 1, 50)
    assert_allclose(p(t), seg(t), atol=1e-13)


def test_bezier_exact_sup():
    seg = BezierSegment(CUBIC_POINTS)
    t = np.linspace(0, 1, 10001)
    dense = np.max(np.abs(seg(t, 2)), axis=0)
    assert_allclose(seg.second_derivative_sup(0, 1), dense, rtol=1e-9)


@pytest.mark.parametrize("src", [
    sine(1.5, 2.0, 0.3), cosine(0.7, 3.0, -1.0), exponential(2.0, -0.5),
    Polynomial([1, -2, 0.5, 0.25, -0.1]),
    Polynomial([[0, 1, 2, 3], [1, 0, -1, 0.5]]),
])
def test_sources_are_self_consistent(src):
    for t in rng.uniform(-2, 2, 10):
        for k in (1, 2, 3):
            fd_check(src, t, k)


@pytest.mark.parametrize("src", [sine(2.0, 3.0, 0.5), cosine(1.0, 1.7), exponential(1.5, 1.2),
                                 Polynomial([0, 1, -3, 0.5, 2, -0.2])])
def test_closed_form_sup_matches_dense_sampling(src):
    for _ in range(10):
        a = rng.uniform(-3, 2)
        b = a + rng.uniform(0.05, 3)
        t = np.linspace(a, b, 20001)
        dense = float(np.max(np.abs(src(t, 2))))
        exact = float(src.second_derivative_sup(a, b)[0])
        assert dense <= exact * (1 + 1e-12) + 1e-12
        assert exact <= dense * (1 + 1e-6) + 1e-12


def test_cosine_is_shifted_sine():
    t = np.linspace(-1, 1, 11)
    assert_allclose(cosine(2.0, 3.0, 0.5)(t)[:, 0], 2.0 * np.cos(3.0 * t + 0.5), atol=1e-14)


def test_line_segment():
    line = LineSegment((0, 0, 0), (1, 2, 2))
    assert line.length == 3.0
    assert line.is_straight
    assert line.polynomial_degree == 1
    assert_allclose(line(0.5, 2), [0, 0, 0])


def test_arc_and_circle():
    arc = Arc((1, -1), 2.0, 0.0, math.pi / 2)
    assert_allclose(arc(0.0), [3, -1], atol=1e-15)
    assert_allclose(arc(1.0), [1, 1], atol=1e-15)
    c = circle((0, 0), 3.0)
    t = rng.uniform(0, 1, 50)
    assert_allclose(np.linalg.norm(c(t), axis=1), 3.0, atol=1e-12)
    for s in t[:5]:
        for k in (1, 2, 3):
            fd_check(c, s, k)


def test_graph_and_restriction():
    g = GraphCurve(Polynomial([0, 0, 1], (0, 2)))
    assert g.dim == 2
    assert_allclose(g(1.5), [1.5, 2.25])
    assert_allclose(g(1.5, 1), [1.0, 3.0])
    assert g.polynomial_degree == 2
    r = Restricted(g, 0.5, 1.0)
    assert r.domain == (0.5, 1.0)
    with pytest.raises(DomainError):
        r(1.5)


def test_polynomial_degree_trimming():
    assert Polynomial([1, 2, 0, 0]).polynomial_degree == 1
    assert Polynomial([0.0]).polynomial_degree == 0
    assert BezierSegment(CUBIC_POINTS).polynomial_degree == 3
    assert sine().polynomial_degree is None


def test_derivative_order_limit():
    with pytest.raises(ValueError):
        sine()(0.0, 4)


def test_bad_polynomial_shape():
    with pytest.raises(ValueError):
        Polynomial(np.zeros((4, 3)))
