"""Quadrature rules: exactness against closed-form monomial integrals."""

from math import factorial

import numpy as np
import pytest

from biharm.fem import segment_quadrature, triangle_quadrature


def reference_triangle_integral(a: int, b: int) -> float:
    # integral of x^a y^b over the triangle (0,0), (1,0), (0,1)
    return factorial(a) * factorial(b) / factorial(a + b + 2)


@pytest.mark.parametrize("order", range(1, 7))
def test_triangle_exactness_all_monomials(order):
    rule = triangle_quadrature(order)
    x = rule.points[:, 1]
    y = rule.points[:, 2]
    for a in range(order + 1):
        for b in range(order + 1 - a):
            approx = float(np.sum(rule.weights * x**a * y**b))
            assert abs(approx - reference_triangle_integral(a, b)) < 1e-13


def test_triangle_quartic_spot_value():
    rule = triangle_quadrature(4)
    x, y = rule.points[:, 1], rule.points[:, 2]
    val = float(np.sum(rule.weights * x**2 * y**2))
    assert abs(val - 1.0 / 180.0) < 1e-15


@pytest.mark.parametrize("order", range(1, 7))
def test_triangle_weights_positive_and_normalized(order):
    rule = triangle_quadrature(order)
    assert (rule.weights > 0).all()
    assert abs(rule.weights.sum() - 0.5) < 1e-15
    # barycentric points strictly inside
    assert (rule.points > 0).all() and (rule.points < 1).all()
    assert np.allclose(rule.points.sum(axis=1), 1.0, atol=1e-14)


def test_triangle_order_bounds():
    with pytest.raises(ValueError):
        triangle_quadrature(0)
    with pytest.raises(ValueError):
        triangle_quadrature(7)


@pytest.mark.parametrize("order", range(1, 12))
def test_segment_exactness(order):
    rule = segment_quadrature(order)
    t = rule.points[:, 1]
    for k in range(order + 1):
        approx = float(np.sum(rule.weights * t**k))
        assert abs(approx - 1.0 / (k + 1)) < 1e-14


def test_segment_default_order_five():
    rule = segment_quadrature(5)
    t = rule.points[:, 1]
    assert abs(float(np.sum(rule.weights * t**5)) - 1.0 / 6.0) < 1e-15
    assert (rule.weights > 0).all()
    assert abs(rule.weights.sum() - 1.0) < 1e-15


def test_segment_order_bounds():
    with pytest.raises(ValueError):
        segment_quadrature(0)
    with pytest.raises(ValueError):
        segment_quadrature(12)


def test_rule_arrays_immutable():
    rule = triangle_quadrature(3)
    with pytest.raises(ValueError):
        rule.weights[0] = 1.0
