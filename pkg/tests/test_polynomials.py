"""Exact polynomial arithmetic: harmonic bases, division, symbol checks."""

from fractions import Fraction

import numpy as np
import pytest

from biharm.polynomials import (
    ComplexPolynomial,
    GaussianRational,
    HarmonicPolynomial,
    Polynomial2D,
    complementing_check,
    harmonic_basis,
    laplace_complementing_check,
    poly_divmod,
)

X = Polynomial2D.x()
Y = Polynomial2D.y()


def test_polynomial_algebra_exact():
    p = (X + Y) ** 2
    assert p == X**2 + 2 * X * Y + Y**2
    assert p.degree == 2
    assert (p - p).is_zero()
    assert (p - p).degree == -1
    q = Fraction(1, 3) * X
    assert q.coeffs == {(1, 0): Fraction(1, 3)}


def test_differentiation_and_substitution():
    p = X**3 * Y - 2 * Y**2
    assert p.diff("x") == 3 * X**2 * Y
    assert p.diff("y") == X**3 - 4 * Y
    assert p.laplacian() == 6 * X * Y - 4
    assert p.subs_y(0) == X**3 * 0 - 0  # zero polynomial
    assert p.subs_x(1) == Y - 2 * Y**2
    assert p.eval_exact(Fraction(1, 2), 2) == Fraction(1, 4) - 8


def test_vectorized_evaluation_matches_exact():
    p = X**2 * Y - Fraction(1, 2) * Y**3
    rng = np.random.default_rng(3)
    xs = rng.uniform(-1, 1, size=17)
    ys = rng.uniform(-1, 1, size=17)
    vals = p(xs, ys)
    expected = xs**2 * ys - 0.5 * ys**3
    assert np.allclose(vals, expected, atol=1e-14)
    assert isinstance(p(0.5, 0.5), float)


def test_polynomial_rejects_bad_exponents():
    with pytest.raises(ValueError):
        Polynomial2D({(-1, 0): 1})
    with pytest.raises(ValueError):
        X ** (-2)


def test_harmonic_basis_explicit_low_degrees():
    basis = harmonic_basis(3)
    assert len(basis) == 7
    assert basis[0] == 1
    assert basis[1] == X
    assert basis[2] == Y
    assert basis[3] == X**2 - Y**2
    assert basis[4] == 2 * X * Y
    assert basis[5] == X**3 - 3 * X * Y**2
    assert basis[6] == 3 * X**2 * Y - Y**3
    assert [b.degree for b in basis] == [0, 1, 1, 2, 2, 3, 3]


def test_harmonic_basis_laplacians_vanish():
    for eta in harmonic_basis(8):
        assert eta.laplacian().is_zero()


def test_harmonic_basis_edge_cases():
    assert len(harmonic_basis(0)) == 1
    with pytest.raises(ValueError):
        harmonic_basis(-1)


def test_harmonic_polynomial_rejects_nonharmonic():
    with pytest.raises(ValueError):
        HarmonicPolynomial({(2, 0): 1})  # x^2 has Laplacian 2
    HarmonicPolynomial({(2, 0): 1, (0, 2): -1})  # x^2 - y^2 passes


def test_gaussian_rational_arithmetic():
    i = GaussianRational.i()
    two_plus_2i = GaussianRational(Fraction(2), Fraction(2))
    assert two_plus_2i / (1 + i) == GaussianRational.of(2)
    assert i * i == GaussianRational.of(-1)
    assert str(i) == "i"
    assert str(-i) == "-i"
    assert str(two_plus_2i) == "2 + 2i"
    assert str(GaussianRational(Fraction(0), Fraction(-3))) == "-3i"
    with pytest.raises(ZeroDivisionError):
        i / GaussianRational()


def test_poly_divmod_round_trip_random():
    rng = np.random.default_rng(11)
    i = GaussianRational.i()
    for _ in range(50):
        def rand_poly(max_deg):
            deg = rng.integers(0, max_deg + 1)
            coeffs = [
                GaussianRational.of(int(rng.integers(-4, 5)))
                + i * int(rng.integers(-4, 5))
                for _ in range(deg + 1)
            ]
            return ComplexPolynomial(coeffs)

        p = rand_poly(6)
        q = rand_poly(3)
        if q.is_zero():
            continue
        quot, rem = poly_divmod(p, q)
        assert quot * q + rem == p
        assert rem.degree < q.degree


def test_poly_divmod_zero_divisor():
    with pytest.raises(ZeroDivisionError):
        poly_divmod(ComplexPolynomial([1]), ComplexPolynomial())


def test_boundary_symbol_remainders_exact():
    i = GaussianRational.i()
    result = complementing_check()
    # 1 + t^2 mod (t - i)^2 leaves 2 + 2it
    assert result.remainder1 == ComplexPolynomial([2, 2 * i])
    # t + t^3 mod (t - i)^2 leaves 2i - 2t
    assert result.remainder2 == ComplexPolynomial([2 * i, -2])
    assert result.linearly_dependent is True
    assert result.factor == i
    assert result.remainder2 == result.remainder1 * i


def test_boundary_symbol_quotients_exact():
    i = GaussianRational.i()
    modulus = ComplexPolynomial([-1, -2 * i, 1])
    quot1, _ = poly_divmod(ComplexPolynomial([1, 0, 1]), modulus)
    quot2, _ = poly_divmod(ComplexPolynomial([0, 1, 0, 1]), modulus)
    assert quot1 == ComplexPolynomial([1])
    assert quot2 == ComplexPolynomial([2 * i, 1])  # t + 2i


def test_laplace_control_symbol_not_divisible():
    rem = laplace_complementing_check()
    assert rem == ComplexPolynomial([GaussianRational.i()])
    assert not rem.is_zero()


def test_complex_polynomial_formatting():
    i = GaussianRational.i()
    assert str(ComplexPolynomial([2, 2 * i])) == "2 + 2i*t"
    assert str(ComplexPolynomial([2 * i, -2])) == "2i - 2*t"
    assert str(ComplexPolynomial()) == "0"
    assert str(ComplexPolynomial([0, 1])) == "t"
