"""Exact polynomial arithmetic and the eventual (m >> 0) ordering."""

from fractions import Fraction

import pytest

from kempfhn.poly import (
    EQUAL,
    GREATER,
    LESS,
    InputError,
    ModeMismatch,
    Poly,
    RationalFunction,
    ScaleValue,
    poly_compare_eventual,
    poly_divmod,
    poly_gcd,
    poly_to_str,
    reduced_compare,
    scale_compare,
    scalar_sign,
)


def test_poly_normalizes_trailing_zeros():
    p = Poly([1, 2, 0, 0])
    assert p.coeffs == (1, 2)
    assert p.degree == 1
    assert Poly([0, 0]).is_zero()
    assert Poly().degree == -1


def test_poly_constructors():
    assert Poly.constant(Fraction(3, 2)).coeffs == (Fraction(3, 2),)
    assert Poly.monomial(3).coeffs == (0, 0, 0, 1)
    assert Poly.monomial(0, 5) == Poly.constant(5)


def test_poly_accepts_rational_strings():
    p = Poly(["1/2", "-3"])
    assert p.coeffs == (Fraction(1, 2), -3)
    with pytest.raises(InputError):
        Poly(["not a number"])
    with pytest.raises(InputError):
        Poly([1.5])


def test_poly_json_round_trip():
    p = Poly([Fraction(1, 3), 0, 2])
    assert Poly.from_json(p.to_json()) == p
    with pytest.raises(InputError):
        Poly.from_json("m+1")
    with pytest.raises(InputError):
        Poly.from_json(["1"] + ["0"] * 16 + ["1"])


def test_poly_arithmetic():
    p = Poly([1, 1])
    q = Poly([-1, 1])
    assert p + q == Poly([0, 2])
    assert p - p == Poly()
    assert p * q == Poly([-1, 0, 1])
    assert -p == Poly([-1, -1])
    assert 3 * p == Poly([3, 3])
    assert p * Fraction(1, 2) == Poly([Fraction(1, 2), Fraction(1, 2)])


def test_poly_eval_horner():
    p = Poly([4, 0, -1, 2])
    assert p.eval(3) == 4 - 9 + 54
    assert p.eval(Fraction(1, 2)) == Fraction(4) - Fraction(1, 4) + Fraction(1, 4)


def test_eventual_comparison_is_lexicographic_from_top():
    assert poly_compare_eventual(Poly([0, 0, 1]), Poly([100, 100])) == GREATER
    assert poly_compare_eventual(Poly([5, 1]), Poly([-5, 1])) == GREATER
    assert poly_compare_eventual(Poly([1, 2]), Poly([1, 2])) == EQUAL
    assert Poly([-1, 0, 0, -2]).sign_eventual() == LESS


def test_reduced_compare_cross_multiplies():
    # (m+2)/2 vs (m+1)/1: eventually the rank-1 slope wins
    assert reduced_compare(Poly([2, 1]), 2, Poly([1, 1]), 1) == LESS
    assert reduced_compare(Poly([2, 2]), 2, Poly([1, 1]), 1) == EQUAL
    with pytest.raises(InputError):
        reduced_compare(Poly([1]), 0, Poly([1]), 1)
    with pytest.raises(InputError):
        reduced_compare(Poly([1]), 1, Poly([1]), -2)


def test_poly_divmod_exact():
    a = Poly([2, 3, 1])     # (m+1)(m+2)
    b = Poly([1, 1])
    q, r = poly_divmod(a, b)
    assert q == Poly([2, 1])
    assert r.is_zero()
    a2 = Poly([1, 0, 1])
    q2, r2 = poly_divmod(a2, b)
    assert q2 * b + r2 == a2
    assert r2.degree < b.degree
    with pytest.raises(ZeroDivisionError):
        poly_divmod(a, Poly())


def test_poly_gcd_is_monic():
    a = Poly([2, 3, 1]) * 4
    b = Poly([1, 1]) * Fraction(1, 3)
    g = poly_gcd(a, b)
    assert g == Poly([1, 1])
    assert poly_gcd(Poly([1, 1]), Poly([2, 1])) == Poly([1])
    assert poly_gcd(Poly(), Poly()).is_zero()


def test_poly_to_str():
    assert poly_to_str(Poly()) == "0"
    assert poly_to_str(Poly([Fraction(-1, 2), 0, 1])) == "m^2 - 1/2"
    assert poly_to_str(Poly([1, -2])) == "-2*m + 1"
    assert poly_to_str(Poly([0, 1]), var="x") == "x"


def test_rational_function_reduces():
    f = RationalFunction(Poly([2, 3, 1]), Poly([2, 2]))
    assert f.num == Poly([1, Fraction(1, 2)])
    assert f.den == Poly([1])
    assert f == RationalFunction(Poly([2, 1]), Poly([2]))
    with pytest.raises(ZeroDivisionError):
        RationalFunction(Poly([1]), Poly())


def test_rational_function_field_ops():
    one_over_m = RationalFunction(Poly([1]), Poly([0, 1]))
    m = RationalFunction(Poly([0, 1]))
    assert one_over_m * m == RationalFunction.from_scalar(1)
    assert (one_over_m + one_over_m) == 2 * one_over_m
    assert m - m == RationalFunction.from_scalar(0)
    assert (m / m) == RationalFunction.from_scalar(1)
    with pytest.raises(ZeroDivisionError):
        m / RationalFunction.from_scalar(0)
    assert 1 / m == one_over_m


def test_rational_function_eventual_order():
    m = RationalFunction(Poly([0, 1]))
    assert 1 / (m - 1) > 1 / m
    assert m > 1000000
    assert -1 / m < 0
    assert 1 / m <= 1 / m
    assert not (1 / m < 1 / m)


def test_rational_function_eval_and_json():
    f = RationalFunction(Poly([1, 1]), Poly([0, 1]))
    assert f.eval(4) == Fraction(5, 4)
    with pytest.raises(ZeroDivisionError):
        f.eval(0)
    assert RationalFunction.from_json(f.to_json()) == f
    with pytest.raises(InputError):
        RationalFunction.from_json({"num": ["1"]})


def test_scalar_sign():
    assert scalar_sign(Fraction(-2, 7)) == LESS
    assert scalar_sign(0) == EQUAL
    assert scalar_sign(RationalFunction(Poly([0, 1]))) == GREATER


def test_scale_value_validation():
    with pytest.raises(InputError):
        ScaleValue(1, Fraction(1), "sideways")
    with pytest.raises(InputError):
        ScaleValue(1, Fraction(-1), "numeric", m=3)
    with pytest.raises(InputError):
        ScaleValue(0, Fraction(1), "numeric", m=3)
    with pytest.raises(InputError):
        ScaleValue(1, Fraction(0), "numeric", m=3)
    v = ScaleValue(1, Fraction(9, 4), "numeric", m=3)
    assert v.mag2_num == 9 and v.mag2_den == 4
    z = ScaleValue.zero("asymptotic")
    assert z.sign == 0 and z.mag2.is_zero()


def test_scale_value_asymptotic_coerces_scalars():
    v = ScaleValue(1, Fraction(3, 2), "asymptotic")
    assert isinstance(v.mag2, RationalFunction)
    assert v.m is None


def test_scale_compare_sign_first_then_magnitude():
    a = ScaleValue(1, Fraction(4), "numeric", m=5)
    b = ScaleValue(1, Fraction(1), "numeric", m=5)
    c = ScaleValue(-1, Fraction(1), "numeric", m=5)
    d = ScaleValue(-1, Fraction(4), "numeric", m=5)
    assert scale_compare(a, b) == GREATER
    assert scale_compare(c, a) == LESS
    # more negative is smaller: the magnitude comparison flips
    assert scale_compare(d, c) == LESS
    assert scale_compare(a, a) == EQUAL
    z1 = ScaleValue.zero("numeric", m=5)
    z2 = ScaleValue.zero("numeric", m=5)
    assert scale_compare(z1, z2) == EQUAL


def test_scale_compare_rejects_mode_mixing():
    a = ScaleValue(1, Fraction(1), "numeric", m=5)
    b = ScaleValue(1, Fraction(1), "numeric", m=7)
    c = ScaleValue(1, 1, "asymptotic")
    with pytest.raises(ModeMismatch):
        scale_compare(a, b)
    with pytest.raises(ModeMismatch):
        scale_compare(a, c)


def test_scale_compare_asymptotic_uses_eventual_order():
    m = RationalFunction(Poly([0, 1]))
    big = ScaleValue(1, m, "asymptotic")
    small = ScaleValue(1, 1 / m, "asymptotic")
    assert scale_compare(big, small) == GREATER
