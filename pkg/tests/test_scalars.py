"""Gaussian rational arithmetic and the shared literal syntax."""

from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from ddbar.scalars import (
    G,
    GaussianRational,
    LiteralError,
    format_gaussian,
    parse_gaussian,
)

rationals = st.fractions(min_value=-30, max_value=30, max_denominator=12)
gaussians = st.builds(GaussianRational, rationals, rationals)


def test_literal_examples():
    assert parse_gaussian("1/2") == G(Fraction(1, 2))
    assert parse_gaussian("-3") == G(-3)
    assert parse_gaussian("1/3+1/5i") == G(Fraction(1, 3), Fraction(1, 5))
    assert parse_gaussian("2i") == G(0, 2)
    assert parse_gaussian("i") == G(0, 1)
    assert parse_gaussian("-i") == G(0, -1)
    assert parse_gaussian("2-i") == G(2, -1)
    assert parse_gaussian(" 1/3 + 1/5 i ") == G(Fraction(1, 3), Fraction(1, 5))
    assert parse_gaussian("-2/3i") == G(0, Fraction(-2, 3))


@pytest.mark.parametrize("bad", ["", "x", "1//2", "1+2", "2j", "1.5", "+", "1/0"])
def test_malformed_literals(bad):
    with pytest.raises(LiteralError):
        parse_gaussian(bad)


@given(gaussians)
def test_format_parse_round_trip(x):
    assert parse_gaussian(format_gaussian(x)) == x


@given(gaussians)
def test_conjugation_involution(x):
    assert x.conjugate().conjugate() == x
    assert x.abs_sq() == (x * x.conjugate()).re
    assert x.abs_sq() >= 0


@given(gaussians, gaussians, gaussians)
def test_ring_axioms(a, b, c):
    assert a + b == b + a
    assert a * b == b * a
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c


@given(gaussians)
def test_field_inverse(a):
    if a:
        assert a * a.inverse() == G(1)
    else:
        with pytest.raises(ZeroDivisionError):
            a.inverse()


def test_division():
    t = G("1/2")
    assert G(1) / (G(1) - t * t.conjugate()) == G(Fraction(4, 3))
    assert G(0, 1) * G(0, 1) == G(-1)


def test_hashable_and_int_mix():
    assert hash(G(2)) == hash(G(2, 0))
    assert G(2) + 1 == G(3)
    assert 2 * G(0, 1) == G(0, 2)
    assert G(1) - Fraction(1, 2) == G(Fraction(1, 2))


def test_immutability():
    x = G(1)
    with pytest.raises(AttributeError):
        x.re = Fraction(2)
