from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from strata.errors import DocumentParseError
from strata.gaussian import GaussianRational, parse_gaussian, parse_rational

rationals = st.fractions(min_value=-1000, max_value=1000, max_denominator=50)
gaussians = st.builds(GaussianRational, rationals, rationals)


def test_basic_arithmetic():
    a = GaussianRational(1, 2)
    b = GaussianRational(Fraction(1, 3), -1)
    assert a + b == GaussianRational(Fraction(4, 3), 1)
    assert a - b == GaussianRational(Fraction(2, 3), 3)
    assert a * b == GaussianRational(Fraction(1, 3) + 2, Fraction(2, 3) - 1)
    assert (a / b) * b == a


def test_int_coercion():
    assert GaussianRational(2) + 1 == GaussianRational(3)
    assert 2 * GaussianRational(0, 1) == GaussianRational(0, 2)
    assert 1 - GaussianRational(0, 1) == GaussianRational(1, -1)


@given(gaussians, gaussians, gaussians)
def test_field_axioms(a, b, c):
    assert (a + b) * c == a * c + b * c
    assert a * b == b * a
    if c:
        assert (a * c) / c == a


@given(gaussians)
def test_canonical_roundtrip(z):
    assert parse_gaussian(z.canonical()) == z


@pytest.mark.parametrize(
    "text,expected",
    [
        ("1", GaussianRational(1)),
        ("-2/3", GaussianRational(Fraction(-2, 3))),
        ("i", GaussianRational(0, 1)),
        ("-i", GaussianRational(0, -1)),
        ("2i", GaussianRational(0, 2)),
        ("6 i", GaussianRational(0, 6)),
        ("1+i", GaussianRational(1, 1)),
        ("1/2-3/4 i", GaussianRational(Fraction(1, 2), Fraction(-3, 4))),
        (5, GaussianRational(5)),
    ],
)
def test_parse_forms(text, expected):
    assert parse_gaussian(text) == expected


@pytest.mark.parametrize("bad", ["", "x", "1+", "1//2", "i i", "1+2", "/3", True, 1.5])
def test_parse_rejects(bad):
    with pytest.raises(DocumentParseError):
        parse_gaussian(bad)


def test_parse_rational():
    assert parse_rational("2/3") == Fraction(2, 3)
    assert parse_rational(-4) == Fraction(-4)
    with pytest.raises(DocumentParseError):
        parse_rational("1+i")
    with pytest.raises(DocumentParseError):
        parse_rational("2/0")


def test_division_by_zero():
    with pytest.raises(ZeroDivisionError):
        GaussianRational(1) / GaussianRational(0)
