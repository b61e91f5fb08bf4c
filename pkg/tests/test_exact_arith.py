"""Gaussian rationals, square-root bounds and three-point disks."""
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from hardcore_ratios.errors import ConstructionError, ParseError
from hardcore_ratios.exact_arith import (
    GaussianRational,
    PointLocation,
    RationalDisk,
    disk_in_disk,
    gaussian_sqrt,
    parse_rational,
    sqrt_lower,
    sqrt_upper,
)

fractions = st.fractions(min_value=-1000, max_value=1000, max_denominator=1000)
gaussians = st.builds(GaussianRational, fractions, fractions)


@pytest.mark.parametrize(
    "text, re, im",
    [
        ("-4/27", Fraction(-4, 27), 0),
        ("3i", 0, 3),
        ("1/2-3/4i", Fraction(1, 2), Fraction(-3, 4)),
        ("-1+i", -1, 1),
        ("-i", 0, -1),
        (" 1.5 ", Fraction(3, 2), 0),
        ("2/4+6/8i", Fraction(1, 2), Fraction(3, 4)),
    ],
)
def test_parse(text, re, im):
    assert GaussianRational.parse(text) == GaussianRational(re, im)


@pytest.mark.parametrize("text", ["", "abc", "1/0", "1+2", "i i", "1/2/3"])
def test_parse_rejects(text):
    with pytest.raises(ParseError):
        GaussianRational.parse(text)


def test_printing_is_canonical():
    assert str(GaussianRational(Fraction(-4, 27))) == "-4/27"
    assert str(GaussianRational(0, 3)) == "3i"
    assert str(GaussianRational(Fraction(1, 2), Fraction(-3, 4))) == "1/2-3/4i"
    assert str(GaussianRational(-1, 1)) == "-1+i"
    assert str(GaussianRational(0, 0)) == "0"


def test_parse_rational():
    assert parse_rational("−3/9") == Fraction(-1, 3)
    with pytest.raises(ParseError):
        parse_rational("  ")


def test_arithmetic():
    z = GaussianRational(1, 2)
    w = GaussianRational(Fraction(1, 2), -1)
    assert z * w == GaussianRational(Fraction(5, 2), 0)
    assert z / z == 1
    assert z.reciprocal() == GaussianRational(Fraction(1, 5), Fraction(-2, 5))
    assert z**2 == GaussianRational(-3, 4)
    assert z**-1 == z.reciprocal()
    assert 1 - z == GaussianRational(0, -2)
    assert z.norm() == 5
    assert z.conjugate() == GaussianRational(1, -2)
    with pytest.raises(ZeroDivisionError):
        z / 0


@settings(max_examples=200, deadline=None)
@given(gaussians, gaussians, gaussians)
def test_field_laws(a, b, c):
    assert a * (b + c) == a * b + a * c
    assert (a - b) + b == a
    if not b.is_zero():
        assert (a / b) * b == a
        assert (a * b).norm() == a.norm() * b.norm()


@settings(max_examples=300, deadline=None)
@given(st.fractions(min_value=0, max_value=10**6, max_denominator=10**6), st.integers(8, 80))
def test_sqrt_bounds(q, bits):
    lo, hi = sqrt_lower(q, bits), sqrt_upper(q, bits)
    assert lo * lo <= q <= hi * hi
    assert hi - lo <= Fraction(2, 2**bits)


def test_gaussian_sqrt():
    assert gaussian_sqrt(GaussianRational(-3, 4)) == GaussianRational(1, 2)
    # 1 + 4*(-1+i) = (1+2i)^2
    assert gaussian_sqrt(GaussianRational(-3, 4)) ** 2 == 1 + 4 * GaussianRational(-1, 1)
    assert gaussian_sqrt(GaussianRational(2)) is None
    assert gaussian_sqrt(GaussianRational(0)) == 0


def test_disk_from_center_radius():
    d = RationalDisk.from_center_radius(GaussianRational(1, 1), Fraction(1, 2))
    assert d.center == GaussianRational(1, 1)
    assert d.radius_squared == Fraction(1, 4)
    assert d.locate(GaussianRational(1, 1)) is PointLocation.INSIDE
    assert d.locate(GaussianRational(Fraction(3, 2), 1)) is PointLocation.ON_BOUNDARY
    assert d.locate(GaussianRational(2, 2)) is PointLocation.OUTSIDE


def test_disk_construction_errors():
    with pytest.raises(ConstructionError):
        RationalDisk(GaussianRational(0), GaussianRational(1), GaussianRational(2))
    with pytest.raises(ConstructionError):
        RationalDisk(GaussianRational(0), GaussianRational(0), GaussianRational(0, 1))
    with pytest.raises(ConstructionError):
        RationalDisk.from_center_radius(0, 0)


def test_disk_json():
    d = RationalDisk.from_center_through(GaussianRational(Fraction(1, 3)), GaussianRational(1, 1))
    assert RationalDisk.from_json(d.to_json()) == d
    with pytest.raises(ParseError):
        RationalDisk.from_json(["0", "1"])


def test_disk_in_disk():
    outer = RationalDisk.from_center_radius(0, 1)
    inner = RationalDisk.from_center_radius(Fraction(1, 2), Fraction(1, 2))
    assert disk_in_disk(inner, outer)
    assert not disk_in_disk(inner, outer, strict=True)
    assert disk_in_disk(RationalDisk.from_center_radius(Fraction(1, 4), Fraction(1, 2)), outer, strict=True)
    assert not disk_in_disk(outer, inner)
    assert disk_in_disk(outer, outer)
    assert not disk_in_disk(RationalDisk.from_center_radius(Fraction(3, 2), Fraction(1, 4)), outer)
