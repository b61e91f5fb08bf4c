"""Moebius maps f_lambda, their classification and fixed points."""
from fractions import Fraction

import mpmath as mp
import pytest

from hardcore_ratios.errors import DegenerateMap, NotADisk, ParseError, PoleError
from hardcore_ratios.exact_arith import GaussianRational, PointLocation, RationalDisk
from hardcore_ratios.moebius import (
    INFINITY,
    FixedPointKind,
    Moebius,
    MoebiusKind,
    classify,
    compose,
    derivative_at,
    disk_image,
    f_lambda,
    fixed_points,
    g_map,
    inverse,
    power,
    tr_squared,
)

LAMBDA0 = GaussianRational(-1, 1)


def _expected_kind(lam: Fraction) -> MoebiusKind:
    if lam < Fraction(-1, 4):
        return MoebiusKind.ELLIPTIC
    if lam == Fraction(-1, 4):
        return MoebiusKind.PARABOLIC
    return MoebiusKind.LOXODROMIC


def test_trace_squared():
    for lam in (LAMBDA0, GaussianRational(Fraction(-4, 27)), GaussianRational(3, -2)):
        assert tr_squared(f_lambda(lam)) == -1 / lam


@pytest.mark.parametrize("k", [k for k in range(-40, 41) if k != 0])
def test_real_classification(k):
    lam = Fraction(k, 16)
    assert classify(f_lambda(GaussianRational(lam))) is _expected_kind(lam)


def test_complex_parameters_are_loxodromic():
    assert classify(f_lambda(LAMBDA0)) is MoebiusKind.LOXODROMIC
    assert classify(f_lambda(GaussianRational(0, Fraction(1, 100)))) is MoebiusKind.LOXODROMIC


def test_float_classification():
    assert classify(f_lambda(-1 + 0j)) is MoebiusKind.ELLIPTIC
    assert classify(f_lambda(mp.mpc(-0.25))) is MoebiusKind.PARABOLIC
    assert classify(f_lambda(2 + 0j)) is MoebiusKind.LOXODROMIC


def test_identity():
    assert classify(Moebius.identity()) is MoebiusKind.IDENTITY
    with pytest.raises(DegenerateMap):
        fixed_points(Moebius.identity())


def test_fixed_points_at_lambda0():
    fp = fixed_points(f_lambda(LAMBDA0))
    assert fp.exact
    assert fp.attracting == GaussianRational(0, 1)
    assert fp.repelling == GaussianRational(-1, -1)
    f = f_lambda(LAMBDA0)
    assert derivative_at(f, fp.attracting).norm() == Fraction(1, 2)
    assert derivative_at(f, fp.repelling).norm() == 2


def test_fixed_points_numeric():
    fp = fixed_points(f_lambda(GaussianRational(2, 1)))
    assert not fp.exact
    assert fp.kinds == (FixedPointKind.ATTRACTING, FixedPointKind.REPELLING)
    with mp.workprec(fp.precision):
        f = f_lambda(GaussianRational(2, 1)).to_mpc()
        for z in fp.points:
            assert abs(f(z) - z) < mp.mpf(2) ** -200


def test_parabolic_and_elliptic_fixed_points():
    fp = fixed_points(f_lambda(GaussianRational(Fraction(-1, 4))))
    assert fp.points == (GaussianRational(Fraction(-1, 2)),) * 2
    assert fp.kinds == (FixedPointKind.NEUTRAL,) * 2
    fp = fixed_points(f_lambda(GaussianRational(-1)))
    assert fp.kinds == (FixedPointKind.NEUTRAL,) * 2


def test_degenerate_maps():
    with pytest.raises(DegenerateMap):
        f_lambda(GaussianRational(0))
    with pytest.raises(DegenerateMap):
        Moebius.exact(1, 2, 2, 4)


def test_poles_and_infinity():
    f = f_lambda(GaussianRational(2))
    assert f(GaussianRational(-1)) is INFINITY
    assert f(INFINITY) == 0
    assert f.pole == -1
    with pytest.raises(PoleError):
        derivative_at(f, GaussianRational(-1))
    with pytest.raises(PoleError):
        derivative_at(f, INFINITY)


def test_composition_and_inverse():
    f = f_lambda(LAMBDA0)
    g = g_map(GaussianRational(Fraction(1, 3)), GaussianRational(2, -1))
    z = GaussianRational(Fraction(1, 7), Fraction(2, 5))
    assert compose(f, g)(z) == f(g(z))
    assert (f @ g)(z) == f(g(z))
    assert compose(f, inverse(f)).is_scalar()
    assert inverse(g)(g(z)) == z
    assert power(f, 3)(z) == f(f(f(z)))
    assert power(f, -2)(f(f(z))) == z
    assert power(f, 0)(z) == z


def test_g_map_matrix():
    mu, chi = GaussianRational(Fraction(1, 2)), GaussianRational(0, 3)
    g = g_map(mu, chi)
    assert g == Moebius(mu, mu, GaussianRational(1), 1 + chi)


def test_text_form():
    g = g_map(GaussianRational(Fraction(-1, 2), 1), GaussianRational(3))
    assert Moebius.from_text(g.to_text()) == g
    with pytest.raises(ParseError):
        Moebius.from_text("1 2 3")


def test_disk_image():
    f = f_lambda(GaussianRational(2))
    disk = RationalDisk.from_center_radius(0, Fraction(1, 2))
    image = disk_image(f, disk)
    assert image.locate(f(GaussianRational(0))) is PointLocation.INSIDE
    assert image.locate(f(GaussianRational(0, Fraction(-1, 2)))) is PointLocation.ON_BOUNDARY
    assert image.locate(f(GaussianRational(Fraction(3, 4)))) is PointLocation.OUTSIDE


def test_disk_image_rejects_pole():
    f = f_lambda(GaussianRational(2))
    with pytest.raises(NotADisk):
        disk_image(f, RationalDisk.from_center_radius(0, 1))
    with pytest.raises(NotADisk):
        disk_image(f.to_mpc(), RationalDisk.from_center_radius(0, Fraction(1, 2)))
