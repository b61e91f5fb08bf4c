"""Cayley-tree ratios, zeros and the activity field."""
from fractions import Fraction

import mpmath as mp
import numpy as np
import pytest

from hardcore_ratios.cayley import (
    ActivityField,
    Rect,
    cayley_orbit,
    cayley_partition,
    cayley_polynomials,
    cayley_ratio,
    cayley_zero_condition,
    cayley_zeros,
    spherical_derivative_field,
    write_pgm,
    write_zeros_csv,
)
from hardcore_ratios.errors import DomainError, PolynomialDegreeGuard
from hardcore_ratios.exact_arith import GaussianRational
from hardcore_ratios.graph_core import cayley_tree, tree_partition
from hardcore_ratios.moebius import INFINITY
from hardcore_ratios.regions import shearer_radius


def test_small_ratios():
    lam = GaussianRational(Fraction(1, 3), 1)
    assert cayley_ratio(lam, 2, 0) == lam
    assert cayley_ratio(lam, 2, 1) == lam / (1 + lam) ** 2
    assert cayley_ratio(2 + 0j, 1, 0) == 2


@pytest.mark.parametrize("d, n", [(1, 4), (2, 3), (3, 2)])
def test_agrees_with_tree_recursion(d, n):
    lam = GaussianRational(-1, 1)
    pair = tree_partition(cayley_tree(d, n), lam)
    assert cayley_partition(lam, d, n) == pair
    assert cayley_ratio(lam, d, n) == pair.ratio()


def test_pole_orbit():
    assert cayley_orbit(GaussianRational(-1), 2, 3) == [-1, INFINITY, 0, -1]


def test_zero_condition():
    assert cayley_zero_condition(GaussianRational(-1), 2, 0)
    assert cayley_zero_condition(GaussianRational(-1), 2, 3)
    assert not cayley_zero_condition(GaussianRational(-1), 2, 1)
    assert cayley_zero_condition(-1 + 0j, 2, 3)
    with pytest.raises(DomainError):
        cayley_zero_condition(GaussianRational(0), 2, 1)


def test_polynomials():
    z_in, z_out = cayley_polynomials(2, 1)
    assert [int(c) for c in (z_in + z_out).all_coeffs()] == [1, 3, 1]


def test_zeros_of_three_vertex_tree():
    zeros = cayley_zeros(2, 1)
    assert len(zeros) == 2
    assert all(z.certified for z in zeros)
    with mp.workprec(256):
        expected = [(-3 - mp.sqrt(5)) / 2, (-3 + mp.sqrt(5)) / 2]
        for z, value in zip(zeros, expected):
            assert abs(z.root - value) < mp.mpf(10) ** -25
            assert z.depth == 1


@pytest.mark.parametrize("n", range(0, 4))
def test_zeros_lie_outside_shearer_disk(n):
    radius = float(shearer_radius(3))
    zeros = cayley_zeros(2, n)
    assert len(zeros) == 2 ** (n + 1) - 1
    for z in zeros:
        assert z.certified
        assert abs(z.as_complex()) > radius


def test_zero_guards():
    with pytest.raises(PolynomialDegreeGuard):
        cayley_zeros(2, 20)
    with pytest.raises(PolynomialDegreeGuard):
        cayley_zeros(6, 5)
    with pytest.raises(DomainError):
        cayley_zeros(0, 1)


def test_zeros_csv(tmp_path):
    out = tmp_path / "zeros.csv"
    write_zeros_csv(str(out), cayley_zeros(2, 1))
    lines = out.read_text().splitlines()
    assert lines[0] == "n,re,im,residual"
    assert len(lines) == 3


def test_rect_parse():
    assert Rect.parse("-1,-2,3,4") == Rect(-1.0, -2.0, 3.0, 4.0)
    with pytest.raises(ValueError):
        Rect.parse("1,2,3")


def test_field_is_conjugation_symmetric():
    field = spherical_derivative_field(Rect(-3.0, -2.0, 1.0, 2.0), (40, 32), 2, 30)
    assert field.values.shape == (32, 40)
    np.testing.assert_array_equal(field.values, field.values[::-1])


def test_field_threads_agree():
    rect = Rect(-0.1, -0.1, 0.1, 0.1)
    one = spherical_derivative_field(rect, (24, 24), 2, 25, threads=1)
    four = spherical_derivative_field(rect, (24, 24), 2, 25, threads=4)
    np.testing.assert_allclose(one.values, four.values, rtol=1e-12)


def test_field_is_bounded_for_small_parameters():
    field = spherical_derivative_field(Rect(-0.01, -0.01, 0.01, 0.01), (16, 16), 2, 60)
    assert np.all(np.isfinite(field.values))
    assert field.values.max() < 2


def test_field_depth_guard():
    with pytest.raises(DomainError):
        spherical_derivative_field(Rect(-1.0, -1.0, 1.0, 1.0), (4, 4), 2, 0)


def test_image_and_pgm(tmp_path):
    values = np.array([[0.5, 2.0], [np.inf, 1.0]])
    field = ActivityField(Rect(0.0, 0.0, 1.0, 1.0), (2, 2), 2, 1, values)
    image = field.to_image(1.0)
    np.testing.assert_array_equal(image, [[0, 255], [255, 255]])
    out = tmp_path / "field.pgm"
    write_pgm(str(out), image)
    data = out.read_bytes()
    assert data.startswith(b"P5\n2 2\n255\n")
    assert data[-4:] == bytes([0, 255, 255, 255])
