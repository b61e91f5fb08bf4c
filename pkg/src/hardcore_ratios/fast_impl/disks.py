from __future__ import annotations

import logging
from fractions import Fraction
from typing import Iterator, List, Optional

from ..errors import ConstructionError, GeometryPrecondition, InternalError
from ..exact_arith import (
    I,
    GaussianRational,
    PointLocation,
    RationalDisk,
    disk_in_disk,
    sqrt_lower,
)

logger = logging.getLogger("hardcore")


def radius_bits(radius_squared: Fraction, extra: int = 32) -> int:
    """Bits needed to resolve a disk of this size with `extra` bits to spare."""
    scale = radius_squared.denominator.bit_length() - radius_squared.numerator.bit_length()
    return max(8, scale // 2 + extra)


def inner_radius(disk: RationalDisk) -> Fraction:
    """A rational lower bound on the radius, accurate to far below the radius itself."""
    return sqrt_lower(disk.radius_squared, radius_bits(disk.radius_squared))


def _quarter_points(disk: RationalDisk) -> List[GaussianRational]:
    """P_0 = p1 and P_{k+1} = c + i(P_k - c): four boundary points a quarter turn apart."""
    c = disk.center
    points = [disk.p1]
    for _ in range(3):
        points.append(c + I * (points[-1] - c))
    return points


def _candidates(a: RationalDisk, b: RationalDisk) -> Iterator[RationalDisk]:
    c = a.center
    points = _quarter_points(a)
    # boundary of b counts as inside
    held = [b.locate(p) is not PointLocation.OUTSIDE for p in points]
    for k in range(4):
        if held[k] and held[(k + 1) % 4]:
            r = (points[k] + points[(k + 1) % 4]) / 2
            yield RationalDisk.from_center_through((c + 3 * r) / 4, r)
    for k in range(4):
        if held[k]:
            p = points[k]
            yield RationalDisk.from_center_through((c + 3 * p) / 4, p)


def _attempt(a: RationalDisk, b: RationalDisk) -> Optional[RationalDisk]:
    for d in _candidates(a, b):
        if disk_in_disk(d, a) and disk_in_disk(d, b):
            return d
    return None


def generate_disk(a: RationalDisk, b: RationalDisk) -> RationalDisk:
    """A rational disk inside both A and B whose area is at least 1/128 of A's.

    Requires the center of A to lie in B and B not to be contained in A.
    """
    if b.locate(a.center) is not PointLocation.INSIDE:
        raise GeometryPrecondition("the center of A must lie in B")
    if disk_in_disk(b, a):
        raise GeometryPrecondition("B must not be contained in A")

    found = _attempt(a, b) or _attempt(b, a)
    if found is None:
        raise InternalError(
            "no candidate disk fits in both A and B",
            {"a": a.to_json(), "b": b.to_json()},
        )
    if 128 * found.radius_squared < a.radius_squared:
        raise InternalError(
            "generated disk is too small",
            {"a": a.to_json(), "b": b.to_json(), "d": found.to_json()},
        )
    return found


def dyadic_inner_disk(disk: RationalDisk, shrink: Fraction = Fraction(3, 4)) -> RationalDisk:
    """A disk with short dyadic coordinates inside `disk`, keeping at least shrink^2 of
    its area up to rounding. Coordinate sizes stay proportional to log(1/radius).
    """
    bits = radius_bits(disk.radius_squared, extra=8)
    scale = 1 << bits
    c = disk.center
    center = GaussianRational(
        Fraction(round(c.re * scale), scale),
        Fraction(round(c.im * scale), scale),
    )
    radius = shrink * sqrt_lower(disk.radius_squared, bits)
    try:
        rounded = RationalDisk.from_center_radius(center, radius)
    except ConstructionError:
        return disk
    if not disk_in_disk(rounded, disk):
        logger.debug("Dyadic rounding escaped the disk at %d bits; keeping the exact disk", bits)
        return disk
    return rounded
