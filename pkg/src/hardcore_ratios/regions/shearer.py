from __future__ import annotations

from fractions import Fraction
from typing import Any

from ..datamodels import RegionStatus, RegionVerdict
from ..errors import DomainError
from ..exact_arith import GaussianRational
from .base import Region


def _check_delta(delta: int) -> None:
    if delta < 2:
        raise DomainError(f"degree bound must be at least 2, got {delta}")


def shearer_radius(delta: int) -> Fraction:
    """(delta-1)^(delta-1) / delta^delta."""
    _check_delta(delta)
    return Fraction((delta - 1) ** (delta - 1), delta**delta)


def lambda_star(delta: int) -> GaussianRational:
    """Where the cardioid meets the negative real axis."""
    return GaussianRational(-shearer_radius(delta))


def shearer_contains(lam: Any, delta: int) -> RegionVerdict:
    lam = GaussianRational.coerce(lam)
    radius = shearer_radius(delta)
    gap = radius * radius - lam.norm()
    if gap > 0:
        status = RegionStatus.INSIDE
    elif gap == 0:
        status = RegionStatus.BOUNDARY
    else:
        status = RegionStatus.OUTSIDE
    margin = float(radius) - abs(lam.to_complex())
    return RegionVerdict("shearer", status, margin=margin, exact=True)


class ShearerRegion(Region):
    name = "shearer"

    def verdict(self, lam: Any, delta: int) -> RegionVerdict:
        return shearer_contains(lam, delta)
