from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import isqrt
from typing import Any, List, Tuple

from ..datamodels import RegionStatus, RegionVerdict
from ..errors import DomainError
from ..exact_arith import GaussianRational
from .base import Region


@lru_cache(maxsize=None)
def _candidates(delta: int) -> Tuple[GaussianRational, ...]:
    bound = Fraction(delta**delta, (delta - 1) ** (delta - 1))
    bound2 = bound * bound
    reach = isqrt(int(bound2)) + 1
    pairs = []
    for a in range(-reach, reach + 1):
        for b in range(-reach, reach + 1):
            n = a * a + b * b
            if 0 < n <= bound2:
                pairs.append((n, a, b))
    pairs.sort()
    return tuple(GaussianRational(a, b).reciprocal() for _, a, b in pairs)


def exceptional_candidates(delta: int) -> List[GaussianRational]:
    """Reciprocals of Gaussian integers of modulus at most delta^delta/(delta-1)^(delta-1)."""
    if delta < 3:
        raise DomainError("exceptional candidates are defined for delta >= 3")
    return list(_candidates(delta))


def is_exceptional_candidate(lam: Any, delta: int) -> bool:
    lam = GaussianRational.coerce(lam)
    if lam.is_zero():
        return False
    return lam in set(_candidates(delta))


class ExceptionalRegion(Region):
    name = "exceptional"

    def verdict(self, lam: Any, delta: int) -> RegionVerdict:
        status = RegionStatus.INSIDE if is_exceptional_candidate(lam, delta) else RegionStatus.OUTSIDE
        return RegionVerdict("exceptional", status, exact=True)
