"""The derivative sector and the seed pair that places a contracting g at a point."""
from __future__ import annotations

import logging
from contextlib import contextmanager
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Iterator, Tuple

import mpmath as mp
from mpmath import iv

from ..config import (
    FIXED_POINT_PREC,
    INTERVAL_PREC,
    SECTOR_ARG_WIDTH,
    SECTOR_MODULUS_HIGH,
    SECTOR_MODULUS_LOW,
)
from ..errors import DegenerateSeed
from ..exact_arith import GaussianRational

logger = logging.getLogger("hardcore")


@contextmanager
def interval_precision(bits: int) -> Iterator[None]:
    """Temporarily set the working precision of the interval context."""
    saved = iv.prec
    iv.prec = bits
    try:
        yield
    finally:
        iv.prec = saved


def iv_rational(q: Fraction) -> Any:
    q = Fraction(q)
    return iv.mpf(q.numerator) / iv.mpf(q.denominator)


def _definitely(comparison: Any) -> bool:
    return comparison is True


@dataclass(frozen=True)
class SectorSpec:
    """The open annular sector 2pi/3 - w < arg z < 2pi/3, m_lo < |z| < m_hi."""

    modulus_low: Fraction = SECTOR_MODULUS_LOW
    modulus_high: Fraction = SECTOR_MODULUS_HIGH
    arg_width: str = SECTOR_ARG_WIDTH

    def arg_bounds(self) -> Tuple[Any, Any]:
        """Interval enclosures of the two bounding angles."""
        high = 2 * iv.pi / 3
        return high - iv.mpf(self.arg_width), high

    def midpoint(self, prec: int = FIXED_POINT_PREC) -> mp.mpc:
        """Geometric-mean modulus, mid arg."""
        with mp.workprec(prec):
            product = self.modulus_low * self.modulus_high
            modulus = mp.sqrt(mp.mpf(product.numerator) / product.denominator)
            arg = 2 * mp.pi / 3 - mp.mpf(self.arg_width) / 2
            return modulus * mp.expj(arg)

    def _arg_window(self, direction: GaussianRational, spread: Any) -> bool:
        low, high = self.arg_bounds()
        low, high = low + spread, high - spread
        if not _definitely(high > low):
            return False
        x, y = iv_rational(direction.re), iv_rational(direction.im)
        # Im(direction * e^{-i low}) > 0 and Im(direction * e^{-i high}) < 0
        left = y * iv.cos(low) - x * iv.sin(low)
        right = y * iv.cos(high) - x * iv.sin(high)
        return _definitely(left > 0) and _definitely(right < 0)

    def contains(self, z: Any, prec: int = INTERVAL_PREC) -> bool:
        """Membership of an exact point; the modulus test is exact, the arg test interval-certified."""
        z = GaussianRational.coerce(z)
        n = z.norm()
        if not (self.modulus_low**2 < n < self.modulus_high**2):
            return False
        with interval_precision(prec):
            return self._arg_window(z, iv.mpf(0))

    def contains_range(self, direction: GaussianRational, spread: Any, modulus: Tuple[Any, Any], prec: int = INTERVAL_PREC) -> bool:
        """True when every value with modulus in `modulus` and arg within `spread` of
        arg(direction) lies in the sector."""
        with interval_precision(prec):
            lo, hi = modulus
            if not (_definitely(lo > iv_rational(self.modulus_low)) and _definitely(hi < iv_rational(self.modulus_high))):
                return False
            return self._arg_window(direction, spread)

    def float_contains(self, w: complex, slack: float = 0.0) -> bool:
        """Cheap floating check, shrunk by `slack` on the arg side."""
        if w == 0:
            return False
        modulus = abs(w)
        arg = mp.arg(mp.mpc(w))
        high = 2 * mp.pi / 3
        low = high - mp.mpf(self.arg_width)
        return (
            float(self.modulus_low) < modulus < float(self.modulus_high)
            and low + slack < arg < high - slack
        )


def seed_pair(z0: Any, alpha: Any, prec: int = FIXED_POINT_PREC) -> Tuple[mp.mpc, mp.mpc]:
    """(mu0, chi0) with g_{mu0,chi0}(z0) = z0 and g'_{mu0,chi0}(z0) = alpha."""
    with mp.workprec(prec):
        z = z0.to_mpc() if isinstance(z0, GaussianRational) else mp.mpc(z0)
        a = alpha.to_mpc() if isinstance(alpha, GaussianRational) else mp.mpc(alpha)
        tiny = mp.mpf(2) ** (-(prec - 16))
        if abs(z) <= tiny or abs(z + 1) <= tiny:
            raise DegenerateSeed(f"seed point {mp.nstr(z, 8)} is excluded")
        if abs(a) <= tiny:
            raise DegenerateSeed("derivative target must be non-zero")
        den = z - (z + 1) * a
        if abs(den) <= tiny * max(1, abs(z)):
            raise DegenerateSeed("derivative target equals z0/(z0+1)")
        chi = (z + 1) ** 2 * a / den
        mu = z * (z + chi + 1) / (z + 1)
    return mu, chi


def seed_residuals(z0: Any, alpha: Any, mu: Any, chi: Any, prec: int = FIXED_POINT_PREC) -> Tuple[mp.mpf, mp.mpf]:
    """|g(z0) - z0| and |g'(z0) - alpha| for g = f_mu o f_chi."""
    with mp.workprec(prec):
        z, a, m, c = (mp.mpc(x.to_mpc() if isinstance(x, GaussianRational) else x) for x in (z0, alpha, mu, chi))
        w = 1 + z + c
        image = m * (1 + z) / w
        derivative = m * c / (w * w)
        return abs(image - z), abs(derivative - a)


def rational_seed_pair(z: GaussianRational, alpha: Any, bits: int) -> Tuple[GaussianRational, GaussianRational]:
    """Round chi to `bits` and solve mu exactly, so that z stays an exact fixed point."""
    _, chi0 = seed_pair(z, alpha)
    chi = GaussianRational.from_complex(chi0, bits)
    one_z = 1 + z
    mu = z * (one_z + chi) / one_z
    return mu, chi
