from __future__ import annotations

import logging
from fractions import Fraction
from typing import Any, List, Optional

import mpmath as mp

from ..config import CARDIOID_MARGIN_BITS, CARDIOID_PREC
from ..datamodels import RegionStatus, RegionVerdict
from ..exact_arith import ONE, GaussianRational
from ..rootfinding import find_roots
from .base import Region
from .shearer import _check_delta

logger = logging.getLogger("hardcore")


def _z_polynomial(lam: mp.mpc, delta: int) -> List[mp.mpc]:
    """Coefficients (highest first) of lam*(1-z)^delta - z."""
    coeffs = [mp.mpc(0)] * (delta + 1)
    for k in range(delta + 1):
        # coefficient of z^k in (1-z)^delta
        coeffs[delta - k] = lam * mp.binomial(delta, k) * (-1) ** k
    coeffs[delta - 1] -= 1
    return coeffs


def _exact_boundary_point(lam: GaussianRational, delta: int, candidates: List[GaussianRational]) -> Optional[GaussianRational]:
    rho2 = Fraction(1, (delta - 1) ** 2)
    for z in candidates:
        if z.norm() == rho2 and lam * (ONE - z) ** delta == z:
            return z
    return None


def _rational_guess(z: mp.mpc) -> GaussianRational:
    return GaussianRational(
        Fraction(float(z.real)).limit_denominator(10**6),
        Fraction(float(z.imag)).limit_denominator(10**6),
    )


def cardioid_contains(lam: Any, delta: int, prec: int = CARDIOID_PREC) -> RegionVerdict:
    """Membership in {z/(1-z)^delta : |z| <= 1/(delta-1)}."""
    _check_delta(delta)
    exact_lam = lam if isinstance(lam, (GaussianRational, int, Fraction)) else None
    if exact_lam is not None:
        exact_lam = GaussianRational.coerce(exact_lam)
        if exact_lam.is_zero():
            return RegionVerdict("cardioid", RegionStatus.INSIDE, witness=0j, margin=None, exact=True)
        rho = Fraction(1, delta - 1)
        hit = _exact_boundary_point(exact_lam, delta, [GaussianRational(-rho), GaussianRational(rho)])
        if hit is not None:
            return RegionVerdict("cardioid", RegionStatus.BOUNDARY, witness=hit.to_complex(), margin=0.0, exact=True)
        lam_mp = exact_lam.to_mpc()
    else:
        lam_mp = mp.mpc(lam)
        if lam_mp == 0:
            return RegionVerdict("cardioid", RegionStatus.INSIDE, witness=0j, margin=None)

    with mp.workprec(prec):
        roots = find_roots(_z_polynomial(lam_mp, delta), prec)
        rho = mp.mpf(1) / (delta - 1)
        threshold = mp.mpf(2) ** -CARDIOID_MARGIN_BITS
        best = min(roots, key=lambda r: abs(r.value))
        margin = abs(best.value) - rho
        witness = complex(best.value)
        if any(abs(r.value) + r.radius < rho for r in roots) and margin < -threshold:
            return RegionVerdict("cardioid", RegionStatus.INSIDE, witness=witness, margin=float(margin))
        if all(abs(r.value) - r.radius > rho for r in roots) and margin > threshold:
            return RegionVerdict("cardioid", RegionStatus.OUTSIDE, witness=witness, margin=float(margin))

    if exact_lam is not None:
        hit = _exact_boundary_point(exact_lam, delta, [_rational_guess(r.value) for r in roots])
        if hit is not None:
            return RegionVerdict("cardioid", RegionStatus.BOUNDARY, witness=hit.to_complex(), margin=0.0, exact=True)
    logger.debug("Cardioid verdict for %s undecided, margin %s", lam, margin)
    return RegionVerdict("cardioid", RegionStatus.UNKNOWN, witness=witness, margin=float(margin))


def attracting_fixed_point(lam: Any, delta: int, prec: int = 128) -> Optional[complex]:
    """An attracting fixed point of z -> lam/(1+z)^(delta-1), if one exists."""
    _check_delta(delta)
    d = delta - 1
    lam_mp = GaussianRational.coerce(lam).to_mpc() if isinstance(lam, (GaussianRational, int, Fraction)) else mp.mpc(lam)
    with mp.workprec(prec):
        # z(1+z)^d - lam = 0
        coeffs = [mp.mpc(mp.binomial(d, k)) for k in range(d + 1)] + [mp.mpc(0)]
        coeffs[-1] -= lam_mp
        for root in find_roots(coeffs, prec):
            z = root.value
            if 1 + z == 0:
                continue
            if abs(d * z / (1 + z)) < 1:
                return complex(z)
    return None


def attracting_fixed_point_test(lam: Any, delta: int) -> bool:
    """Whether an attracting fixed point exists exactly when the cardioid verdict says inside.

    Boundary and undecided verdicts pass without a check.
    """
    verdict = cardioid_contains(lam, delta)
    if verdict.status not in (RegionStatus.INSIDE, RegionStatus.OUTSIDE):
        return True
    found = attracting_fixed_point(lam, delta) is not None
    if found != (verdict.status is RegionStatus.INSIDE):
        logger.warning("Fixed point at %s disagrees with cardioid verdict %s", lam, verdict.status.value)
        return False
    return True


def cardioid_boundary(delta: int, samples: int) -> List[complex]:
    """Points z/(1-z)^delta for z = e^{i theta}/(delta-1) on a uniform theta grid."""
    _check_delta(delta)
    points = []
    for k in range(samples):
        theta = 2 * mp.pi * k / samples
        z = mp.expj(theta) / (delta - 1)
        if z == 1:
            continue
        points.append(complex(z / (1 - z) ** delta))
    return points


class CardioidRegion(Region):
    name = "cardioid"

    def verdict(self, lam: Any, delta: int) -> RegionVerdict:
        return cardioid_contains(lam, delta, int(self.config.get("precision", CARDIOID_PREC)))
