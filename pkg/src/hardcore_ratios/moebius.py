"""Moebius transformations acting on the Riemann sphere.

A map is stored as the matrix ((a, b), (c, d)) acting by z -> (az+b)/(cz+d).
Entries are either all `GaussianRational` (exact maps) or all floating
(`mpmath.mpc` or builtin `complex`).
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Any, Optional, Tuple, Union

import mpmath as mp

from .config import FIXED_POINT_PREC
from .errors import DegenerateMap, NotADisk, ParseError, PoleError
from .exact_arith import (
    ONE,
    ZERO,
    GaussianRational,
    PointLocation,
    RationalDisk,
    contains_point,
    gaussian_sqrt,
)

logger = logging.getLogger("hardcore")


class _Infinity:
    """The point at infinity of the Riemann sphere."""

    _instance: Optional["_Infinity"] = None

    def __new__(cls) -> "_Infinity":
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "INFINITY"

    def __str__(self) -> str:
        return "inf"

    def __reduce__(self) -> str:
        return "INFINITY"


INFINITY = _Infinity()

Scalar = Union[GaussianRational, mp.mpc, complex]
SpherePoint = Union[GaussianRational, mp.mpc, complex, _Infinity]


def is_infinite(z: Any) -> bool:
    return z is INFINITY


def _is_zero(x: Scalar) -> bool:
    if isinstance(x, GaussianRational):
        return x.is_zero()
    return x == 0


class MoebiusKind(Enum):
    IDENTITY = "identity"
    ELLIPTIC = "elliptic"
    PARABOLIC = "parabolic"
    LOXODROMIC = "loxodromic"
    UNRELIABLE = "unreliable"


class FixedPointKind(Enum):
    ATTRACTING = "attracting"
    REPELLING = "repelling"
    NEUTRAL = "neutral"


@dataclass(frozen=True)
class FixedPoints:
    points: Tuple[SpherePoint, SpherePoint]
    kinds: Tuple[FixedPointKind, FixedPointKind]
    exact: bool
    precision: Optional[int] = None

    def of_kind(self, kind: FixedPointKind) -> Optional[SpherePoint]:
        for p, k in zip(self.points, self.kinds):
            if k is kind:
                return p
        return None

    @property
    def attracting(self) -> Optional[SpherePoint]:
        return self.of_kind(FixedPointKind.ATTRACTING)

    @property
    def repelling(self) -> Optional[SpherePoint]:
        return self.of_kind(FixedPointKind.REPELLING)


@dataclass(frozen=True)
class Moebius:
    a: Scalar
    b: Scalar
    c: Scalar
    d: Scalar

    def __post_init__(self) -> None:
        if _is_zero(self.det()):
            raise DegenerateMap("Moebius matrix is singular")

    @classmethod
    def exact(cls, a: Any, b: Any, c: Any, d: Any) -> "Moebius":
        coerce = GaussianRational.coerce
        return cls(coerce(a), coerce(b), coerce(c), coerce(d))

    @classmethod
    def identity(cls) -> "Moebius":
        return cls(ONE, ZERO, ZERO, ONE)

    @property
    def is_exact(self) -> bool:
        return all(isinstance(x, GaussianRational) for x in (self.a, self.b, self.c, self.d))

    def det(self) -> Scalar:
        return self.a * self.d - self.b * self.c

    def trace(self) -> Scalar:
        return self.a + self.d

    def to_mpc(self) -> "Moebius":
        def conv(x: Scalar) -> mp.mpc:
            return x.to_mpc() if isinstance(x, GaussianRational) else mp.mpc(x)

        return Moebius(conv(self.a), conv(self.b), conv(self.c), conv(self.d))

    def is_scalar(self) -> bool:
        return _is_zero(self.b) and _is_zero(self.c) and _is_zero(self.a - self.d)

    @property
    def pole(self) -> SpherePoint:
        """The point sent to infinity."""
        if _is_zero(self.c):
            return INFINITY
        return -self.d / self.c

    def __call__(self, z: SpherePoint) -> SpherePoint:
        if z is INFINITY:
            if _is_zero(self.c):
                return INFINITY
            return self.a / self.c
        den = self.c * z + self.d
        if _is_zero(den):
            return INFINITY
        return (self.a * z + self.b) / den

    def __matmul__(self, other: "Moebius") -> "Moebius":
        return compose(self, other)

    def to_text(self) -> str:
        """Row-major, whitespace separated entries."""
        if not self.is_exact:
            raise ValueError("only exact maps serialize")
        return " ".join(str(x) for x in (self.a, self.b, self.c, self.d))

    @classmethod
    def from_text(cls, text: str) -> "Moebius":
        parts = text.split()
        if len(parts) != 4:
            raise ParseError("a Moebius map needs four entries")
        return cls.exact(*(GaussianRational.parse(p) for p in parts))


def f_lambda(lam: Scalar) -> Moebius:
    """f_lambda(z) = lambda/(1+z) as the matrix ((0, lambda), (1, 1))."""
    if _is_zero(lam):
        raise DegenerateMap("f_lambda is constant for lambda = 0")
    if isinstance(lam, GaussianRational):
        return Moebius(ZERO, lam, ONE, ONE)
    lam = mp.mpc(lam)
    return Moebius(mp.mpc(0), lam, mp.mpc(1), mp.mpc(1))


def g_map(mu: Scalar, chi: Scalar) -> Moebius:
    """g = f_mu o f_chi, with matrix ((mu, mu), (1, 1+chi))."""
    return compose(f_lambda(mu), f_lambda(chi))


def compose(m1: Moebius, m2: Moebius) -> Moebius:
    """The map z -> m1(m2(z))."""
    return Moebius(
        m1.a * m2.a + m1.b * m2.c,
        m1.a * m2.b + m1.b * m2.d,
        m1.c * m2.a + m1.d * m2.c,
        m1.c * m2.b + m1.d * m2.d,
    )


def inverse(m: Moebius) -> Moebius:
    return Moebius(m.d, -m.b, -m.c, m.a)


def power(m: Moebius, n: int) -> Moebius:
    if n < 0:
        return power(inverse(m), -n)
    result = Moebius.identity() if m.is_exact else Moebius.identity().to_mpc()
    base = m
    while n:
        if n & 1:
            result = compose(result, base)
        base = compose(base, base)
        n >>= 1
    return result


def tr_squared(m: Moebius) -> Scalar:
    """tr(A)^2 / det(A); independent of the matrix representative."""
    t = m.trace()
    return t * t / m.det()


def _float_tolerance(x: Any) -> mp.mpf:
    if isinstance(x, complex):
        return mp.mpf(2) ** -40
    return mp.mpf(2) ** (-(mp.mp.prec - 16))


def classify(m: Moebius) -> MoebiusKind:
    if m.is_exact:
        if m.is_scalar():
            return MoebiusKind.IDENTITY
        t = tr_squared(m)
        if t.im == 0 and 0 <= t.re < 4:
            return MoebiusKind.ELLIPTIC
        if t == 4:
            return MoebiusKind.PARABOLIC
        return MoebiusKind.LOXODROMIC

    tol = _float_tolerance(m.a)
    scale = max(abs(m.a), abs(m.b), abs(m.c), abs(m.d))
    if abs(m.b) <= tol * scale and abs(m.c) <= tol * scale and abs(m.a - m.d) <= tol * scale:
        return MoebiusKind.UNRELIABLE
    t = mp.mpc(tr_squared(m))
    if abs(t - 4) <= tol * 4:
        return MoebiusKind.PARABOLIC
    if abs(t.imag) <= tol * max(1, abs(t)) and -tol <= t.real < 4:
        return MoebiusKind.ELLIPTIC
    return MoebiusKind.LOXODROMIC


def derivative_at(m: Moebius, z: SpherePoint) -> Scalar:
    """(ad - bc)/(cz + d)^2."""
    if z is INFINITY:
        raise PoleError("derivative at infinity is not a finite value")
    den = m.c * z + m.d
    if _is_zero(den):
        raise PoleError(f"derivative requested at the pole {z}")
    return m.det() / (den * den)


def _kind_from_multiplier(k: Scalar, exact: bool) -> FixedPointKind:
    if exact:
        n = k.norm()
        if n < 1:
            return FixedPointKind.ATTRACTING
        if n > 1:
            return FixedPointKind.REPELLING
        return FixedPointKind.NEUTRAL
    size = abs(mp.mpc(k))
    tol = _float_tolerance(k)
    if size < 1 - tol:
        return FixedPointKind.ATTRACTING
    if size > 1 + tol:
        return FixedPointKind.REPELLING
    return FixedPointKind.NEUTRAL


def _ordered(points: Tuple[SpherePoint, SpherePoint], kinds: Tuple[FixedPointKind, FixedPointKind]):
    order = {FixedPointKind.ATTRACTING: 0, FixedPointKind.NEUTRAL: 1, FixedPointKind.REPELLING: 2}
    pairs = sorted(zip(points, kinds), key=lambda pk: order[pk[1]])
    return (pairs[0][0], pairs[1][0]), (pairs[0][1], pairs[1][1])


def fixed_points(m: Moebius, prec: int = FIXED_POINT_PREC) -> FixedPoints:
    """Both fixed points, attracting first, tagged by the multiplier modulus."""
    if m.is_scalar():
        raise DegenerateMap("every point is fixed by the identity")

    if _is_zero(m.c):
        # affine map: infinity is fixed with multiplier d/a
        if _is_zero(m.a - m.d):
            return FixedPoints((INFINITY, INFINITY), (FixedPointKind.NEUTRAL,) * 2, m.is_exact)
        finite = m.b / (m.d - m.a)
        k_inf = m.d / m.a
        k_fin = m.a / m.d
        exact = m.is_exact
        points, kinds = _ordered(
            (finite, INFINITY), (_kind_from_multiplier(k_fin, exact), _kind_from_multiplier(k_inf, exact))
        )
        return FixedPoints(points, kinds, exact, None if exact else mp.mp.prec)

    disc = (m.d - m.a) * (m.d - m.a) + 4 * m.b * m.c
    if _is_zero(disc):
        z = (m.a - m.d) / (2 * m.c)
        return FixedPoints((z, z), (FixedPointKind.NEUTRAL,) * 2, m.is_exact)

    if m.is_exact:
        root = gaussian_sqrt(disc)
        if root is not None:
            z1 = (m.a - m.d + root) / (2 * m.c)
            z2 = (m.a - m.d - root) / (2 * m.c)
            kinds = tuple(
                _kind_from_multiplier(derivative_at(m, z), True) for z in (z1, z2)
            )
            points, kinds = _ordered((z1, z2), kinds)
            return FixedPoints(points, kinds, True)

    with mp.workprec(prec):
        mm = m.to_mpc()
        s = mp.sqrt((mm.d - mm.a) ** 2 + 4 * mm.b * mm.c)
        z1 = (mm.a - mm.d + s) / (2 * mm.c)
        z2 = (mm.a - mm.d - s) / (2 * mm.c)
        kinds = tuple(_kind_from_multiplier(derivative_at(mm, z), False) for z in (z1, z2))
        points, kinds = _ordered((z1, z2), kinds)
    logger.debug("Fixed points solved numerically at %d bits", prec)
    return FixedPoints(points, kinds, False, prec)


def disk_image(m: Moebius, disk: RationalDisk) -> RationalDisk:
    """Image of an open disk whose closure avoids the pole of m."""
    if not m.is_exact:
        raise NotADisk("disk images need exact coefficients")
    pole = m.pole
    if pole is not INFINITY and contains_point(disk, pole) is not PointLocation.OUTSIDE:
        raise NotADisk(f"pole {pole} lies in the closure of the disk")
    return RationalDisk(m(disk.p1), m(disk.p2), m(disk.p3))
