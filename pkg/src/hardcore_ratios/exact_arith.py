from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from math import isqrt
from typing import Any, Iterable, List, Optional, Tuple, Union

import mpmath as mp

from .errors import ConstructionError, ParseError

Rational = Fraction
Number = Union[int, Fraction, "GaussianRational"]

_NUM = r"(?:\d+(?:\.\d*)?|\.\d+)(?:/\d+)?"
_GQ_PATTERN = re.compile(
    rf"^(?P<re>[+-]?{_NUM})?(?P<im>[+-]?(?:{_NUM})?\*?i)?$"
)


def _bits(n: int) -> int:
    """Bit length of |n| plus one sign bit."""
    return abs(n).bit_length() + 1


def _parse_fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as e:
        raise ParseError(f"invalid rational '{text}': {e}") from e


def parse_rational(text: str) -> Fraction:
    """Parse `a/b`, `a` or a decimal into an exact rational."""
    cleaned = text.strip().replace("−", "-")
    if not cleaned:
        raise ParseError("empty rational")
    return _parse_fraction(cleaned)


def format_rational(q: Fraction) -> str:
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


# --- Size measure ---
@dataclass(frozen=True)
class SizeMeasure:
    bits: int

    def __post_init__(self) -> None:
        if self.bits < 0:
            raise ValueError("size must be nonnegative")

    def __add__(self, other: "SizeMeasure") -> "SizeMeasure":
        return SizeMeasure(self.bits + other.bits)

    def __int__(self) -> int:
        return self.bits


# --- Gaussian rationals ---
@dataclass(frozen=True)
class GaussianRational:
    """Exact complex number re + im*i with rational parts."""

    re: Fraction = Fraction(0)
    im: Fraction = Fraction(0)

    def __post_init__(self) -> None:
        if not isinstance(self.re, Fraction):
            object.__setattr__(self, "re", Fraction(self.re))
        if not isinstance(self.im, Fraction):
            object.__setattr__(self, "im", Fraction(self.im))

    # construction
    @classmethod
    def coerce(cls, value: Any) -> "GaussianRational":
        if isinstance(value, GaussianRational):
            return value
        if isinstance(value, (int, Fraction)):
            return cls(Fraction(value))
        if isinstance(value, str):
            return cls.parse(value)
        raise TypeError(f"cannot convert {type(value).__name__} to GaussianRational")

    @classmethod
    def parse(cls, text: str) -> "GaussianRational":
        """Parse the `a/b+c/di` format (signs optional, `/1` omissible)."""
        cleaned = text.strip().replace("−", "-").replace(" ", "").replace("j", "i")
        match = _GQ_PATTERN.match(cleaned)
        if not cleaned or match is None or (match.group("re") is None and match.group("im") is None):
            raise ParseError(f"invalid Gaussian rational '{text}'")
        real_text, imag_text = match.group("re"), match.group("im")
        if real_text is not None and imag_text is not None and imag_text[0] not in "+-":
            # "3i" and "1/2i": the coefficient was captured as the real part
            if imag_text.lstrip("*") != "i":
                raise ParseError(f"invalid Gaussian rational '{text}'")
            real_text, imag_text = None, real_text + "i"
        real = _parse_fraction(real_text) if real_text else Fraction(0)
        imag = Fraction(0)
        if imag_text:
            coeff = imag_text[:-1].rstrip("*")
            if coeff in ("", "+"):
                imag = Fraction(1)
            elif coeff == "-":
                imag = Fraction(-1)
            else:
                imag = _parse_fraction(coeff)
        return cls(real, imag)

    @classmethod
    def from_complex(cls, value: Any, bits: int) -> "GaussianRational":
        """Round a floating complex to the dyadic grid of spacing 2^-bits."""
        scale = 2 ** bits
        with mp.workprec(max(mp.mp.prec, bits + 64)):
            z = mp.mpc(value)
            re_int = int(mp.nint(mp.ldexp(z.real, bits)))
            im_int = int(mp.nint(mp.ldexp(z.imag, bits)))
        return cls(Fraction(re_int, scale), Fraction(im_int, scale))

    # predicates
    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def is_real(self) -> bool:
        return self.im == 0

    # arithmetic
    def __neg__(self) -> "GaussianRational":
        return GaussianRational(-self.re, -self.im)

    def __add__(self, other: Any) -> "GaussianRational":
        o = _try_coerce(other)
        if o is None:
            return NotImplemented
        return GaussianRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other: Any) -> "GaussianRational":
        o = _try_coerce(other)
        if o is None:
            return NotImplemented
        return GaussianRational(self.re - o.re, self.im - o.im)

    def __rsub__(self, other: Any) -> "GaussianRational":
        o = _try_coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other: Any) -> "GaussianRational":
        o = _try_coerce(other)
        if o is None:
            return NotImplemented
        if o.im == 0:
            return GaussianRational(self.re * o.re, self.im * o.re)
        return GaussianRational(
            self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re
        )

    __rmul__ = __mul__

    def __truediv__(self, other: Any) -> "GaussianRational":
        o = _try_coerce(other)
        if o is None:
            return NotImplemented
        if o.is_zero():
            raise ZeroDivisionError("division by zero Gaussian rational")
        if o.im == 0:
            return GaussianRational(self.re / o.re, self.im / o.re)
        return self * o.reciprocal()

    def __rtruediv__(self, other: Any) -> "GaussianRational":
        o = _try_coerce(other)
        if o is None:
            return NotImplemented
        return o / self

    def __pow__(self, exponent: int) -> "GaussianRational":
        if not isinstance(exponent, int):
            return NotImplemented
        if exponent < 0:
            return self.reciprocal() ** (-exponent)
        result = ONE
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def reciprocal(self) -> "GaussianRational":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("reciprocal of zero")
        return GaussianRational(self.re / n, -self.im / n)

    def conjugate(self) -> "GaussianRational":
        return GaussianRational(self.re, -self.im)

    def norm(self) -> Fraction:
        """Squared modulus |z|^2, exact."""
        return self.re * self.re + self.im * self.im

    def __eq__(self, other: object) -> bool:
        o = _try_coerce(other)
        if o is None:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self) -> int:
        return hash((self.re, self.im))

    # conversions
    def to_complex(self) -> complex:
        return complex(float(self.re), float(self.im))

    def to_mpc(self) -> mp.mpc:
        return mp.mpc(
            mp.mpf(self.re.numerator) / self.re.denominator,
            mp.mpf(self.im.numerator) / self.im.denominator,
        )

    def bit_size(self) -> SizeMeasure:
        return bit_size(self)

    def __str__(self) -> str:
        if self.im == 0:
            return format_rational(self.re)
        if self.im == 1:
            imag = "i"
        elif self.im == -1:
            imag = "-i"
        else:
            imag = f"{format_rational(self.im)}i"
        if self.re == 0:
            return imag
        sign = "" if imag.startswith("-") else "+"
        return f"{format_rational(self.re)}{sign}{imag}"

    def __repr__(self) -> str:
        return f"GaussianRational('{self}')"


def _try_coerce(value: Any) -> Optional[GaussianRational]:
    if isinstance(value, GaussianRational):
        return value
    if isinstance(value, (int, Fraction)):
        return GaussianRational(Fraction(value))
    return None


ZERO = GaussianRational(Fraction(0))
ONE = GaussianRational(Fraction(1))
I = GaussianRational(Fraction(0), Fraction(1))


def bit_size(x: Union[GaussianRational, Fraction, int]) -> SizeMeasure:
    """Sum of the bit sizes of numerators and denominators."""
    if isinstance(x, GaussianRational):
        parts: Iterable[Fraction] = (x.re, x.im)
    else:
        parts = (Fraction(x),)
    return SizeMeasure(sum(_bits(q.numerator) + _bits(q.denominator) for q in parts))


def size_of(*values: Union[GaussianRational, Fraction, int]) -> SizeMeasure:
    total = SizeMeasure(0)
    for v in values:
        total = total + bit_size(v)
    return total


# --- Square roots ---
def rational_sqrt(q: Fraction) -> Optional[Fraction]:
    """Exact square root of a nonnegative rational, or None if irrational."""
    if q < 0:
        return None
    n, d = q.numerator, q.denominator
    rn, rd = isqrt(n), isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Fraction(rn, rd)
    return None


def sqrt_lower(q: Fraction, bits: int = 64) -> Fraction:
    """Dyadic rational s with s <= sqrt(q) and sqrt(q) - s < 2^-bits."""
    if q <= 0:
        return Fraction(0)
    scaled = (q.numerator << (2 * bits)) // q.denominator
    return Fraction(isqrt(scaled), 1 << bits)


def sqrt_upper(q: Fraction, bits: int = 64) -> Fraction:
    """Dyadic rational s with s >= sqrt(q) and s - sqrt(q) < 2^-bits."""
    if q <= 0:
        return Fraction(0)
    num = q.numerator << (2 * bits)
    scaled = -((-num) // q.denominator)
    s = isqrt(scaled)
    if s * s < scaled:
        s += 1
    return Fraction(s, 1 << bits)


def gaussian_sqrt(z: GaussianRational) -> Optional[GaussianRational]:
    """Exact square root in Q(i) when one exists."""
    if z.is_zero():
        return ZERO
    modulus = rational_sqrt(z.norm())
    if modulus is None:
        return None
    x = rational_sqrt((modulus + z.re) / 2)
    y = rational_sqrt((modulus - z.re) / 2)
    if x is None or y is None:
        return None
    root = GaussianRational(x, y if z.im >= 0 else -y)
    if root * root != z:
        return None
    return root


# --- Disks ---
class PointLocation(Enum):
    INSIDE = "inside"
    ON_BOUNDARY = "on_boundary"
    OUTSIDE = "outside"


def _circumcenter_of(
    p1: GaussianRational, p2: GaussianRational, p3: GaussianRational
) -> GaussianRational:
    x1, y1, x2, y2, x3, y3 = p1.re, p1.im, p2.re, p2.im, p3.re, p3.im
    d = 2 * (x1 * (y2 - y3) + x2 * (y3 - y1) + x3 * (y1 - y2))
    if d == 0:
        raise ConstructionError(f"collinear boundary points {p1}, {p2}, {p3}")
    s1, s2, s3 = x1 * x1 + y1 * y1, x2 * x2 + y2 * y2, x3 * x3 + y3 * y3
    x = (s1 * (y2 - y3) + s2 * (y3 - y1) + s3 * (y1 - y2)) / d
    y = (s1 * (x3 - x2) + s2 * (x1 - x3) + s3 * (x2 - x1)) / d
    return GaussianRational(x, y)


@dataclass(frozen=True)
class RationalDisk:
    """Open disk given by three distinct rational points on its boundary."""

    p1: GaussianRational
    p2: GaussianRational
    p3: GaussianRational
    center: GaussianRational = field(init=False, repr=False, compare=False)
    radius_squared: Fraction = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        pts = tuple(GaussianRational.coerce(p) for p in (self.p1, self.p2, self.p3))
        object.__setattr__(self, "p1", pts[0])
        object.__setattr__(self, "p2", pts[1])
        object.__setattr__(self, "p3", pts[2])
        if pts[0] == pts[1] or pts[1] == pts[2] or pts[0] == pts[2]:
            raise ConstructionError("boundary points must be pairwise distinct")
        c = _circumcenter_of(*pts)
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "radius_squared", (pts[0] - c).norm())

    @classmethod
    def from_center_radius(cls, c: Any, r: Fraction) -> "RationalDisk":
        c = GaussianRational.coerce(c)
        r = Fraction(r)
        if r <= 0:
            raise ConstructionError("radius must be positive")
        return cls(c + r, c + GaussianRational(0, r), c - r)

    @classmethod
    def from_center_through(cls, c: Any, p: Any) -> "RationalDisk":
        """Disk centered at c whose boundary passes through p."""
        c, p = GaussianRational.coerce(c), GaussianRational.coerce(p)
        v = p - c
        if v.is_zero():
            raise ConstructionError("boundary point coincides with center")
        return cls(p, c + I * v, c - v)

    @property
    def points(self) -> Tuple[GaussianRational, GaussianRational, GaussianRational]:
        return (self.p1, self.p2, self.p3)

    def locate(self, q: Any) -> PointLocation:
        return contains_point(self, q)

    def radius_bounds(self, bits: int = 64) -> Tuple[Fraction, Fraction]:
        return sqrt_lower(self.radius_squared, bits), sqrt_upper(self.radius_squared, bits)

    def float_center(self) -> complex:
        return self.center.to_complex()

    def float_radius(self) -> float:
        return float(self.radius_squared) ** 0.5

    def to_json(self) -> List[str]:
        return [str(p) for p in self.points]

    @classmethod
    def from_json(cls, data: List[str]) -> "RationalDisk":
        if len(data) != 3:
            raise ParseError("a disk needs exactly three boundary points")
        return cls(*(GaussianRational.parse(s) for s in data))


def circumcenter(d: RationalDisk) -> GaussianRational:
    return d.center


def squared_radius(d: RationalDisk) -> Fraction:
    return d.radius_squared


def contains_point(d: RationalDisk, q: Any) -> PointLocation:
    """Exact location of q relative to the open disk d."""
    gap = (GaussianRational.coerce(q) - d.center).norm() - d.radius_squared
    if gap < 0:
        return PointLocation.INSIDE
    if gap == 0:
        return PointLocation.ON_BOUNDARY
    return PointLocation.OUTSIDE


def disk_in_disk(inner: RationalDisk, outer: RationalDisk, strict: bool = False) -> bool:
    """Exact containment of `inner` in `outer`, square-root free.

    Non-strict: inner is contained in outer (internal tangency allowed).
    Strict: the closure of inner lies in the open disk outer.
    """
    a, b = outer.radius_squared, inner.radius_squared
    dist = (inner.center - outer.center).norm()
    s = a + b - dist
    if strict:
        return a > b and s > 0 and s * s > 4 * a * b
    return a >= b and s >= 0 and s * s >= 4 * a * b
