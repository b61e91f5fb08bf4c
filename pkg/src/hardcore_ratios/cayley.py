"""Cayley-tree dynamics of f_{lambda,d}(z) = lambda/(1+z)^d.

Exact ratios and zeros of the depth-n tree T_n, and the spherical-derivative
activity field rendered in floating point.
"""
from __future__ import annotations

import csv
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, List, Optional, Sequence, Tuple, Union

import mpmath as mp
import numpy as np
import sympy

from .config import (
    CAYLEY_MAX_DEGREE,
    CAYLEY_MAX_DEPTH,
    ZERO_PRECISION_DIGITS,
)
from .errors import DomainError, PolynomialDegreeGuard
from .exact_arith import ONE, ZERO, GaussianRational
from .graph_core import PartitionPair
from .moebius import INFINITY, SpherePoint
from .rootfinding import aberth, polish

logger = logging.getLogger("hardcore")

MINUS_ONE = GaussianRational(-1)


def _is_exact(lam: Any) -> bool:
    return isinstance(lam, (GaussianRational, int, Fraction))


def f_lambda_d(lam: Any, d: int, z: SpherePoint) -> SpherePoint:
    """One step of z -> lam/(1+z)^d on the sphere."""
    if z is INFINITY:
        return ZERO if isinstance(lam, GaussianRational) else 0j
    base = 1 + z
    if base == 0:
        return INFINITY
    return lam / base**d


def cayley_orbit(lam: Any, d: int, n: int) -> List[SpherePoint]:
    """[f(0), f^2(0), ..., f^{n+1}(0)]; entry k is the ratio of T_k."""
    if d < 1 or n < 0:
        raise DomainError("need d >= 1 and n >= 0")
    lam = GaussianRational.coerce(lam) if _is_exact(lam) else complex(lam)
    z: SpherePoint = ZERO if isinstance(lam, GaussianRational) else 0j
    orbit = []
    for _ in range(n + 1):
        z = f_lambda_d(lam, d, z)
        orbit.append(z)
    return orbit


def cayley_ratio(lam: Any, d: int, n: int) -> SpherePoint:
    """R_{T_n} = f_{lam,d}^{n+1}(0)."""
    return cayley_orbit(lam, d, n)[-1]


def cayley_zero_condition(lam: Any, d: int, n: int, tol: float = 1e-12) -> bool:
    """Z_{T_n}(lam) = 0 exactly when the root ratio equals -1."""
    if _is_exact(lam):
        lam = GaussianRational.coerce(lam)
        if lam.is_zero():
            raise DomainError("zero condition needs lambda != 0")
        return cayley_ratio(lam, d, n) == MINUS_ONE
    if complex(lam) == 0:
        raise DomainError("zero condition needs lambda != 0")
    value = cayley_ratio(lam, d, n)
    return value is not INFINITY and abs(value + 1) < tol


def cayley_partition(lam: Any, d: int, n: int) -> PartitionPair:
    """Exact (Z^in, Z^out) of T_n through the pair recursion."""
    lam = GaussianRational.coerce(lam)
    z_in, z_out = lam, ONE
    for _ in range(n):
        z_in, z_out = lam * z_out**d, (z_in + z_out) ** d
    return PartitionPair(z_in, z_out)


# --- Zeros ---
_LAM = sympy.Symbol("lam")


def cayley_polynomials(d: int, n: int) -> Tuple[sympy.Poly, sympy.Poly]:
    """Integer polynomials (Z^in, Z^out) of T_n in lambda."""
    lam = sympy.Poly(_LAM, _LAM, domain=sympy.ZZ)
    z_in, z_out = lam, sympy.Poly(1, _LAM, domain=sympy.ZZ)
    for _ in range(n):
        z_in, z_out = lam * z_out**d, (z_in + z_out) ** d
    return z_in, z_out


def _tree_size(d: int, n: int) -> int:
    return n + 1 if d == 1 else (d ** (n + 1) - 1) // (d - 1)


@dataclass(frozen=True)
class ZeroEstimate:
    depth: int
    root: mp.mpc
    residual: mp.mpf
    certified: bool

    def as_complex(self) -> complex:
        return complex(self.root)


def _residual_bits(coeffs: Sequence[int], guesses: np.ndarray, digits: int) -> int:
    """Working precision so |Z(root)| can drop below 10^-digits."""
    spread = sum(abs(c) for c in coeffs).bit_length()
    reach = max([1.0] + [abs(complex(g)) for g in guesses]) * 1.1
    growth = int(np.ceil((len(coeffs) - 1) * np.log2(reach)))
    return 64 + 2 * (spread + growth) + int(np.ceil(digits * 3.33))


def cayley_zeros(d: int, n: int, precision: int = ZERO_PRECISION_DIGITS) -> List[ZeroEstimate]:
    """All zeros of Z_{T_n} with residuals from exact evaluation at rationalized roots."""
    if d < 1 or n < 0:
        raise DomainError("need d >= 1 and n >= 0")
    if n > CAYLEY_MAX_DEPTH:
        raise PolynomialDegreeGuard(f"depth {n} exceeds {CAYLEY_MAX_DEPTH}")
    degree = _tree_size(d, n)
    if degree > CAYLEY_MAX_DEGREE:
        raise PolynomialDegreeGuard(f"degree {degree} exceeds {CAYLEY_MAX_DEGREE}")

    z_in, z_out = cayley_polynomials(d, n)
    total = z_in + z_out
    coeffs = [int(c) for c in total.all_coeffs()]
    guesses = aberth(coeffs)
    bits = _residual_bits(coeffs, guesses, precision)
    logger.debug("Zeros of Z_T(d=%d, n=%d): degree %d at %d bits", d, n, len(coeffs) - 1, bits)

    bound = Fraction(1, 10**precision)
    out = []
    for estimate in polish(coeffs, guesses, bits):
        with mp.workprec(bits):
            rational = GaussianRational.from_complex(estimate.value, bits)
            value = cayley_partition(rational, d, n).total
            residual2 = value.norm()
            residual = mp.sqrt(mp.mpf(residual2.numerator) / residual2.denominator)
        certified = residual2 < bound * bound
        if not certified:
            logger.warning("Zero near %s at depth %d not certified (residual %s)", complex(estimate.value), n, mp.nstr(residual, 5))
        out.append(ZeroEstimate(n, estimate.value, residual, certified))
    out.sort(key=lambda z: (float(z.root.real), float(z.root.imag)))
    return out


def write_zeros_csv(path: str, zeros: Sequence[ZeroEstimate], digits: int = 20) -> None:
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["n", "re", "im", "residual"])
        for z in zeros:
            writer.writerow([z.depth, mp.nstr(z.root.real, digits), mp.nstr(z.root.imag, digits), mp.nstr(z.residual, 6)])


# --- Activity field ---
@dataclass(frozen=True)
class Rect:
    x0: float
    y0: float
    x1: float
    y1: float

    @classmethod
    def parse(cls, text: str) -> "Rect":
        parts = [float(p) for p in text.split(",")]
        if len(parts) != 4:
            raise ValueError("rect needs x0,y0,x1,y1")
        return cls(*parts)


@dataclass(frozen=True)
class ActivityField:
    rect: Rect
    resolution: Tuple[int, int]
    d: int
    depth: int
    values: np.ndarray

    def to_image(self, threshold: float) -> np.ndarray:
        """8-bit image, white where sigma >= threshold; row 0 is the top edge."""
        return np.where(self.values >= threshold, 255, 0).astype(np.uint8)


def _axis(lo: float, hi: float, count: int) -> np.ndarray:
    """Pixel centers, built so that a symmetric interval gives exactly negated values."""
    center = (lo + hi) / 2
    half = (hi - lo) / 2
    offsets = (2 * np.arange(count, dtype=np.float64) + 1 - count) / count * half
    return center + offsets


def _field_rows(lam: np.ndarray, d: int, depth: int) -> np.ndarray:
    r = lam.copy()
    dr = np.ones_like(lam)
    with np.errstate(all="ignore"):
        for _ in range(depth):
            base = 1 + r
            power = base
            for _ in range(d - 1):
                power = power * base
            inv = 1 / power
            dr = inv - d * lam * (inv / base) * dr
            r = lam * inv
        sigma = np.abs(dr) / (1 + np.abs(r) ** 2)
    return np.where(np.isfinite(sigma), sigma, np.inf)


def spherical_derivative_field(rect: Rect, resolution: Tuple[int, int], d: int, depth: int, threads: int = 1) -> ActivityField:
    """sigma = |R'_N|/(1+|R_N|^2) per pixel, R_0 = lam, R_{n+1} = lam/(1+R_n)^d."""
    if depth < 1:
        raise DomainError("depth must be at least 1")
    width, height = resolution
    xs = _axis(rect.x0, rect.x1, width)
    ys = _axis(rect.y0, rect.y1, height)[::-1]
    lam = xs[None, :] + 1j * ys[:, None]

    chunks = np.array_split(np.arange(height), max(1, threads))
    values = np.empty((height, width), dtype=np.float64)

    def work(rows: np.ndarray) -> None:
        if rows.size:
            values[rows] = _field_rows(lam[rows], d, depth)
            logger.debug("Rendered rows %d..%d", rows[0], rows[-1])

    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        list(pool.map(work, chunks))
    return ActivityField(rect, (width, height), d, depth, values)


def write_pgm(path: str, image: np.ndarray) -> None:
    height, width = image.shape
    with open(path, "wb") as f:
        f.write(f"P5\n{width} {height}\n255\n".encode("ascii"))
        f.write(np.ascontiguousarray(image, dtype=np.uint8).tobytes())


def write_polyline_csv(path: str, points: Sequence[complex], thetas: Optional[Sequence[float]] = None) -> None:
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["theta", "re", "im"])
        for k, p in enumerate(points):
            theta = thetas[k] if thetas is not None else k
            writer.writerow([repr(theta), repr(p.real), repr(p.imag)])
