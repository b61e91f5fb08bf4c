from __future__ import annotations

from fractions import Fraction
from typing import List, Optional, Tuple, Union

import mpmath as mp
import sympy

from ..config import FIXED_POINT_PREC
from ..errors import DomainError
from ..graph_core import independence_polynomial, path

# cos(t*pi) is rational only at these t in (0, 1)
_RATIONAL_COSINES = {
    Fraction(1, 2): Fraction(0),
    Fraction(1, 3): Fraction(1, 2),
    Fraction(2, 3): Fraction(-1, 2),
}


def delta2_zero(t: Fraction, prec: int = FIXED_POINT_PREC) -> Union[Fraction, mp.mpf]:
    """-1/(2(1 + cos(t*pi))) for rational t in (0, 1)."""
    t = Fraction(t)
    if not 0 < t < 1:
        raise DomainError(f"t must lie in (0, 1), got {t}")
    if t in _RATIONAL_COSINES:
        return Fraction(-1) / (2 * (1 + _RATIONAL_COSINES[t]))
    with mp.workprec(prec):
        return -1 / (2 * (1 + mp.cospi(mp.mpf(t.numerator) / t.denominator)))


def path_polynomial(n: int) -> List[int]:
    """Coefficients (lowest degree first) of Z_{P_n}."""
    return independence_polynomial(path(n, 2))


def path_zero_intervals(n: int, eps: Fraction = Fraction(1, 10**12)) -> List[Tuple[Fraction, Fraction]]:
    """Exact isolating intervals of the real zeros of Z_{P_n}."""
    x = sympy.Symbol("x")
    coeffs = path_polynomial(n)
    poly = sympy.Poly(list(reversed(coeffs)), x, domain=sympy.ZZ)
    out = []
    for (lo, hi), _ in poly.intervals(eps=sympy.Rational(eps.numerator, eps.denominator)):
        out.append((Fraction(int(lo.p), int(lo.q)), Fraction(int(hi.p), int(hi.q))))
    return out


def delta2_zero_parameter(interval: Tuple[Fraction, Fraction], n: int, tol: float = 1e-9) -> Optional[Fraction]:
    """The t = 2k/(n+2) whose delta2_zero lies within `tol` of the interval."""
    lo, hi = interval
    mid = mp.mpf(lo.numerator) / lo.denominator / 2 + mp.mpf(hi.numerator) / hi.denominator / 2
    for k in range(1, n + 2):
        t = Fraction(2 * k, n + 2)
        if not 0 < t < 1:
            continue
        value = delta2_zero(t)
        value = mp.mpf(value.numerator) / value.denominator if isinstance(value, Fraction) else value
        if abs(value - mid) < tol:
            return t
    return None
