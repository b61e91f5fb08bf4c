"""Simultaneous polynomial root finding with multiprecision polishing.

Coefficient sequences are highest degree first, as in `numpy.polyval` and
`mpmath.polyval`.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Any, List, Sequence

import mpmath as mp
import numpy as np

from .config import ABERTH_MAX_ITER

logger = logging.getLogger("hardcore")


@dataclass(frozen=True)
class RootEstimate:
    value: mp.mpc
    # a true root lies within this distance (Newton inclusion radius)
    radius: mp.mpf
    converged: bool


def _to_float_coeffs(coeffs: Sequence[Any]) -> np.ndarray:
    as_mp = [mp.mpc(c) for c in coeffs]
    scale = max(abs(c) for c in as_mp)
    if scale == 0:
        raise ValueError("zero polynomial")
    return np.array([complex(c / scale) for c in as_mp], dtype=np.complex128)


def _newton_ratio(coeffs: np.ndarray, z: np.ndarray) -> np.ndarray:
    """p(z)/p'(z), evaluated through the reversed polynomial when |z| > 1."""
    n = coeffs.shape[0] - 1
    inner = np.abs(z) <= 1.0
    w = np.where(inner, z, 1.0 / np.where(z == 0, 1.0, z))
    poly = np.where(inner[:, None], coeffs[None, :], coeffs[None, ::-1])
    p = np.zeros_like(z)
    dp = np.zeros_like(z)
    for k in range(n + 1):
        dp = dp * w + p
        p = p * w + poly[:, k]
    with np.errstate(divide="ignore", invalid="ignore"):
        direct = p / dp
        reversed_ = z * p / (n * p - w * dp)
    return np.where(inner, direct, reversed_)


def aberth(coeffs: Sequence[Any], tol: float = 1e-14, max_iter: int = ABERTH_MAX_ITER) -> np.ndarray:
    """Double-precision Aberth-Ehrlich iteration for all roots."""
    c = _to_float_coeffs(coeffs)
    while c.shape[0] > 1 and c[0] == 0:
        c = c[1:]
    n = c.shape[0] - 1
    if n < 1:
        return np.zeros(0, dtype=np.complex128)
    if n == 1:
        return np.array([-c[1] / c[0]], dtype=np.complex128)

    # initial guesses on a circle sized by the coefficient geometric mean
    radius = abs(c[-1] / c[0]) ** (1.0 / n) if c[-1] != 0 else 0.5
    radius = radius if np.isfinite(radius) and radius > 0 else 1.0
    angles = 2 * np.pi * np.arange(n) / n + 0.4
    z = radius * np.exp(1j * angles)

    for it in range(max_iter):
        ratio = _newton_ratio(c, z)
        diff = z[:, None] - z[None, :]
        np.fill_diagonal(diff, 1.0)
        inv = 1.0 / diff
        np.fill_diagonal(inv, 0.0)
        sums = inv.sum(axis=1)
        with np.errstate(divide="ignore", invalid="ignore"):
            step = ratio / (1.0 - ratio * sums)
        step = np.where(np.isfinite(step), step, 0.0)
        z = z - step
        if np.all(np.abs(step) <= tol * np.maximum(1.0, np.abs(z))):
            logger.debug("Aberth converged after %d iterations (degree %d)", it + 1, n)
            break
    else:
        logger.warning("Aberth iteration hit %d steps without converging (degree %d)", max_iter, n)
    return z


def polish(coeffs: Sequence[Any], guesses: Sequence[complex], prec: int, max_steps: int = 80) -> List[RootEstimate]:
    """Newton-refine each guess at `prec` bits and attach an inclusion radius."""
    n = len(coeffs) - 1
    out: List[RootEstimate] = []
    with mp.workprec(prec):
        mp_coeffs = [mp.mpc(c) for c in coeffs]
        tiny = mp.mpf(2) ** (-(prec - 8))
        for g in guesses:
            x = mp.mpc(g)
            converged = False
            for _ in range(max_steps):
                p, dp = mp.polyval(mp_coeffs, x, derivative=True)
                if dp == 0:
                    break
                step = p / dp
                x -= step
                if abs(step) <= tiny * max(1, abs(x)):
                    converged = True
                    break
            p, dp = mp.polyval(mp_coeffs, x, derivative=True)
            radius = n * abs(p / dp) if dp != 0 else mp.inf
            out.append(RootEstimate(x, radius, converged))
    return out


def find_roots(coeffs: Sequence[Any], prec: int) -> List[RootEstimate]:
    """All roots: Aberth in double precision, then multiprecision Newton."""
    return polish(coeffs, aberth(coeffs), prec)
