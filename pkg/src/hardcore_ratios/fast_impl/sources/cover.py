"""Contracting covers: catalog words that carry a disk W over itself.

Every point of W lies in the image of W under some word of the cover and every
word contracts W. Pulling a target back through such words relaxes its tolerance
by the word's derivative at each step, so a short catalog ratio is eventually close
enough to stop; read back in reverse, the words approximate the target as closely
as double precision allows.
"""
from __future__ import annotations

import logging
import math
import random
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.spatial import cKDTree

logger = logging.getLogger("hardcore")

Blocks = Tuple[int, ...]
BaseLookup = Callable[[complex, float], Optional[Blocks]]

# below this the pull-backs are lost in double precision rounding
MIN_TOLERANCE = 1e-12
SAMPLE_STEPS = 10
ENTRY_DEPTH = 0.9
MIN_DEPTH = 0.1
REFINE_ATTEMPTS = 3
SAFETY = 0.5


# --- Words as maps y -> f_{r_k}(...f_{r_1}(y)) ---
def word_value(ratios: Sequence[complex], blocks: Blocks, z: complex = 0j) -> complex:
    for b in blocks:
        z = ratios[b] / (1 + z)
    return z


def word_derivative(ratios: Sequence[complex], blocks: Blocks, y: complex) -> float:
    """|d/dy| of the word at y, the product of |r|/|1+z|^2 along the path."""
    scale = 1.0
    z = y
    for b in blocks:
        r = ratios[b]
        scale *= abs(r) / abs(1 + z) ** 2
        z = r / (1 + z)
    return scale


def pull_back(ratios: Sequence[complex], blocks: Blocks, t: complex) -> complex:
    """The y with word(y) = t, peeling y = r/t - 1 from the outermost block in."""
    for b in reversed(blocks):
        t = ratios[b] / t - 1
    return t


def _word_matrices(ratios: np.ndarray, limit: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray, int]:
    """(a, b, d) of every word of one or two of the first `limit` ratios, as
    y -> (a y + b)/(y + d).

    Word k < m is (k,); word m + i*m + j is (i, j) with i applied first.
    """
    m = min(limit, len(ratios))
    r = ratios[:m]
    inner = np.repeat(r, m)
    outer = np.tile(r, m)
    a = np.concatenate([np.zeros(m, dtype=np.complex128), outer])
    b = np.concatenate([r, outer])
    d = np.concatenate([np.ones(m, dtype=np.complex128), 1 + inner])
    return a, b, d, m


def _decode(k: int, m: int) -> Blocks:
    if k < m:
        return (k,)
    k -= m
    return (k // m, k % m)


def _samples(center: complex, radius: float, step: float) -> np.ndarray:
    """A hexagonal grid over the disk plus a ring on its boundary."""
    n = int(radius / step) + 2
    j, i = np.meshgrid(np.arange(-2 * n, 2 * n + 1), np.arange(-n, n + 1), indexing="ij")
    points = (i + (j % 2) / 2) * step + 1j * j * step * math.sqrt(3) / 2
    points = points.reshape(-1)
    points = points[np.abs(points) <= radius]
    count = int(2 * math.pi * radius / step) + 1
    ring = radius * np.exp(2j * math.pi * np.arange(count) / count)
    return center + np.concatenate([points, ring])


@dataclass
class ContractingCover:
    center: complex
    radius: float
    words: List[Blocks]
    a: np.ndarray
    b: np.ndarray
    d: np.ndarray
    centers: np.ndarray
    radii: np.ndarray
    lipschitz: np.ndarray
    index: cKDTree = field(init=False, repr=False)

    def __post_init__(self) -> None:
        self.index = cKDTree(np.column_stack([self.centers.real, self.centers.imag]))
        self.max_radius = float(self.radii.max())

    def __len__(self) -> int:
        return len(self.words)

    def contains(self, y: complex, depth: float = 1.0) -> bool:
        return abs(y - self.center) <= depth * self.radius

    def choices(self, t: complex) -> List[int]:
        """Words whose image of W holds t, cheapest first: small Lipschitz bound, deep inside."""
        hits = np.asarray(self.index.query_ball_point([t.real, t.imag], self.max_radius), dtype=int)
        if hits.size == 0:
            return []
        depth = (self.radii[hits] - np.abs(self.centers[hits] - t)) / self.radii[hits]
        ok = depth > MIN_DEPTH
        if not ok.any():
            ok = depth > 0
        chosen = hits[ok]
        score = self.lipschitz[chosen] / depth[ok]
        return [int(k) for k in chosen[np.argsort(score, kind="stable")]]

    def pull_back(self, k: int, t: complex) -> Tuple[complex, float]:
        """y = M_k^{-1}(t) and |M_k'(y)|."""
        a, b, d = complex(self.a[k]), complex(self.b[k]), complex(self.d[k])
        y = (b - d * t) / (t - a)
        return y, abs(a * d - b) / abs(y + d) ** 2


def _greedy_cover(
    a: np.ndarray,
    b: np.ndarray,
    d: np.ndarray,
    center: complex,
    radius: float,
    contraction: float,
) -> Optional[Tuple[List[int], np.ndarray, np.ndarray, np.ndarray]]:
    step = radius / SAMPLE_STEPS
    samples = _samples(center, radius, step)
    m = center + d
    mod = np.abs(m)
    with np.errstate(all="ignore"):
        den = mod * mod - radius * radius
        det = a * d - b
        centers = a - det * np.conj(m) / den
        radii = np.abs(det) * radius / den
        lipschitz = np.abs(det) / (mod - radius) ** 2
        usable = (
            (mod > radius * 1.001)
            & np.isfinite(centers)
            & (lipschitz <= contraction)
            & (radii > 2 * step)
            & (np.abs(centers - center) < radius + radii)
        )
    candidates = np.nonzero(usable)[0]
    if candidates.size == 0:
        return None
    order = candidates[np.argsort(lipschitz[candidates], kind="stable")]
    covered = np.zeros(len(samples), dtype=bool)
    chosen: List[int] = []
    for k in order:
        hit = np.abs(samples - centers[k]) <= radii[k] - step
        if (hit & ~covered).any():
            chosen.append(int(k))
            covered |= hit
            if covered.all():
                return chosen, centers, radii, lipschitz
    return None


def discover_cover(
    ratios: np.ndarray,
    centers: Sequence[complex],
    radii: Sequence[float],
    limit: int,
    contraction: float,
) -> Optional[ContractingCover]:
    """The first (center, radius) whose disk is covered by contracting catalog words."""
    a, b, d, m = _word_matrices(ratios, limit)
    for center in centers:
        for radius in radii:
            found = _greedy_cover(a, b, d, center, radius, contraction)
            if found is None:
                logger.debug("No contracting cover of B(%.4g%+.4gi, %.3g)", center.real, center.imag, radius)
                continue
            chosen, img_c, img_r, lip = found
            idx = np.asarray(chosen)
            cover = ContractingCover(
                center, radius, [_decode(k, m) for k in chosen],
                a[idx], b[idx], d[idx], img_c[idx], img_r[idx], lip[idx],
            )
            logger.info(
                "Contracting cover of B(%.4g%+.4gi, %.3g) by %d words, Lipschitz <= %.3f",
                center.real, center.imag, radius, len(cover), float(lip[idx].max()),
            )
            return cover
    return None


class CoverRefiner:
    """Approximates points by catalog words: an entry word into W, cover words, a base."""

    def __init__(
        self,
        ratios: np.ndarray,
        cover: ContractingCover,
        base: BaseLookup,
        rng: random.Random,
        entry_limit: int,
        max_levels: int,
        spread: int = 3,
    ):
        self.array = ratios
        self.ratios = [complex(r) for r in ratios]
        self.cover = cover
        self.base = base
        self.rng = rng
        self.entry_limit = entry_limit
        self.max_levels = max_levels
        self.spread = max(1, spread)
        self.direct = cKDTree(np.column_stack([ratios.real, ratios.imag]))
        self.entries: List[Blocks] = []
        self.levels = 0

    # --- Entry into W ---
    def _entry(self, u: complex) -> Optional[Tuple[Blocks, complex]]:
        for blocks in self.entries:
            try:
                y = pull_back(self.ratios, blocks, u)
            except ZeroDivisionError:
                continue
            if self.cover.contains(y, ENTRY_DEPTH):
                return blocks, y
        found = self._find_entry(u)
        if found is not None and found[0]:
            self.entries.append(found[0])
        return found

    def _best(self, options: List[Tuple[Blocks, complex]]) -> Optional[Tuple[Blocks, complex]]:
        scored = []
        for blocks, y in options[:256]:
            try:
                scored.append((word_derivative(self.ratios, blocks, y), blocks, y))
            except ZeroDivisionError:
                continue
        if not scored:
            return None
        _, blocks, y = min(scored, key=lambda s: s[0])
        return blocks, y

    def _near_ratios(self, u: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """For each u, the catalog ratio r with r/u - 1 in W, or -1."""
        c, rho = self.cover.center, self.cover.radius
        targets = u * (1 + c)
        dist, idx = self.direct.query(np.column_stack([targets.real, targets.imag]))
        ok = dist <= ENTRY_DEPTH * rho * np.abs(u)
        return np.where(ok, idx, -1), ok

    def _find_entry(self, u: complex) -> Optional[Tuple[Blocks, complex]]:
        if self.cover.contains(u, ENTRY_DEPTH):
            return (), u
        r = self.array
        with np.errstate(all="ignore"):
            u1 = r / u - 1
        finite = np.nonzero(np.isfinite(u1) & (u1 != 0))[0]

        hits = [((int(k),), complex(u1[k])) for k in finite if self.cover.contains(complex(u1[k]), ENTRY_DEPTH)]
        if hits:
            return self._best(hits)

        idx, ok = self._near_ratios(u1[finite])
        hits = []
        for k2, k1 in zip(finite[ok], idx[ok]):
            y = self.ratios[k1] / complex(u1[k2]) - 1
            hits.append(((int(k1), int(k2)), y))
        if hits:
            return self._best(hits)

        m = min(self.entry_limit, len(r))
        with np.errstate(all="ignore"):
            u2 = (r[None, :m] / u1[:m, None] - 1).reshape(-1)
        finite2 = np.nonzero(np.isfinite(u2) & (u2 != 0))[0]
        idx, ok = self._near_ratios(u2[finite2])
        hits = []
        for code, k1 in zip(finite2[ok], idx[ok]):
            k3, k2 = divmod(int(code), m)
            y = self.ratios[k1] / complex(u2[code]) - 1
            hits.append(((int(k1), k2, k3), y))
        return self._best(hits)

    # --- Descent ---
    def _descend(self, u: complex, tolerance: float) -> Optional[Blocks]:
        entry = self._entry(u)
        if entry is None:
            return None
        prefix, y = entry
        tau = tolerance / max(word_derivative(self.ratios, prefix, y), 1e-300)
        digits: List[Blocks] = []
        for _ in range(self.max_levels):
            self.levels += 1
            base = self.base(y, tau)
            if base is not None:
                return base + tuple(b for w in reversed(digits) for b in w) + prefix
            options = self.cover.choices(y)
            if not options:
                return None
            k = self.rng.choice(options[: self.spread])
            try:
                y, scale = self.cover.pull_back(k, y)
            except ZeroDivisionError:
                return None
            tau /= max(scale, 1e-300)
            digits.append(self.cover.words[k])
        return None

    def refine(self, u: complex, tolerance: float) -> Optional[Blocks]:
        """Blocks whose word value lies within `tolerance` of u, or None."""
        if not (tolerance >= MIN_TOLERANCE) or not math.isfinite(abs(u)):
            return None
        for attempt in range(REFINE_ATTEMPTS):
            blocks = self._descend(u, tolerance * SAFETY / 4**attempt)
            if blocks is None:
                continue
            try:
                value = word_value(self.ratios, blocks)
            except ZeroDivisionError:
                continue
            if abs(value - u) <= tolerance:
                return blocks
            logger.debug("Refined word misses %s by %.3g (tolerance %.3g)", u, abs(value - u), tolerance)
        return None
