from __future__ import annotations

import cmath
import logging
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from scipy.spatial import cKDTree

from ...config import (
    ARG_SLACK,
    CATALOG_MAX_VERTICES,
    COVER_BLOCKS,
    COVER_CONTRACTION,
    COVER_RADII,
    PREFIX_DEPTH,
    REFINE_MAX_LEVELS,
    SUFFIX_DEPTH,
)
from ...errors import DegenerateMap, DegenerateSeed, DomainError
from ...exact_arith import ZERO, GaussianRational
from ...graph_core import RootedGraph, TreeCatalog, enumerate_catalog, implement_on_path, single_vertex
from ...moebius import INFINITY, f_lambda, fixed_points
from ..implementer import ImplementerPair
from ..sector import SectorSpec, seed_pair
from .base import PairSource
from .cover import ContractingCover, CoverRefiner, discover_cover

logger = logging.getLogger("hardcore")

Blocks = Tuple[int, ...]


def _digits(code: int, base: int, width: int) -> List[int]:
    out = []
    for _ in range(width):
        code, d = divmod(code, base)
        out.append(d)
    return out[::-1]


def _attracting_float(mu: complex, chi: complex) -> Optional[complex]:
    """Attracting fixed point of g = f_mu o f_chi in double precision."""
    b = 1 + chi - mu
    root = cmath.sqrt(b * b + 4 * mu)
    for z in ((-b + root) / 2, (-b - root) / 2):
        w = 1 + z + chi
        if w != 0 and abs(mu * chi / (w * w)) < 1:
            return z
    return None


def _attracting_point(lambda0: GaussianRational) -> Optional[complex]:
    try:
        fp = fixed_points(f_lambda(lambda0))
    except DegenerateMap:
        return None
    a = fp.attracting
    if a is None or a is INFINITY:
        return None
    return a.to_complex() if isinstance(a, GaussianRational) else complex(a)


class CatalogPairSource(PairSource):
    """Pairs of catalog trees, extended by path compositions.

    A value is either a catalog ratio or the ratio of a path
    [b_1, ..., b_p, c_1, ..., c_s, K_1]; prefixes are indexed in a KD-tree and
    suffixes are peeled off the target by the inverse maps y -> r/y - 1. Values the
    lookup cannot reach within the tolerance are refined through a contracting cover
    of catalog words around the attracting fixed point of f_lambda0.
    """

    name = "catalog"

    def prepare(self, lambda0: GaussianRational, delta: int, catalog: Optional[TreeCatalog]) -> None:
        super().prepare(lambda0, delta, catalog)
        if catalog is None:
            catalog = enumerate_catalog(delta, lambda0, int(self.config.get("max_vertices", CATALOG_MAX_VERTICES)))
        if catalog.lambda0 != lambda0 or catalog.delta != delta:
            raise DomainError("catalog was built for another lambda0 or delta")
        self.catalog = catalog
        self.entries = catalog.finite_entries()
        if not self.entries:
            raise DomainError("catalog has no finite ratios")
        self.prefix_depth = max(1, int(self.config.get("prefix_depth", PREFIX_DEPTH)))
        self.suffix_depth = max(0, int(self.config.get("suffix_depth", SUFFIX_DEPTH)))
        self.sector = SectorSpec()

        self.ratios = np.array([e.ratio.to_complex() for e in self.entries], dtype=np.complex128)
        self.direct = cKDTree(np.column_stack([self.ratios.real, self.ratios.imag]))

        values = self.ratios.copy()
        for _ in range(self.prefix_depth - 1):
            with np.errstate(all="ignore"):
                values = (self.ratios[None, :] / (1 + values[:, None])).reshape(-1)
        finite = np.isfinite(values)
        self.prefix_codes = np.nonzero(finite)[0]
        prefix_values = values[finite]
        self.prefix = cKDTree(np.column_stack([prefix_values.real, prefix_values.imag]))
        self._trees: Dict[Blocks, RootedGraph] = {}
        self.refiner = self._build_refiner()
        logger.info(
            "Catalog pair source at %s: %d ratios, %d prefixes of depth %d, suffix depth %d, %s",
            lambda0, len(self.entries), len(self.prefix_codes), self.prefix_depth, self.suffix_depth,
            "refining" if self.refiner else "lookup only",
        )

    def _build_refiner(self) -> Optional[CoverRefiner]:
        if not self.config.get("refine", True):
            return None
        a = _attracting_point(self.lambda0)
        if a is None:
            logger.warning("f_lambda at %s has no attracting fixed point; catalog values are not refined", self.lambda0)
            return None
        scale = abs(1 + a)
        radii = [scale * float(f) for f in self.config.get("cover_radii", COVER_RADII)]
        cover = discover_cover(
            self.ratios,
            [a],
            radii,
            int(self.config.get("cover_blocks", COVER_BLOCKS)),
            float(self.config.get("cover_contraction", COVER_CONTRACTION)),
        )
        if cover is None:
            logger.warning("No contracting cover at %s; catalog values are not refined", self.lambda0)
            return None
        return CoverRefiner(
            self.ratios,
            cover,
            self._base,
            self.rng,
            int(self.config.get("cover_blocks", COVER_BLOCKS)),
            int(self.config.get("refine_levels", REFINE_MAX_LEVELS)),
        )

    @property
    def cover(self) -> Optional[ContractingCover]:
        return self.refiner.cover if self.refiner else None

    # --- Lookup ---
    def _suffix_targets(self, t: complex) -> np.ndarray:
        lam = self.lambda0.to_complex()
        with np.errstate(all="ignore"):
            ys = np.array([lam / t - 1], dtype=np.complex128)
            for _ in range(self.suffix_depth):
                ys = (self.ratios[None, :] / ys[:, None] - 1).reshape(-1)
        return ys

    def _blocks_of(self, prefix_code: int, suffix_code: int) -> Blocks:
        size = len(self.entries)
        prefix = _digits(int(prefix_code), size, self.prefix_depth)
        suffix = _digits(int(suffix_code), size, self.suffix_depth)[::-1]
        return tuple(prefix + suffix)

    def lookup(self, t: complex) -> Tuple[float, Optional[Blocks], int]:
        """Closest value to t: (distance, blocks or None for a direct entry, entry index)."""
        dist, idx = self.direct.query([t.real, t.imag])
        best: Tuple[float, Optional[Blocks], int] = (float(dist), None, int(idx))
        self.spent += 1
        if t == 0:
            return best
        ys = self._suffix_targets(t)
        ok = np.isfinite(ys)
        if ok.any():
            points = np.column_stack([ys[ok].real, ys[ok].imag])
            dists, idxs = self.prefix.query(points)
            self.spent += 1
            k = int(np.argmin(dists))
            suffix_code = int(np.nonzero(ok)[0][k])
            # the distance is in prefix coordinates; recompute the forward value below
            blocks = self._blocks_of(self.prefix_codes[idxs[k]], suffix_code)
            value = self._float_value(blocks)
            if value is not None and abs(value - t) < best[0]:
                best = (abs(value - t), blocks, -1)
        return best

    def _base(self, y: complex, tolerance: float) -> Optional[Blocks]:
        """A word of at most prefix_depth blocks whose value (from 0) is within tolerance of y."""
        if abs(y) <= tolerance:
            return ()
        dist, idx = self.direct.query([y.real, y.imag])
        if dist <= tolerance:
            return (int(idx),)
        dist, idx = self.prefix.query([y.real, y.imag])
        if dist <= tolerance:
            return tuple(_digits(int(self.prefix_codes[idx]), len(self.entries), self.prefix_depth))
        return None

    def approximate(self, t: complex, tolerance: float) -> Tuple[Optional[Blocks], int]:
        """(blocks, index) of a value within tolerance of t when one can be found,
        otherwise the closest lookup."""
        dist, blocks, index = self.lookup(t)
        if dist <= tolerance or self.refiner is None or t == 0:
            return blocks, index
        lam = self.lambda0.to_complex()
        u = lam / t - 1
        # the closing K_1 maps u to t with derivative |lambda0|/|1+u|^2
        refined = self.refiner.refine(u, tolerance * abs(1 + u) ** 2 / abs(lam))
        self.spent += self.refiner.levels
        self.refiner.levels = 0
        if refined is None:
            self.rejections["refinement_failed"] += 1
            return blocks, index
        return refined, -1

    def _float_value(self, blocks: Blocks) -> Optional[complex]:
        z = 0j
        try:
            for b in blocks:
                z = complex(self.ratios[b]) / (1 + z)
            z = self.lambda0.to_complex() / (1 + z)
        except ZeroDivisionError:
            return None
        return complex(z) if cmath.isfinite(z) else None

    def _exact_value(self, blocks: Optional[Blocks], index: int) -> Optional[GaussianRational]:
        if blocks is None:
            return self.entries[index].ratio
        z = ZERO
        for b in blocks:
            den = 1 + z
            if den.is_zero():
                return None
            z = self.entries[b].ratio / den
        den = 1 + z
        if den.is_zero():
            return None
        return self.lambda0 / den

    def _tree(self, blocks: Optional[Blocks], index: int) -> RootedGraph:
        if blocks is None:
            return self.entries[index].tree
        key = blocks
        if key not in self._trees:
            parts = [self.entries[b].tree for b in blocks] + [single_vertex(self.delta)]
            self._trees[key] = implement_on_path(parts, self.delta)
        return self._trees[key]

    # --- Pairs ---
    def find_pair(self, target: GaussianRational, alpha: Any, tolerance: Any) -> Optional[ImplementerPair]:
        try:
            mu_seed, _ = seed_pair(target, alpha)
        except DegenerateSeed:
            self.rejections["degenerate_seed"] += 1
            return None
        tol = float(tolerance)
        mu_blocks, mu_index = self.approximate(complex(mu_seed), tol)
        mu = self._exact_value(mu_blocks, mu_index)
        if mu is None or mu.is_zero():
            self.rejections["no_mu"] += 1
            return None

        # re-solve chi so that target stays fixed by g_(mu, chi)
        chi_star = (mu / target - 1) * (1 + target)
        t, chi_f = target.to_complex(), chi_star.to_complex()
        # dz/dchi at the fixed point is -z/(1 + 2z + chi - mu)
        bend = abs(1 + 2 * t + chi_f - mu.to_complex())
        sensitivity = abs(t) / bend if bend > 0 else float("inf")
        chi_blocks, chi_index = self.approximate(chi_f, tol / (2 * max(sensitivity, 1.0)))
        chi = self._exact_value(chi_blocks, chi_index)
        if chi is None or chi.is_zero():
            self.rejections["no_chi"] += 1
            return None

        mu_f, chi_f = mu.to_complex(), chi.to_complex()
        z = _attracting_float(mu_f, chi_f)
        if z is None or abs(z - t) > tol:
            self.rejections["fixed_point_drift"] += 1
            return None
        w = 1 + z + chi_f
        if not self.sector.float_contains(mu_f * chi_f / (w * w), ARG_SLACK):
            self.rejections["derivative_outside_sector"] += 1
            return None
        try:
            return ImplementerPair.from_values(mu, chi, self._tree(mu_blocks, mu_index), self._tree(chi_blocks, chi_index))
        except DomainError as e:
            logger.debug("Pair at %s rejected: %s", target, e)
            self.rejections["no_attracting_point"] += 1
            return None
