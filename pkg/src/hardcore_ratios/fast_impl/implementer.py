"""Fast implementers: pairs of contracting maps around a repelling fixed point, and
their certification.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Any, Dict, List, Optional, Sequence, Tuple

import mpmath as mp
import numpy as np
from mpmath import iv
from scipy.spatial import cKDTree

from ..config import (
    COVER_MAX_DEPTH,
    FIXED_POINT_PREC,
    INTERVAL_PREC,
    LATTICE_SPACING,
    RADIUS_EXPONENT,
)
from ..errors import DomainError, NotADisk, ParseError
from ..exact_arith import (
    GaussianRational,
    PointLocation,
    RationalDisk,
    disk_in_disk,
    sqrt_upper,
)
from ..graph_core import RootedGraph
from ..moebius import (
    INFINITY,
    FixedPointKind,
    Moebius,
    disk_image,
    f_lambda,
    fixed_points,
    g_map,
)
from .disks import dyadic_inner_disk
from .sector import SectorSpec, interval_precision, iv_rational

logger = logging.getLogger("hardcore")

# image disks keep 63/64 of their radius once rounded to dyadic coordinates
IMAGE_SHRINK = Fraction(63, 64)


@dataclass(frozen=True)
class ImplementerPair:
    """g = f_mu o f_chi with its attracting fixed point; trees are absent for value-only pairs."""

    mu: GaussianRational
    chi: GaussianRational
    g: Moebius
    z_fix: GaussianRational
    z_exact: bool = False
    tree_g: Optional[RootedGraph] = None
    tree_gbar: Optional[RootedGraph] = None

    @classmethod
    def from_values(
        cls,
        mu: GaussianRational,
        chi: GaussianRational,
        tree_g: Optional[RootedGraph] = None,
        tree_gbar: Optional[RootedGraph] = None,
        prec: int = FIXED_POINT_PREC,
    ) -> "ImplementerPair":
        g = g_map(mu, chi)
        fp = fixed_points(g, prec)
        z = fp.attracting
        if z is None or z is INFINITY:
            raise DomainError(f"g_(mu={mu}, chi={chi}) has no finite attracting fixed point")
        if fp.exact:
            return cls(mu, chi, g, z, True, tree_g, tree_gbar)
        return cls(mu, chi, g, GaussianRational.from_complex(z, prec // 2), False, tree_g, tree_gbar)

    @property
    def has_trees(self) -> bool:
        return self.tree_g is not None and self.tree_gbar is not None

    def fixed_point(self, bits: int) -> GaussianRational:
        """The attracting fixed point on the dyadic grid of spacing 2^-bits, or exactly."""
        if self.z_exact:
            return self.z_fix
        z = fixed_points(self.g, bits + 64).attracting
        if z is None or z is INFINITY:
            raise DomainError(f"g_(mu={self.mu}, chi={self.chi}) lost its attracting fixed point")
        return GaussianRational.from_complex(z, bits)

    def to_json(self) -> Dict[str, Any]:
        return {
            "mu": str(self.mu),
            "chi": str(self.chi),
            "z_fix": str(self.z_fix),
            "z_exact": self.z_exact,
            "tree_g": self.tree_g.to_json() if self.tree_g else None,
            "tree_gbar": self.tree_gbar.to_json() if self.tree_gbar else None,
        }

    @classmethod
    def from_json(cls, data: Dict[str, Any]) -> "ImplementerPair":
        try:
            mu = GaussianRational.parse(data["mu"])
            chi = GaussianRational.parse(data["chi"])
            z_fix = GaussianRational.parse(data["z_fix"])
            z_exact = bool(data.get("z_exact", False))
        except (KeyError, TypeError) as e:
            raise ParseError(f"malformed implementer pair: {e}") from e
        trees = [RootedGraph.from_json(data[k]) if data.get(k) else None for k in ("tree_g", "tree_gbar")]
        return cls(mu, chi, g_map(mu, chi), z_fix, z_exact, trees[0], trees[1])


@dataclass(frozen=True)
class ConditionCheck:
    name: str
    passed: bool
    method: str
    detail: str = ""

    def to_json(self) -> Dict[str, Any]:
        return {"name": self.name, "passed": self.passed, "method": self.method, "detail": self.detail}


@dataclass(frozen=True)
class Certificate:
    checks: Tuple[ConditionCheck, ...]
    cover_depth: int
    cover_cells: int
    interval_prec: int

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> List[str]:
        return [c.name for c in self.checks if not c.passed]

    def to_json(self) -> Dict[str, Any]:
        return {
            "passed": self.passed,
            "checks": [c.to_json() for c in self.checks],
            "cover_depth": self.cover_depth,
            "cover_cells": self.cover_cells,
            "interval_prec": self.interval_prec,
        }

    @classmethod
    def from_json(cls, data: Dict[str, Any]) -> "Certificate":
        checks = tuple(ConditionCheck(c["name"], bool(c["passed"]), c["method"], c.get("detail", "")) for c in data["checks"])
        return cls(checks, int(data["cover_depth"]), int(data["cover_cells"]), int(data["interval_prec"]))


class ImageIndex:
    """Float KD-tree over the image disks g_i(U), used to pick exact candidates."""

    def __init__(self, disks: Sequence[RationalDisk]):
        self.disks = list(disks)
        self.centers = np.array([[d.float_center().real, d.float_center().imag] for d in self.disks])
        self.radii = np.array([d.float_radius() for d in self.disks])
        self.tree = cKDTree(self.centers)
        self.max_radius = float(self.radii.max())

    def candidates(self, point: complex, reach: float = 0.0) -> List[int]:
        """Indices whose float disk holds B(point, reach), deepest fit first."""
        hits = self.tree.query_ball_point([point.real, point.imag], self.max_radius)
        scored = []
        for i in hits:
            dist = float(np.hypot(self.centers[i, 0] - point.real, self.centers[i, 1] - point.imag))
            slack = self.radii[i] - dist - reach
            if slack > 0:
                scored.append((-slack, i))
        return [i for _, i in sorted(scored)]

    def containing(self, point: GaussianRational) -> List[int]:
        """Indices, ascending, of disks holding `point` exactly."""
        z = point.to_complex()
        near = sorted(self.tree.query_ball_point([z.real, z.imag], self.max_radius * (1 + 1e-9)))
        return [i for i in near if self.disks[i].locate(point) is PointLocation.INSIDE]


@dataclass(eq=False)
class FastImplementer:
    lambda0: GaussianRational
    delta: int
    pairs: Tuple[ImplementerPair, ...]
    disk: RationalDisk
    certificate: Optional[Certificate] = None
    alpha: Optional[complex] = None

    @property
    def has_trees(self) -> bool:
        return all(p.has_trees for p in self.pairs)

    @property
    def certified(self) -> bool:
        return self.certificate is not None and self.certificate.passed

    @cached_property
    def f_map(self) -> Moebius:
        return f_lambda(self.lambda0)

    @cached_property
    def images(self) -> List[RationalDisk]:
        """Disks with short dyadic coordinates inside U_i = g_i(U)."""
        return [dyadic_inner_disk(disk_image(p.g, self.disk), IMAGE_SHRINK) for p in self.pairs]

    @cached_property
    def image_index(self) -> ImageIndex:
        return ImageIndex(self.images)

    @cached_property
    def attractor(self) -> Any:
        from .pipeline import attractor_geometry

        return attractor_geometry(self)

    def to_json(self) -> Dict[str, Any]:
        return {
            "lambda0": str(self.lambda0),
            "delta": self.delta,
            "disk": self.disk.to_json(),
            "alpha": None if self.alpha is None else [self.alpha.real, self.alpha.imag],
            "pairs": [p.to_json() for p in self.pairs],
            "certificate": self.certificate.to_json() if self.certificate else None,
        }

    @classmethod
    def from_json(cls, data: Dict[str, Any]) -> "FastImplementer":
        try:
            alpha = data.get("alpha")
            return cls(
                GaussianRational.parse(data["lambda0"]),
                int(data["delta"]),
                tuple(ImplementerPair.from_json(p) for p in data["pairs"]),
                RationalDisk.from_json(data["disk"]),
                Certificate.from_json(data["certificate"]) if data.get("certificate") else None,
                complex(*alpha) if alpha else None,
            )
        except (KeyError, TypeError, ValueError) as e:
            if isinstance(e, ParseError):
                raise
            raise ParseError(f"malformed implementer: {e}") from e


# --- Geometry ---
@dataclass(frozen=True)
class ImplementerGeometry:
    """Where the pairs go: U around the repelling fixed point and a lattice of targets."""

    lambda0: GaussianRational
    repelling: Any
    disk: RationalDisk
    alpha: mp.mpc
    spacing: Fraction
    targets: Tuple[GaussianRational, ...]

    @property
    def tolerance(self) -> Fraction:
        """How far a found fixed point may drift from its lattice target."""
        return self.spacing / 4


def design_geometry(lambda0: Any, radius_exponent: int = RADIUS_EXPONENT, sector: Optional[SectorSpec] = None) -> ImplementerGeometry:
    lam = GaussianRational.coerce(lambda0)
    sector = sector or SectorSpec()
    fp = fixed_points(f_lambda(lam))
    z0 = fp.repelling
    if z0 is None or z0 is INFINITY or FixedPointKind.NEUTRAL in fp.kinds:
        raise DomainError(f"f_lambda at {lam} has no repelling fixed point")
    center = z0 if fp.exact else GaussianRational.from_complex(z0, radius_exponent + 40)
    radius = Fraction(1, 2**radius_exponent)
    disk = RationalDisk.from_center_radius(center, radius)

    alpha = sector.midpoint()
    step_float = LATTICE_SPACING * float(abs(alpha)) * float(radius) / float(abs(1 - alpha))
    denom = 2 ** (radius_exponent + 16)
    spacing = Fraction(int(step_float * denom), denom)
    reach = radius * Fraction(999, 1000)
    bound = int(reach / spacing) + 1
    points = []
    for m in range(-bound, bound + 1):
        for n in range(-bound, bound + 1):
            if (m * m + n * n) * spacing * spacing < reach * reach:
                points.append((m * m + n * n, m, n))
    points.sort()
    targets = tuple(center + GaussianRational(m * spacing, n * spacing) for _, m, n in points)
    logger.debug("Implementer geometry at %s: radius 2^-%d, %d lattice targets", lam, radius_exponent, len(targets))
    return ImplementerGeometry(lam, z0, disk, alpha, spacing, targets)


# --- Certification ---
def _check_fixed_points(imp: FastImplementer) -> ConditionCheck:
    u = imp.disk
    bad = [k for k, p in enumerate(imp.pairs) if u.locate(p.z_fix) is not PointLocation.INSIDE]
    exact = all(p.z_exact for p in imp.pairs)
    method = "exact" if exact else "exact on rationalized fixed points"
    if bad:
        return ConditionCheck("fixed_points_in_disk", False, method, f"pairs outside U: {bad[:10]}")
    if not exact:
        # every rationalized point also needs room for its rounding error
        r_lo = u.radius_bounds(FIXED_POINT_PREC)[0]
        slack = Fraction(1, 2 ** (FIXED_POINT_PREC // 2 - 2))
        for k, p in enumerate(imp.pairs):
            if not p.z_exact and (p.z_fix - u.center).norm() >= (r_lo - slack) ** 2:
                return ConditionCheck("fixed_points_in_disk", False, method, f"pair {k} within rounding of the boundary")
    return ConditionCheck("fixed_points_in_disk", True, method)


def _cell_outside(u: RationalDisk, x0: Fraction, y0: Fraction, side: Fraction) -> bool:
    c = u.center
    qx = min(max(c.re, x0), x0 + side)
    qy = min(max(c.im, y0), y0 + side)
    return (qx - c.re) ** 2 + (qy - c.im) ** 2 > u.radius_squared


def cover_check(u: RationalDisk, images: Sequence[RationalDisk], index: ImageIndex, max_depth: int = COVER_MAX_DEPTH) -> Tuple[bool, int, int, str]:
    """Quadtree proof that closure(U) lies in the union of the images.

    A cell is settled when it misses closure(U) or all four corners lie in one image.
    Returns (covered, deepest level used, cells examined, first failure).
    """
    half = sqrt_upper(u.radius_squared, 64)
    x0, y0 = u.center.re - half, u.center.im - half
    stack = [(0, 0, 0)]
    deepest = 0
    cells = 0
    while stack:
        depth, kx, ky = stack.pop()
        cells += 1
        side = 2 * half / (1 << depth)
        cx, cy = x0 + kx * side, y0 + ky * side
        if _cell_outside(u, cx, cy, side):
            continue
        corners = [
            GaussianRational(cx, cy),
            GaussianRational(cx + side, cy),
            GaussianRational(cx, cy + side),
            GaussianRational(cx + side, cy + side),
        ]
        mid = complex(float(cx + side / 2), float(cy + side / 2))
        reach = float(side) * 0.7072
        settled = False
        for i in index.candidates(mid, reach)[:4]:
            if all(images[i].locate(q) is PointLocation.INSIDE for q in corners):
                settled = True
                break
        if settled:
            deepest = max(deepest, depth)
            continue
        if depth >= max_depth:
            return False, depth, cells, f"cell at ({float(cx):.6g}, {float(cy):.6g}) of side {float(side):.3g} uncovered"
        for dx in (0, 1):
            for dy in (0, 1):
                stack.append((depth + 1, 2 * kx + dx, 2 * ky + dy))
    return True, deepest, cells, ""


def derivative_in_sector(pair: ImplementerPair, u: RationalDisk, sector: SectorSpec, prec: int = INTERVAL_PREC) -> bool:
    """g'(z) = mu*chi/(1+z+chi)^2 lies in the sector for every z in closure(U)."""
    w_c = 1 + u.center + pair.chi
    w2 = w_c.norm()
    if w2 <= u.radius_squared:
        return False
    value = pair.mu * pair.chi / (w_c * w_c)
    with interval_precision(prec):
        w = iv.sqrt(iv_rational(w2))
        r = iv.sqrt(iv_rational(u.radius_squared))
        size = iv.sqrt(iv_rational((pair.mu * pair.chi).norm()))
        lo = size / (w + r) ** 2
        hi = size / (w - r) ** 2
        # arg(1+z+chi) stays within asin(r/|w_c|) <= (pi/2) r/|w_c| of arg(w_c)
        spread = iv.pi * r / w
        return sector.contains_range(value, spread, (lo, hi), prec)


def _check_sector(imp: FastImplementer, sector: SectorSpec, prec: int) -> ConditionCheck:
    bad = [k for k, p in enumerate(imp.pairs) if not derivative_in_sector(p, imp.disk, sector, prec)]
    if bad:
        return ConditionCheck("derivative_in_sector", False, f"interval {prec} bits", f"pairs failing: {bad[:10]}")
    return ConditionCheck("derivative_in_sector", True, f"interval {prec} bits")


def _check_expanding(imp: FastImplementer) -> ConditionCheck:
    try:
        image = disk_image(imp.f_map, imp.disk)
    except NotADisk as e:
        return ConditionCheck("disk_inside_own_image", False, "exact", str(e))
    ok = disk_in_disk(imp.disk, image, strict=True)
    return ConditionCheck("disk_inside_own_image", ok, "exact")


def _check_attracting_excluded(imp: FastImplementer) -> ConditionCheck:
    fp = fixed_points(imp.f_map)
    a = fp.attracting
    if a is None or a is INFINITY:
        return ConditionCheck("attracting_point_excluded", True, "exact", "no finite attracting fixed point")
    if fp.exact:
        ok = imp.disk.locate(a) is PointLocation.OUTSIDE
        return ConditionCheck("attracting_point_excluded", ok, "exact")
    with mp.workprec(FIXED_POINT_PREC):
        rsq = imp.disk.radius_squared
        radius = mp.sqrt(mp.mpf(rsq.numerator) / rsq.denominator)
        gap = abs(mp.mpc(a) - imp.disk.center.to_mpc()) - radius
        ok = gap > mp.mpf(2) ** -(FIXED_POINT_PREC // 2)
    return ConditionCheck("attracting_point_excluded", bool(ok), f"numeric margin {mp.nstr(gap, 5)}")


def certify(imp: FastImplementer, sector: Optional[SectorSpec] = None, max_depth: int = COVER_MAX_DEPTH, prec: int = INTERVAL_PREC) -> Certificate:
    """Check all six implementer conditions and return the certificate."""
    sector = sector or SectorSpec()
    if not imp.pairs:
        raise DomainError("an implementer needs at least one pair")
    checks = [_check_fixed_points(imp)]
    logger.debug("Certifying %d pairs at %s", len(imp.pairs), imp.lambda0)

    try:
        images = imp.images
    except NotADisk as e:
        checks.append(ConditionCheck("cover", False, "quadtree", str(e)))
        depth = cells = 0
    else:
        covered, depth, cells, detail = cover_check(imp.disk, images, imp.image_index, max_depth)
        checks.append(ConditionCheck("cover", covered, f"quadtree depth <= {max_depth}", detail or f"{cells} cells"))
        logger.debug("Cover check: %s after %d cells, depth %d", covered, cells, depth)

    checks.append(_check_sector(imp, sector, prec))
    checks.append(_check_expanding(imp))
    checks.append(_check_attracting_excluded(imp))
    checks.append(ConditionCheck("rational_boundary", True, "by construction", " ".join(imp.disk.to_json())))

    certificate = Certificate(tuple(checks), depth, cells, prec)
    if certificate.passed:
        logger.info("Implementer at %s certified with %d pairs", imp.lambda0, len(imp.pairs))
    else:
        logger.warning("Implementer at %s failed: %s", imp.lambda0, ", ".join(certificate.failures()))
    return certificate
