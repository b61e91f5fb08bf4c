"""From a certified implementer and a target P to an explicit plan and tree.

The plan value is (f_{w_K} o ... o f_{w_1})(0) with the labels read from the
first to the last block on the path.
"""
from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional, Tuple

import mpmath as mp

from ..config import (
    FIXED_POINT_PREC,
    MAX_EXPANSION_STEPS,
    MAX_FORWARD_STEPS,
    MAX_PULLBACK_STEPS,
    NEAR_ETA,
)
from ..errors import (
    ConstructionError,
    DomainError,
    ExceptionalParameter,
    GeometryPrecondition,
    InternalError,
    NotADisk,
    WrongBranch,
)
from ..exact_arith import (
    ZERO,
    GaussianRational,
    PointLocation,
    RationalDisk,
    disk_in_disk,
    sqrt_lower,
    sqrt_upper,
)
from ..graph_core import PartitionPair, RootedGraph, implement_on_path, single_vertex, tree_partition
from ..moebius import INFINITY, Moebius, SpherePoint, disk_image, f_lambda, fixed_points, inverse, power
from ..regions import is_exceptional_candidate
from .disks import dyadic_inner_disk, generate_disk, inner_radius
from .implementer import FastImplementer

logger = logging.getLogger("hardcore")


# --- Geometry around the attracting fixed point ---
@dataclass(frozen=True)
class AttractorGeometry:
    """Nested disks D_0 > D_1 > D_2 > D_3 around the attracting fixed point a of f.

    D_0 = f^N(complement of closure(U)) lies in V = B(a, rho_V) where |f'| <= eta,
    and D_i = f^i(D_0). N depends only on the implementer.
    """

    a: SpherePoint
    a_exact: bool
    eta: mp.mpf
    v_disk: RationalDisk
    n: int
    disks: Tuple[RationalDisk, RationalDisk, RationalDisk, RationalDisk]
    gap: Fraction
    h: Moebius
    f: Moebius
    f_inv: Moebius

    def near(self, p: GaussianRational, eps: Fraction) -> bool:
        """|P - a| < eps/2, against the rationalized a when a is irrational."""
        return (p - self.a).norm() * 4 < eps * eps


def _nesting_gap(outer: RationalDisk, inner: RationalDisk) -> Fraction:
    """Rational lower bound on r_outer - r_inner - |c_outer - c_inner|."""
    bits = 64 + max(0, inner.radius_squared.denominator.bit_length() - inner.radius_squared.numerator.bit_length()) // 2
    return (
        sqrt_lower(outer.radius_squared, bits)
        - sqrt_upper(inner.radius_squared, bits)
        - sqrt_upper((outer.center - inner.center).norm(), bits)
    )


def attractor_geometry(imp: FastImplementer) -> AttractorGeometry:
    f = imp.f_map
    fp = fixed_points(f)
    a = fp.attracting
    if a is None or a is INFINITY:
        raise DomainError(f"f_lambda at {imp.lambda0} has no finite attracting fixed point")
    a_q = a if fp.exact else GaussianRational.from_complex(a, FIXED_POINT_PREC // 2)

    with mp.workprec(FIXED_POINT_PREC):
        lam = imp.lambda0.to_mpc()
        a_mp = a_q.to_mpc()
        slope = abs(lam) / abs(1 + a_mp) ** 2
        eta = max(mp.mpf(NEAR_ETA.numerator) / NEAR_ETA.denominator, (1 + slope) / 2)
        # |f'(z)| = |lam|/|1+z|^2 <= eta on B(a, |1+a| - sqrt(|lam|/eta))
        rho = abs(1 + a_mp) - mp.sqrt(abs(lam) / eta)
    if rho <= 0:
        raise InternalError("no contracting neighbourhood of the attracting fixed point", {"lambda0": str(imp.lambda0)})
    v_disk = RationalDisk.from_center_radius(a_q, Fraction(float(rho * 0.99)))

    u = imp.disk
    points: List[SpherePoint] = list(u.points)
    outside: SpherePoint = u.center + 2 * (u.p1 - u.center)
    d0: Optional[RationalDisk] = None
    n = 0
    for n in range(1, MAX_PULLBACK_STEPS + 1):
        points = [f(p) for p in points]
        outside = f(outside)
        if any(p is INFINITY for p in points) or outside is INFINITY:
            continue
        try:
            circle = RationalDisk(*points)
        except ConstructionError:
            continue
        if circle.locate(outside) is PointLocation.INSIDE and disk_in_disk(circle, v_disk):
            d0 = circle
            break
    if d0 is None:
        raise InternalError("forward images of U never fill a neighbourhood of a", {"steps": MAX_PULLBACK_STEPS})

    disks = [d0]
    try:
        for _ in range(3):
            disks.append(disk_image(f, disks[-1]))
    except NotADisk as e:
        raise InternalError(f"nested disks around the attracting point: {e}") from e
    gap = min(_nesting_gap(disks[i - 1], disks[i]) for i in range(1, 4))
    if gap <= 0:
        raise InternalError("disks around the attracting point are not strictly nested", {"n": n})

    h = inverse(power(f, n + 3))
    logger.debug("Attractor geometry at %s: N = %d, gap %.3g, eta %s", imp.lambda0, n, float(gap), mp.nstr(eta, 5))
    return AttractorGeometry(a_q, fp.exact, eta, v_disk, n, tuple(disks), gap, h, f, inverse(f))


def resolution_bits(eps: Fraction) -> int:
    """Grid bits that resolve a point to far below eps."""
    eps_bits = max(0, eps.denominator.bit_length() - eps.numerator.bit_length() + 1)
    return max(FIXED_POINT_PREC // 2, eps_bits + 64)


# --- Stages ---
def _pair_in_disk(imp: FastImplementer, disk: RationalDisk) -> Optional[int]:
    """Lowest i with |z_i - c| < inner_radius(disk), all exact."""
    eps = inner_radius(disk)
    bound = eps * eps
    bits = resolution_bits(eps)
    c = disk.center
    cf, rf = c.to_complex(), float(eps)
    for i, pair in enumerate(imp.pairs):
        zf = pair.z_fix.to_complex()
        if abs(zf - cf) > rf * (1 + 1e-6) + 1e-12:
            continue
        if (pair.fixed_point(bits) - c).norm() < bound:
            return i
    return None


def fast_into_d1(imp: FastImplementer, d1: RationalDisk) -> Tuple[int, List[int], RationalDisk]:
    """Grow D_1 through inverse branches until it holds a fixed point z_i.

    Returns (i, [j_1, ..., j_{K-1}], D_K) with (g_{j_1} o ... o g_{j_{K-1}})(D_K) in D_1.
    """
    if not disk_in_disk(d1, imp.disk):
        raise GeometryPrecondition("D_1 must lie inside U")
    index = imp.image_index
    current = d1
    chosen: List[int] = []
    for step in range(MAX_EXPANSION_STEPS):
        i = _pair_in_disk(imp, current)
        if i is not None:
            logger.debug("Reached z_%d after %d expansion steps", i, step)
            return i, chosen, current
        options = [j for j in index.containing(current.center) if not disk_in_disk(imp.images[j], current)]
        if not options:
            raise InternalError(
                "no image disk holds the current center",
                {"step": step, "disk": current.to_json()},
            )
        j = options[0]
        small = dyadic_inner_disk(generate_disk(current, imp.images[j]))
        grown = disk_image(inverse(imp.pairs[j].g), small)
        if grown.radius_squared < 2 * current.radius_squared:
            raise InternalError(
                "expansion step failed to double the area",
                {"step": step, "pair": j, "ratio": float(grown.radius_squared / current.radius_squared)},
            )
        chosen.append(j)
        current = grown
    raise InternalError("expansion did not reach a fixed point", {"steps": MAX_EXPANSION_STEPS})


def quickly_to_zi(imp: FastImplementer, i: int, q: GaussianRational, eps: Fraction) -> int:
    """K with |g_i^K(0) - Q| < eps, checked exactly.

    B(Q, eps) must lie in U. The fixed point is resolved on a grid far finer than eps,
    so the stopping rule holds for any eps.
    """
    pair = imp.pairs[i]
    q = GaussianRational.coerce(q)
    eps = Fraction(eps)
    if eps <= 0:
        raise DomainError("eps must be positive")
    eps2 = eps * eps
    z = pair.fixed_point(resolution_bits(eps))
    if (z - q).norm() >= eps2:
        raise DomainError(f"target is not within eps of z_{i}")
    if not disk_in_disk(RationalDisk.from_center_radius(q, eps), imp.disk):
        raise GeometryPrecondition("B(Q, eps) must lie inside U")
    g = pair.g
    w: SpherePoint = ZERO
    k = 0
    while w is INFINITY or (w - z).norm() * 4 >= eps2:
        w = g(w)
        k += 1
        if k > MAX_FORWARD_STEPS:
            raise InternalError(f"orbit of 0 under g_{i} did not approach z_{i}", {"steps": k})
    for j in range(4):
        if w is not INFINITY and (w - q).norm() < eps2:
            return k + j
        w = g(w)
    raise InternalError(f"none of four further iterates of g_{i} entered the target disk", {"k": k, "eps": str(eps)})


def close_to_p(imp: FastImplementer, p: GaussianRational, eps: Fraction) -> Tuple[RationalDisk, int]:
    """A disk D inside U and K with f^K(D) inside B(P, eps)."""
    p = GaussianRational.coerce(p)
    eps = Fraction(eps)
    if eps <= 0:
        raise DomainError("eps must be positive")
    geo = imp.attractor
    if geo.near(p, eps):
        raise WrongBranch("targets within eps/2 of the attracting fixed point take the forward branch")

    work = eps if eps < geo.gap else geo.gap / 2
    z: SpherePoint = p
    pulls = 0
    # P inside D_2: pull back until the point leaves D_2 (it then lies in D_1)
    while geo.disks[2].locate(z) is PointLocation.INSIDE:
        z = geo.f_inv(z)
        pulls += 1
        if z is INFINITY or pulls > MAX_PULLBACK_STEPS:
            raise InternalError("pull-back from D_2 did not terminate", {"steps": pulls})
    k = pulls + geo.n + 3
    forward = power(geo.f, k)
    target = RationalDisk.from_center_radius(p, eps)
    for _ in range(128):
        try:
            d = dyadic_inner_disk(disk_image(geo.h, RationalDisk.from_center_radius(z, work)))
            image = disk_image(forward, d)
        except NotADisk:
            work /= 2
            continue
        if disk_in_disk(d, imp.disk) and disk_in_disk(image, target):
            logger.debug("close_to_p: K = %d (%d pull-backs), radius %.3g", k, pulls, d.float_radius())
            return d, k
        work /= 2
    raise InternalError("could not fit a pre-image disk for P", {"p": str(p), "eps": str(eps), "k": k})


# --- Plans ---
@dataclass(frozen=True)
class PlanStep:
    kind: str  # "lambda0", "mu" or "chi"
    index: int
    label: GaussianRational


@dataclass(frozen=True)
class ImplementationPlan:
    lambda0: GaussianRational
    target: GaussianRational
    eps: Fraction
    steps: Tuple[PlanStep, ...]
    branch: str
    stages: Dict[str, Any] = field(default_factory=dict)

    @property
    def labels(self) -> List[GaussianRational]:
        return [s.label for s in self.steps]

    def __len__(self) -> int:
        return len(self.steps)

    def to_json(self) -> Dict[str, Any]:
        return {
            "lambda0": str(self.lambda0),
            "target": str(self.target),
            "eps": str(self.eps),
            "branch": self.branch,
            "K": len(self.steps),
            "labels": [str(s.label) for s in self.steps],
            "blocks": [[s.kind, s.index] for s in self.steps],
            "stages": self.stages,
        }


def replay_plan(plan: ImplementationPlan) -> SpherePoint:
    """(f_{w_K} o ... o f_{w_1})(0), exactly."""
    z: SpherePoint = ZERO
    for label in plan.labels:
        z = f_lambda(label)(z)
    return z


def _replay_error(plan: ImplementationPlan) -> Optional[Fraction]:
    value = replay_plan(plan)
    if value is INFINITY:
        return None
    return (value - plan.target).norm()


def _forward_plan(imp: FastImplementer, p: GaussianRational, eps: Fraction) -> ImplementationPlan:
    f = imp.f_map
    z: SpherePoint = ZERO
    eps2 = eps * eps
    k = 0
    while True:
        z = f(z)
        k += 1
        if z is not INFINITY and (z - p).norm() < eps2:
            break
        if k > MAX_FORWARD_STEPS:
            raise InternalError("forward orbit of 0 did not reach the target", {"steps": k})
    steps = tuple(PlanStep("lambda0", -1, imp.lambda0) for _ in range(k))
    return ImplementationPlan(imp.lambda0, p, eps, steps, "near", {"K1": k})


def run_fast_implementation(imp: FastImplementer, p: Any, eps: Any) -> ImplementationPlan:
    """Labels w_1..w_K, the last one lambda0, whose composition sends 0 into B(P, eps)."""
    if not imp.certified:
        raise DomainError("the implementer is not certified")
    p = GaussianRational.coerce(p)
    eps = Fraction(eps)
    if eps <= 0:
        raise DomainError("eps must be positive")
    started = time.perf_counter()
    geo = imp.attractor

    if geo.near(p, eps):
        plan = _forward_plan(imp, p, eps)
    else:
        d1, k1 = close_to_p(imp, p, eps)
        i, chosen, dk = fast_into_d1(imp, d1)
        k3 = quickly_to_zi(imp, i, dk.center, inner_radius(dk))
        steps: List[PlanStep] = []
        pair = imp.pairs[i]
        for _ in range(k3):
            steps.append(PlanStep("chi", i, pair.chi))
            steps.append(PlanStep("mu", i, pair.mu))
        for j in reversed(chosen):
            steps.append(PlanStep("chi", j, imp.pairs[j].chi))
            steps.append(PlanStep("mu", j, imp.pairs[j].mu))
        steps.extend(PlanStep("lambda0", -1, imp.lambda0) for _ in range(k1))
        stages = {"K1": k1, "K2": len(chosen), "K3": k3, "i": i, "js": chosen}
        plan = ImplementationPlan(imp.lambda0, p, eps, tuple(steps), "far", stages)

    error = _replay_error(plan)
    if error is None or error >= eps * eps:
        raise InternalError(
            "plan does not replay into the target disk",
            {"target": str(p), "eps": str(eps), "branch": plan.branch, "stages": plan.stages},
        )
    plan.stages["seconds"] = round(time.perf_counter() - started, 6)
    logger.info("Plan for P=%s, eps=%s: K = %d (%s branch)", p, eps, len(plan), plan.branch)
    return plan


# --- Trees ---
def _block_for(step: PlanStep, imp: FastImplementer) -> RootedGraph:
    if step.kind == "lambda0":
        return single_vertex(imp.delta)
    pair = imp.pairs[step.index]
    tree = pair.tree_g if step.kind == "mu" else pair.tree_gbar
    if tree is None:
        raise DomainError("value-only implementers cannot emit trees")
    return tree


def emit_tree(plan: ImplementationPlan, imp: FastImplementer) -> Tuple[RootedGraph, PartitionPair]:
    """The path tree of the plan and its exact (Z_in, Z_out) at lambda0."""
    if not imp.has_trees:
        raise DomainError("value-only implementers cannot emit trees")
    if plan.lambda0 != imp.lambda0:
        raise DomainError("plan and implementer disagree on lambda0")
    blocks = [_block_for(s, imp) for s in plan.steps]
    tree = implement_on_path(blocks, imp.delta)

    cache: Dict[int, PartitionPair] = {}
    z_in, z_out = ZERO, GaussianRational(1)
    for block in blocks:
        key = id(block)
        if key not in cache:
            cache[key] = tree_partition(block, imp.lambda0)
        h = cache[key]
        z_in, z_out = h.z_in * z_out, h.z_out * (z_in + z_out)
    pair = PartitionPair(z_in, z_out)

    if z_out.is_zero():
        if is_exceptional_candidate(imp.lambda0, imp.delta):
            raise ExceptionalParameter(f"Z_out vanishes at the exceptional candidate {imp.lambda0}")
        raise InternalError("Z_out vanished away from the exceptional candidates")
    if (z_in / z_out - plan.target).norm() >= plan.eps * plan.eps:
        raise InternalError("emitted tree misses the target", {"target": str(plan.target)})
    return tree, pair
