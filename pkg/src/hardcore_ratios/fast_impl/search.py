from __future__ import annotations

import logging
import time
from typing import Any, List, Optional

from ..config import RADIUS_EXPONENT, SEARCH_BUDGET
from ..datamodels import RegionStatus
from ..errors import SearchFailed
from ..exact_arith import GaussianRational
from ..graph_core import TreeCatalog
from ..regions import shearer_contains
from .implementer import FastImplementer, ImplementerGeometry, ImplementerPair, certify, design_geometry
from .sources import CatalogPairSource, PairSource, SeedPairSource

logger = logging.getLogger("hardcore")


def _diagnostics(source: PairSource, **extra: Any) -> dict:
    info = {"source": source.name, "spent": source.spent, "rejections": dict(source.rejections)}
    if source.rejections:
        info["most_frequent_failure"] = source.rejections.most_common(1)[0][0]
    info.update(extra)
    return info


def assemble_implementer(
    lambda0: GaussianRational,
    delta: int,
    geometry: ImplementerGeometry,
    source: PairSource,
    budget: int,
) -> FastImplementer:
    """Ask the source for one pair per lattice target, then certify the result."""
    pairs: List[ImplementerPair] = []
    started = time.perf_counter()
    for k, target in enumerate(geometry.targets):
        if source.spent >= budget:
            raise SearchFailed(
                f"budget of {budget} exhausted after {k} of {len(geometry.targets)} targets",
                _diagnostics(source, found=len(pairs)),
            )
        pair = source.find_pair(target, geometry.alpha, geometry.tolerance)
        if pair is not None:
            pairs.append(pair)
    logger.debug(
        "%s source found %d/%d pairs in %.2fs",
        source.name, len(pairs), len(geometry.targets), time.perf_counter() - started,
    )
    if not pairs:
        raise SearchFailed("no pair passed the source filters", _diagnostics(source, found=0))

    imp = FastImplementer(lambda0, delta, tuple(pairs), geometry.disk, alpha=complex(geometry.alpha))
    imp.certificate = certify(imp)
    if not imp.certificate.passed:
        failed = imp.certificate.failures()
        raise SearchFailed(
            f"certification failed: {', '.join(failed)}",
            _diagnostics(source, found=len(pairs), failed_conditions=failed, certificate=imp.certificate.to_json()),
        )
    return imp


def search_fast_implementer(
    lambda0: Any,
    delta: int,
    catalog: Optional[TreeCatalog] = None,
    budget: int = SEARCH_BUDGET,
    source: Optional[PairSource] = None,
    radius_exponent: int = RADIUS_EXPONENT,
    seed: int = 0,
) -> FastImplementer:
    """A certified implementer at lambda0 whose pairs come from trees.

    `seed` drives the default catalog source; a given source keeps its own.
    """
    lam = GaussianRational.coerce(lambda0)
    if budget <= 0:
        raise SearchFailed("search budget must be positive", {"budget": budget})
    verdict = shearer_contains(lam, delta)
    if verdict.status is RegionStatus.INSIDE:
        raise SearchFailed(
            f"{lam} lies inside the Shearer disk, where tree ratios stay bounded",
            {"shearer_margin": verdict.margin},
        )
    if lam.is_real():
        logger.warning("Searching at real lambda0 = %s; implementers are expected only off the real line", lam)

    source = source or CatalogPairSource({"seed": seed})
    source.prepare(lam, delta, catalog)
    geometry = design_geometry(lam, radius_exponent)
    logger.info("Searching for a fast implementer at %s with %d targets", lam, len(geometry.targets))
    return assemble_implementer(lam, delta, geometry, source, budget)


def design_implementer(lambda0: Any, delta: int = 3, radius_exponent: int = RADIUS_EXPONENT) -> FastImplementer:
    """A certified implementer built from rationalized seed pairs; it has no trees."""
    lam = GaussianRational.coerce(lambda0)
    geometry = design_geometry(lam, radius_exponent)
    source = SeedPairSource({})
    source.prepare(lam, delta, None)
    return assemble_implementer(lam, delta, geometry, source, budget=len(geometry.targets) + 1)
