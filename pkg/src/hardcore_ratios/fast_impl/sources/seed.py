from __future__ import annotations

import logging
from typing import Any, Optional

from ...config import SEED_BITS
from ...errors import DegenerateSeed
from ...exact_arith import GaussianRational
from ...moebius import g_map
from ..implementer import ImplementerPair
from ..sector import rational_seed_pair
from .base import PairSource

logger = logging.getLogger("hardcore")


class SeedPairSource(PairSource):
    """Rationalized seed pairs: exact fixed points, no trees behind the values."""

    name = "seed"

    def find_pair(self, target: GaussianRational, alpha: Any, tolerance: Any) -> Optional[ImplementerPair]:
        self.spent += 1
        bits = int(self.config.get("bits", SEED_BITS))
        try:
            mu, chi = rational_seed_pair(target, alpha, bits)
        except DegenerateSeed as e:
            logger.debug("Seed at %s rejected: %s", target, e)
            self.rejections["degenerate_seed"] += 1
            return None
        return ImplementerPair(mu, chi, g_map(mu, chi), target, True)
