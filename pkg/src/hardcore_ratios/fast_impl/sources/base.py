from __future__ import annotations

import random
from abc import ABC, abstractmethod
from collections import Counter
from typing import Any, Dict, Optional

from ...exact_arith import GaussianRational
from ...graph_core import TreeCatalog
from ..implementer import ImplementerPair


class PairSource(ABC):
    """Abstract base class for a supplier of (mu, chi) pairs near a lattice target.

    Randomized choices draw from `rng`, seeded by the "seed" config key (default 0).
    """

    name = "pair source"

    def __init__(self, config: Dict[str, Any]):
        self.config = config
        self.seed = int(config.get("seed", 0))
        self.rng = random.Random(self.seed)
        self.spent = 0
        self.rejections: Counter = Counter()

    def prepare(self, lambda0: GaussianRational, delta: int, catalog: Optional[TreeCatalog]) -> None:
        """Build whatever lookup structures the source needs at lambda0."""
        self.lambda0 = lambda0
        self.delta = delta

    @abstractmethod
    def find_pair(self, target: GaussianRational, alpha: Any, tolerance: Any) -> Optional[ImplementerPair]:
        """Return a pair whose g fixes a point within `tolerance` of `target`
        with g' close to `alpha`, or None."""
        pass
