from __future__ import annotations

from typing import Any, Dict, List, Type

from .base import PairSource
from .catalog import CatalogPairSource
from .seed import SeedPairSource

AVAILABLE_PAIR_SOURCES: Dict[str, Type[PairSource]] = {
    "catalog": CatalogPairSource,
    "seed": SeedPairSource,
}


class PairSourceManager:
    def __init__(self, config: Dict[str, Any], seed: int = 0):
        self.config = config
        self.seed = seed
        self.sources: Dict[str, PairSource] = {}
        self._load_sources()

    def _load_sources(self) -> None:
        """Load the pair sources named in config; the catalog source when none are."""
        source_config = self.config.get("pair_sources") or {"catalog": {}}
        for name, source_class in AVAILABLE_PAIR_SOURCES.items():
            if name in source_config:
                self.sources[name] = source_class({**(source_config[name] or {}), "seed": self.seed})

    def get_source(self, name: str) -> PairSource | None:
        return self.sources.get(name)

    def get_all_sources(self) -> List[PairSource]:
        return list(self.sources.values())
