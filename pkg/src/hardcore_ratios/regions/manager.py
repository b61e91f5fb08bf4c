from __future__ import annotations

from typing import Any, Dict, List, Type

from ..datamodels import RegionVerdict
from .base import Region
from .cardioid import CardioidRegion
from .exceptional import ExceptionalRegion
from .shearer import ShearerRegion

AVAILABLE_REGIONS: Dict[str, Type[Region]] = {
    "cardioid": CardioidRegion,
    "shearer": ShearerRegion,
    "exceptional": ExceptionalRegion,
}


class RegionManager:
    def __init__(self, config: Dict[str, Any]):
        self.config = config
        self.regions: Dict[str, Region] = {}
        self._load_regions()

    def _load_regions(self) -> None:
        """Load the regions enabled in config, or all of them when none are named."""
        region_config = self.config.get("regions") or {name: {} for name in AVAILABLE_REGIONS}
        for name, region_class in AVAILABLE_REGIONS.items():
            if name in region_config:
                self.regions[name] = region_class(region_config[name] or {})

    def get_region(self, name: str) -> Region | None:
        return self.regions.get(name)

    def get_all_regions(self) -> List[Region]:
        return list(self.regions.values())

    def verdicts(self, lam: Any, delta: int) -> List[RegionVerdict]:
        out = []
        for region in self.get_all_regions():
            if region.name == "exceptional" and delta < 3:
                continue
            out.append(region.verdict(lam, delta))
        return out
