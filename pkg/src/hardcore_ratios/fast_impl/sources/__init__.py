from .base import PairSource
from .catalog import CatalogPairSource
from .manager import AVAILABLE_PAIR_SOURCES, PairSourceManager
from .seed import SeedPairSource

__all__ = ["AVAILABLE_PAIR_SOURCES", "CatalogPairSource", "PairSource", "PairSourceManager", "SeedPairSource"]
