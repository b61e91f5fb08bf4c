from __future__ import annotations

from abc import ABC, abstractmethod
from typing import Any, Dict

from ..datamodels import RegionVerdict


class Region(ABC):
    """Abstract base class for a decidable parameter region."""

    name = "region"

    def __init__(self, config: Dict[str, Any]):
        self.config = config

    @abstractmethod
    def verdict(self, lam: Any, delta: int) -> RegionVerdict:
        """Return the membership verdict for `lam` at degree bound `delta`."""
        pass
