from __future__ import annotations

from dataclasses import asdict, dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional


# --- Data models ---
class RegionStatus(Enum):
    INSIDE = "inside"
    OUTSIDE = "outside"
    BOUNDARY = "boundary"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class RegionVerdict:
    region: str
    status: RegionStatus
    witness: Optional[complex] = None
    margin: Optional[float] = None
    exact: bool = False

    def to_json(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {
            "region": self.region,
            "status": self.status.value,
            "exact": self.exact,
        }
        if self.witness is not None:
            data["witness"] = [repr(self.witness.real), repr(self.witness.imag)]
        if self.margin is not None:
            data["margin"] = repr(self.margin)
        return data


@dataclass
class RunManifest:
    command: str
    flags: Dict[str, Any]
    seed: int
    versions: Dict[str, str]
    timing: Dict[str, float] = field(default_factory=dict)
    outputs: List[str] = field(default_factory=list)

    def to_json(self) -> Dict[str, Any]:
        return asdict(self)
