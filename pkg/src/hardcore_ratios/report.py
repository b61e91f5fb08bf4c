"""Everything the explorer shows about one parameter, computed off the UI thread."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

from .cayley import cayley_orbit
from .datamodels import RegionVerdict
from .exact_arith import GaussianRational
from .moebius import INFINITY, SpherePoint, classify, f_lambda, fixed_points, tr_squared
from .regions import RegionManager, attracting_fixed_point

logger = logging.getLogger("hardcore")

ORBIT_TAIL = 6


def _fmt(z: SpherePoint) -> str:
    if z is INFINITY:
        return "inf"
    if isinstance(z, GaussianRational):
        return str(z)
    w = complex(z)
    return f"{w.real:+.6g}{w.imag:+.6g}i"


@dataclass
class ParameterReport:
    lam: GaussianRational
    delta: int
    verdicts: List[RegionVerdict]
    kind: str
    tr_squared: str
    fixed_points: List[str]
    attracting: Optional[complex]
    orbit_tail: List[str] = field(default_factory=list)
    depth: int = 0

    def facts(self) -> List[tuple]:
        return [
            ("f_lambda", self.kind),
            ("tr^2", self.tr_squared),
            ("fixed points", ", ".join(self.fixed_points)),
            (
                f"attracting point of f_(lambda,{self.delta - 1})",
                "none" if self.attracting is None else _fmt(self.attracting),
            ),
        ]

    def to_json(self) -> Dict[str, Any]:
        return {
            "lambda": str(self.lam),
            "delta": self.delta,
            "verdicts": [v.to_json() for v in self.verdicts],
            "facts": dict(self.facts()),
            "orbit_tail": self.orbit_tail,
        }


def parameter_report(lam: Any, delta: int, regions: RegionManager, depth: int = 60) -> ParameterReport:
    lam = GaussianRational.coerce(lam)
    m = f_lambda(lam)
    points = fixed_points(m)
    # float orbit: exact iterates grow too fast for an interactive pane
    try:
        tail = [_fmt(z) for z in cayley_orbit(lam.to_complex(), delta - 1, depth)[-ORBIT_TAIL:]]
    except (OverflowError, ZeroDivisionError):
        tail = ["overflow"]
    report = ParameterReport(
        lam,
        delta,
        regions.verdicts(lam, delta),
        classify(m).value,
        str(tr_squared(m)),
        [_fmt(z) for z in points.points],
        None if lam.is_zero() else attracting_fixed_point(lam, delta),
        tail,
        depth,
    )
    logger.debug("Report for %s at delta=%d: %s", lam, delta, report.kind)
    return report
