from .cardioid import attracting_fixed_point, attracting_fixed_point_test, cardioid_boundary, cardioid_contains
from .delta2 import delta2_zero, delta2_zero_parameter, path_zero_intervals
from .exceptional import exceptional_candidates, is_exceptional_candidate
from .manager import AVAILABLE_REGIONS, RegionManager
from .shearer import lambda_star, shearer_contains, shearer_radius

__all__ = [
    "AVAILABLE_REGIONS",
    "RegionManager",
    "attracting_fixed_point",
    "attracting_fixed_point_test",
    "cardioid_boundary",
    "cardioid_contains",
    "delta2_zero",
    "delta2_zero_parameter",
    "exceptional_candidates",
    "is_exceptional_candidate",
    "lambda_star",
    "path_zero_intervals",
    "shearer_contains",
    "shearer_radius",
]
