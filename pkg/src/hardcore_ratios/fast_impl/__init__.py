from .disks import dyadic_inner_disk, generate_disk
from .implementer import (
    Certificate,
    FastImplementer,
    ImplementerPair,
    certify,
    cover_check,
    design_geometry,
    derivative_in_sector,
)
from .pipeline import (
    ImplementationPlan,
    attractor_geometry,
    close_to_p,
    emit_tree,
    fast_into_d1,
    quickly_to_zi,
    replay_plan,
    run_fast_implementation,
)
from .search import design_implementer, search_fast_implementer
from .sector import SectorSpec, seed_pair, seed_residuals

__all__ = [
    "Certificate",
    "FastImplementer",
    "ImplementationPlan",
    "ImplementerPair",
    "SectorSpec",
    "attractor_geometry",
    "certify",
    "close_to_p",
    "cover_check",
    "derivative_in_sector",
    "design_geometry",
    "design_implementer",
    "dyadic_inner_disk",
    "emit_tree",
    "fast_into_d1",
    "generate_disk",
    "quickly_to_zi",
    "replay_plan",
    "run_fast_implementation",
    "search_fast_implementer",
    "seed_pair",
    "seed_residuals",
]
