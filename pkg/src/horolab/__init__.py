"""Horoball geometry, orbit counting and Diophantine approximation for Kleinian groups."""

__version__ = "0.1.0"

from .hypcore import ModelPoint, MoebiusMap, boundary_ball_coords, hyperbolic_distance  # noqa: E402
from .groups import GroupSpec, load_catalog, load_catalog_file, resolve_group  # noqa: E402
from .orbits import Orbit, enumerate_orbit, estimate_delta, shell_counts  # noqa: E402
from .horoballs import HoroballFamily, build_family, disjointness_constant  # noqa: E402

__all__ = [
    "__version__",
    "ModelPoint", "MoebiusMap", "boundary_ball_coords", "hyperbolic_distance",
    "GroupSpec", "load_catalog", "load_catalog_file", "resolve_group",
    "Orbit", "enumerate_orbit", "estimate_delta", "shell_counts",
    "HoroballFamily", "build_family", "disjointness_constant",
]
