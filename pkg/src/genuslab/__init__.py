"""Exact enumeration, uniform sampling and geometry of high-genus triangulations."""

from .maps import (
    RootedMap,
    Triangulation,
    build_map,
    canonical_form,
    canonical_key,
    submap_of_faces,
    tetrahedron,
    torus_grid,
    torus_one_vertex,
)
from .enumeration import TauTable, brute_force_census, calibrate_seed, gj_extend
from .asymptotics import theta_constants

__all__ = [
    "RootedMap",
    "Triangulation",
    "build_map",
    "canonical_form",
    "canonical_key",
    "submap_of_faces",
    "tetrahedron",
    "torus_grid",
    "torus_one_vertex",
    "TauTable",
    "brute_force_census",
    "calibrate_seed",
    "gj_extend",
    "theta_constants",
]

__version__ = "0.1.0"
