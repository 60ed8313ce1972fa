"""
GJK Module
Simplex sub-algorithm, support mappings, the distance loop and a brute-force
reference oracle.
"""

from .simplex import (
    Witness,
    Simplex,
    SimplexStep,
    closest_on_line,
    closest_on_triangle,
    closest_on_tetrahedron,
    distance_subalgorithm,
)
from .support import support_exhaustive, support_hill_climb
from .distance import DistanceResult, SupportHint, gjk_distance
from .oracle import oracle_distance, simplex_distance_reference

__all__ = [
    "Witness",
    "Simplex",
    "SimplexStep",
    "closest_on_line",
    "closest_on_triangle",
    "closest_on_tetrahedron",
    "distance_subalgorithm",
    "support_exhaustive",
    "support_hill_climb",
    "DistanceResult",
    "SupportHint",
    "gjk_distance",
    "oracle_distance",
    "simplex_distance_reference",
]
