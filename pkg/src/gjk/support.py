"""
Support Mappings
Per-body support vertex for a world-frame direction: exhaustive scan or
hill climbing over the mesh adjacency graph.

For a rigid transform, argmax_i v.(R x_i + t) = argmax_i (R^T v).x_i, so both
strategies work on local vertices with the direction rotated into the body.
"""

from typing import Optional, Tuple

import numpy as np

from src.errors import NonConvexGeometryError
from src.geometry.graph import VertexGraph
from src.gjk.kernels import climb, support_index
from src.kinematics.transform import Transform


def local_direction(transform: Optional[Transform], direction: np.ndarray) -> np.ndarray:
    direction = np.asarray(direction, dtype=np.float64).reshape(3)
    if not np.any(direction):
        raise ValueError("Support direction must be nonzero")
    if transform is None:
        return direction
    return transform.rotation.T @ direction


def exhaustive_index(vertices: np.ndarray, direction: np.ndarray) -> int:
    """Index maximizing direction.x over all vertices; lowest index on ties."""
    return int(support_index(vertices, np.asarray(direction, dtype=np.float64)))


def hill_climb(graph: VertexGraph, direction: np.ndarray, start: int) -> Tuple[int, int]:
    """
    Walk to the best strictly-improving neighbour until none improves.

    Args:
        graph: Convex vertex graph
        direction: search direction in the graph's local frame
        start: starting vertex index

    Returns:
        (vertex index, number of moves)

    Raises:
        NonConvexGeometryError: more moves than vertices
    """
    indptr, indices = graph.csr
    index, moves = climb(
        graph.vertices, indptr, indices, np.asarray(direction, dtype=np.float64), start
    )
    if moves < 0:
        raise NonConvexGeometryError(
            f"Hill climb exceeded {len(graph)} moves; the graph is not convex",
            vertex=int(index),
        )
    return int(index), int(moves)


def support_exhaustive(
    graph: VertexGraph, transform: Optional[Transform], direction: np.ndarray
) -> int:
    """
    Vertex of the transformed graph furthest along `direction`.

    Raises:
        ValueError: zero direction
    """
    return exhaustive_index(graph.vertices, local_direction(transform, direction))


def support_hill_climb(
    graph: VertexGraph,
    transform: Optional[Transform],
    direction: np.ndarray,
    start: int = 0,
) -> int:
    """Hill-climbing support from `start`; equals the exhaustive maximum on convex graphs."""
    if not 0 <= start < len(graph):
        raise ValueError(f"Start vertex {start} out of range for {len(graph)} vertices")
    index, _ = hill_climb(graph, local_direction(transform, direction), start)
    return index
