"""
Convex Hulls
Quickhull preprocessing (via Qhull) and the convexity check used to gate
hill-climbing support queries.
"""

from dataclasses import dataclass
from typing import Optional, Sequence, Union
import logging

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from src.errors import DegenerateGeometryError
from src.geometry.graph import VertexGraph, adjacency_from_faces

logger = logging.getLogger("geometry.hull")

# Relative to the bounding-box diagonal of the input.
HULL_TOLERANCE = 1e-9


def bounding_diagonal(points: np.ndarray) -> float:
    """Bounding-box diagonal, or 1.0 for a single point."""
    points = np.asarray(points, dtype=np.float64).reshape(-1, 3)
    if points.shape[0] == 0:
        return 1.0
    diagonal = float(np.linalg.norm(points.max(axis=0) - points.min(axis=0)))
    return diagonal if diagonal > 0.0 else 1.0


def affine_rank(points: np.ndarray, tolerance: float = HULL_TOLERANCE) -> int:
    """Dimension of the affine hull (0 for a point, 3 for a solid)."""
    points = np.asarray(points, dtype=np.float64).reshape(-1, 3)
    if points.shape[0] <= 1:
        return 0
    centered = points - points.mean(axis=0)
    return int(
        np.linalg.matrix_rank(centered, tol=tolerance * bounding_diagonal(points))
    )


def convex_hull(points: Union[np.ndarray, Sequence]) -> VertexGraph:
    """
    Convex hull of a point set as a vertex graph.

    Only extreme points are kept, in input order. Hull facets come back
    triangulated and wound outward; adjacency follows the triangle edges.

    Args:
        points: (n, 3) coordinates, n >= 4, spanning three dimensions

    Returns:
        VertexGraph with faces and metadata {"source": "hull", ...}

    Raises:
        DegenerateGeometryError: fewer than 4 points, or coplanar/collinear input
    """
    points = np.asarray(points, dtype=np.float64).reshape(-1, 3)
    if points.shape[0] < 4:
        raise DegenerateGeometryError(
            f"Convex hull needs at least 4 points, got {points.shape[0]}"
        )
    if not np.all(np.isfinite(points)):
        raise DegenerateGeometryError("Convex hull input contains non-finite points")
    rank = affine_rank(points)
    if rank < 3:
        kind = {0: "coincident", 1: "collinear", 2: "coplanar"}[rank]
        raise DegenerateGeometryError(f"Convex hull input is {kind}: not a 3D body")

    try:
        hull = ConvexHull(points)
    except QhullError as e:
        raise DegenerateGeometryError(f"Qhull failed: {e}") from e

    kept = np.sort(hull.vertices)
    remap = np.full(points.shape[0], -1, dtype=np.intp)
    remap[kept] = np.arange(kept.shape[0])
    faces = remap[hull.simplices]

    # Wind every triangle so its right-hand normal agrees with the facet's
    # outward plane normal.
    vertices = points[kept]
    tris = vertices[faces]
    normals = np.cross(tris[:, 1] - tris[:, 0], tris[:, 2] - tris[:, 0])
    inward = np.einsum("ij,ij->i", normals, hull.equations[:, :3]) < 0.0
    faces[inward] = faces[inward][:, ::-1]

    diagonal = bounding_diagonal(points)
    offsets = points @ hull.equations[:, :3].T + hull.equations[:, 3]
    outside = float(offsets.max())
    if outside > HULL_TOLERANCE * diagonal:
        logger.warning(f"Hull leaves an input point {outside:.3e} outside its faces")

    logger.debug(f"Hull of {points.shape[0]} points has {kept.shape[0]} vertices")
    return VertexGraph(
        vertices,
        adjacency_from_faces(kept.shape[0], faces),
        faces,
        {
            "source": "hull",
            "closed": True,
            "input_points": int(points.shape[0]),
            "max_outside": outside,
            "warnings": [],
        },
    )


@dataclass(frozen=True)
class ConvexityReport:
    """Outcome of verify_convex; truthy when the graph is convex."""

    convex: bool
    vertex: Optional[int] = None
    message: str = ""

    def __bool__(self) -> bool:
        return self.convex


def verify_convex(graph: VertexGraph) -> ConvexityReport:
    """
    Check that every vertex of the graph is an extreme point of the vertex set.

    A vertex in the hull's interior or in the interior of a hull face is a
    violation. Flat and linear vertex sets are checked within their affine hull.

    Returns:
        ConvexityReport naming the lowest offending vertex index on failure
    """
    vertices = graph.vertices
    n = vertices.shape[0]
    if n == 0:
        return ConvexityReport(False, None, "Graph has no vertices")
    if n == 1:
        return ConvexityReport(True)

    rank = affine_rank(vertices)
    centered = vertices - vertices.mean(axis=0)
    if rank == 0:
        return ConvexityReport(False, 1, "Vertices coincide")
    if rank == 1:
        axis = np.linalg.svd(centered, full_matrices=False)[2][0]
        coords = centered @ axis
        extreme = {int(np.argmin(coords)), int(np.argmax(coords))}
    else:
        if rank == 2:
            basis = np.linalg.svd(centered, full_matrices=False)[2][:2]
            projected = centered @ basis.T
        else:
            projected = vertices
        try:
            extreme = set(ConvexHull(projected).vertices.tolist())
        except QhullError as e:
            return ConvexityReport(False, None, f"Qhull failed: {e}")

    for index in range(n):
        if index not in extreme:
            return ConvexityReport(
                False,
                index,
                f"Vertex {index} at {vertices[index].tolist()} is not an extreme point",
            )
    return ConvexityReport(True)
