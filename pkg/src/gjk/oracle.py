"""
Brute-force Distance Oracle
Reference answers for GJK and the simplex sub-algorithm, computed by
enumerating every feature instead of pruning.

oracle_distance materializes the Minkowski difference (all p - q pairs),
takes its convex hull and measures the origin against every hull triangle.
It is quadratic in mesh size and meant for tests and offline checks.
"""

from itertools import combinations
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from src.geometry.graph import VertexGraph
from src.geometry.hull import affine_rank
from src.gjk.kernels import CONTACT_TOLERANCE
from src.kinematics.transform import Transform


def closest_point_on_segment(
    point: np.ndarray, a: np.ndarray, b: np.ndarray
) -> np.ndarray:
    ab = b - a
    denom = ab @ ab
    if denom == 0.0:
        return a.copy()
    t = np.clip((point - a) @ ab / denom, 0.0, 1.0)
    return a + t * ab


def closest_point_on_triangle(
    point: np.ndarray, a: np.ndarray, b: np.ndarray, c: np.ndarray
) -> np.ndarray:
    """Closest point of triangle abc to `point`, by Voronoi-region classification."""
    ab = b - a
    ac = c - a
    ap = point - a
    d1 = ab @ ap
    d2 = ac @ ap
    if d1 <= 0.0 and d2 <= 0.0:
        return a.copy()

    bp = point - b
    d3 = ab @ bp
    d4 = ac @ bp
    if d3 >= 0.0 and d4 <= d3:
        return b.copy()

    vc = d1 * d4 - d3 * d2
    if vc <= 0.0 and d1 >= 0.0 and d3 <= 0.0:
        return a + (d1 / (d1 - d3)) * ab

    cp = point - c
    d5 = ab @ cp
    d6 = ac @ cp
    if d6 >= 0.0 and d5 <= d6:
        return c.copy()

    vb = d5 * d2 - d1 * d6
    if vb <= 0.0 and d2 >= 0.0 and d6 <= 0.0:
        return a + (d2 / (d2 - d6)) * ac

    va = d3 * d6 - d5 * d4
    if va <= 0.0 and (d4 - d3) >= 0.0 and (d5 - d6) >= 0.0:
        return b + ((d4 - d3) / ((d4 - d3) + (d5 - d6))) * (c - b)

    denom = va + vb + vc
    if denom == 0.0:
        candidates = [
            closest_point_on_segment(point, a, b),
            closest_point_on_segment(point, b, c),
            closest_point_on_segment(point, a, c),
        ]
        return min(candidates, key=lambda x: (x - point) @ (x - point))
    return a + ab * (vb / denom) + ac * (vc / denom)


def _inside_tetrahedron(points: np.ndarray) -> bool:
    a = points[0]
    basis = (points[1:] - a).T
    try:
        x = np.linalg.solve(basis, -a)
    except np.linalg.LinAlgError:
        return False
    weights = np.concatenate([[1.0 - x.sum()], x])
    return bool(np.all(weights >= 0.0))


def simplex_distance_reference(points: Sequence[Sequence[float]]) -> Tuple[float, np.ndarray]:
    """
    Distance from the origin to the convex hull of 1-4 points by checking
    every vertex, edge and triangle (and containment for four points).

    Returns:
        (distance, closest point)
    """
    points = np.asarray(points, dtype=np.float64).reshape(-1, 3)
    origin = np.zeros(3)
    if points.shape[0] == 4 and _inside_tetrahedron(points):
        return 0.0, origin

    candidates = [p.copy() for p in points]
    for i, j in combinations(range(points.shape[0]), 2):
        candidates.append(closest_point_on_segment(origin, points[i], points[j]))
    for i, j, k in combinations(range(points.shape[0]), 3):
        candidates.append(closest_point_on_triangle(origin, points[i], points[j], points[k]))
    best = min(candidates, key=lambda x: x @ x)
    return float(np.sqrt(best @ best)), best


def _distance_to_triangles(triangles: np.ndarray) -> float:
    origin = np.zeros(3)
    best = np.inf
    for a, b, c in triangles:
        x = closest_point_on_triangle(origin, a, b, c)
        best = min(best, x @ x)
    return float(np.sqrt(best))


def _flat_distance(points: np.ndarray, rank: int) -> float:
    centered = points - points.mean(axis=0)
    axes = np.linalg.svd(centered, full_matrices=False)[2]
    if rank == 0:
        return float(np.linalg.norm(points[0]))
    if rank == 1:
        coords = centered @ axes[0]
        a = points[int(np.argmin(coords))]
        b = points[int(np.argmax(coords))]
        x = closest_point_on_segment(np.zeros(3), a, b)
        return float(np.sqrt(x @ x))
    polygon = ConvexHull(centered @ axes[:2].T).vertices
    fan = np.array(
        [[points[polygon[0]], points[polygon[k]], points[polygon[k + 1]]]
         for k in range(1, polygon.shape[0] - 1)]
    )
    return _distance_to_triangles(fan)


def minkowski_points(
    P: VertexGraph,
    T_P: Optional[Transform],
    Q: VertexGraph,
    T_Q: Optional[Transform],
) -> np.ndarray:
    """All p - q in the world frame, as an (|P| * |Q|, 3) array."""
    p = P.vertices if T_P is None else T_P.apply(P.vertices)
    q = Q.vertices if T_Q is None else T_Q.apply(Q.vertices)
    return (p[:, None, :] - q[None, :, :]).reshape(-1, 3)


def oracle_distance(
    P: VertexGraph,
    T_P: Optional[Transform],
    Q: VertexGraph,
    T_Q: Optional[Transform],
) -> float:
    """
    Exact distance between two convex bodies from their Minkowski difference.

    Returns 0.0 when the origin is inside the difference hull or within the
    contact tolerance of its boundary.
    """
    points = minkowski_points(P, T_P, Q, T_Q)
    contact = CONTACT_TOLERANCE * max(1.0, float(np.abs(points).max()))

    rank = affine_rank(points)
    if rank < 3:
        distance = _flat_distance(points, rank)
        return 0.0 if distance <= contact else distance

    try:
        hull = ConvexHull(points)
    except QhullError:
        return _flat_distance(points, 2)

    # Origin inside when it is behind every outward facet plane.
    if np.max(hull.equations[:, 3]) <= contact:
        return 0.0
    distance = _distance_to_triangles(points[hull.simplices])
    return 0.0 if distance <= contact else distance
