"""
Simplex Distance Sub-algorithm
Closest point of a 1-4 point simplex to the origin, with region pruning.

Witnesses are stored newest first: points[0] is A, the support point added
in the current GJK iteration. Because GJK only adds a witness that improves
on the previous simplex, the origin can never lie in a Voronoi region that
excludes A, so only regions touching A are tested.

Boundary cases (a region test dot product of exactly 0) go to the
lower-dimensional feature. The region tests themselves run in the compiled
kernel (src.gjk.kernels.reduce_simplex); this module wraps them for callers
that work with Witness objects.
"""

from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from src.gjk.kernels import reduce_simplex


@dataclass(frozen=True, eq=False)
class Witness:
    """
    Point of the Minkowski difference P - Q.

    Attributes:
        w: p - q in world coordinates
        p_index, q_index: source vertex indices (None for free points)
        p, q: the world points the witness came from
    """

    w: np.ndarray
    p_index: Optional[int] = None
    q_index: Optional[int] = None
    p: Optional[np.ndarray] = None
    q: Optional[np.ndarray] = None

    @classmethod
    def of(cls, point: Sequence[float]) -> "Witness":
        return cls(np.asarray(point, dtype=np.float64).reshape(3))

    @property
    def key(self) -> Optional[Tuple[int, int]]:
        if self.p_index is None or self.q_index is None:
            return None
        return (self.p_index, self.q_index)


@dataclass(frozen=True, eq=False)
class Simplex:
    """One to four witnesses, newest first."""

    points: Tuple[Witness, ...]

    def __post_init__(self):
        points = tuple(self.points)
        if not 1 <= len(points) <= 4:
            raise ValueError(f"Simplex must hold 1 to 4 witnesses, got {len(points)}")
        keys = [p.key for p in points if p.key is not None]
        if len(keys) != len(set(keys)):
            raise ValueError("Simplex witnesses must have distinct index pairs")
        object.__setattr__(self, "points", points)

    @classmethod
    def of(cls, *points: Sequence[float]) -> "Simplex":
        """Simplex of free points, newest first."""
        return cls(tuple(Witness.of(p) for p in points))

    def __len__(self) -> int:
        return len(self.points)

    def __getitem__(self, index: int) -> Witness:
        return self.points[index]

    def contains_key(self, key: Optional[Tuple[int, int]]) -> bool:
        return key is not None and any(p.key == key for p in self.points)

    def push(self, witness: Witness) -> "Simplex":
        """New simplex with `witness` as A."""
        return Simplex((witness,) + self.points)

    def coordinates(self) -> np.ndarray:
        return np.array([p.w for p in self.points])


@dataclass(frozen=True, eq=False)
class SimplexStep:
    """
    Result of one sub-algorithm evaluation.

    Attributes:
        direction: v, from the closest simplex point toward the origin;
            its norm is the current best distance
        reduced: smallest sub-simplex supporting the closest point
        contains_origin: the origin lies in the simplex
        barycentric: coefficients of the closest point over `reduced`
    """

    direction: np.ndarray
    reduced: Simplex
    contains_origin: bool
    barycentric: np.ndarray

    @property
    def distance(self) -> float:
        return float(np.sqrt(self.direction @ self.direction))

    @property
    def closest(self) -> np.ndarray:
        return -self.direction

    def closest_points(self) -> Tuple[np.ndarray, np.ndarray]:
        """Closest points on P and Q from the witnesses' source points."""
        p = sum(lam * wit.p for lam, wit in zip(self.barycentric, self.reduced.points))
        q = sum(lam * wit.q for lam, wit in zip(self.barycentric, self.reduced.points))
        return np.asarray(p, dtype=np.float64), np.asarray(q, dtype=np.float64)


def _reduce(simplex: Simplex) -> SimplexStep:
    n = len(simplex)
    W = np.zeros((4, 3))
    W[:n] = simplex.coordinates()
    direction, mask, weights, contains = reduce_simplex(W, n)
    kept = tuple(p for j, p in enumerate(simplex.points) if mask & (1 << j))
    return SimplexStep(
        np.array(direction, dtype=np.float64),
        Simplex(kept),
        bool(contains),
        np.array(weights[: len(kept)], dtype=np.float64),
    )


def closest_on_line(simplex: Simplex) -> SimplexStep:
    if len(simplex) != 2:
        raise ValueError(f"closest_on_line needs 2 witnesses, got {len(simplex)}")
    return _reduce(simplex)


def closest_on_triangle(simplex: Simplex) -> SimplexStep:
    if len(simplex) != 3:
        raise ValueError(f"closest_on_triangle needs 3 witnesses, got {len(simplex)}")
    return _reduce(simplex)


def closest_on_tetrahedron(simplex: Simplex) -> SimplexStep:
    """
    Containment test against all four face planes, then the triangle case on
    the faces through A that the origin lies outside of. Face BCD is never a
    candidate for the closest feature.

    A flat tetrahedron (volume below the flatness threshold) runs the
    triangle case on all three faces through A and keeps the nearest; equal
    distances go to the face of largest area, then to the order ABC, ACD,
    ABD. Which witness is dropped follows from the chosen face, not from
    which removal leaves the largest area; the nearest face is never farther
    than the face that rule would keep.
    """
    if len(simplex) != 4:
        raise ValueError(f"closest_on_tetrahedron needs 4 witnesses, got {len(simplex)}")
    return _reduce(simplex)


def distance_subalgorithm(simplex: Simplex) -> SimplexStep:
    """
    Closest point of the simplex to the origin.

    Returns:
        SimplexStep with the new search direction, the reduced simplex and the
        closest point's barycentric coefficients over it
    """
    return _reduce(simplex)
