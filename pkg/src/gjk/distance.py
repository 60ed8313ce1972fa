"""
GJK Distance
Distance between two convex vertex graphs under rigid transforms.

Each iteration asks both bodies for a support vertex along the current search
direction, adds the resulting Minkowski-difference witness to the simplex and
lets the simplex sub-algorithm shrink it back to the feature closest to the
origin. With the hill-climbing strategy each support query starts from the
vertex the previous query ended on, and a SupportHint carries those vertices
from one frame to the next.

The loop itself is src.gjk.kernels.gjk_loop; this module validates inputs and
turns the kernel's flat outputs into result objects.
"""

from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple
import logging

import numpy as np

from src.config import GjkConfig, SupportStrategy
from src.errors import NonConvexGeometryError
from src.geometry.graph import VertexGraph
from src.gjk.kernels import STATUS_NONCONVEX_P, STATUS_OK, gjk_loop
from src.kinematics.transform import Transform

logger = logging.getLogger("gjk.distance")

_IDENTITY = np.eye(3)
_ORIGIN = np.zeros(3)
_NO_TRACE = np.zeros((0, 4, 3))
_NO_SIZES = np.zeros(0, dtype=np.int64)


@dataclass(frozen=True)
class SupportHint:
    """Support vertices a pair ended on; None when unset."""

    p_start: Optional[int] = None
    q_start: Optional[int] = None

    @property
    def is_set(self) -> bool:
        return self.p_start is not None and self.q_start is not None


_NO_HINT = SupportHint()


@dataclass(frozen=True, eq=False)
class DistanceResult:
    """
    Outcome of one distance query.

    Attributes:
        distance: Euclidean distance in meters, 0 when colliding
        colliding: bodies touch or overlap
        closest_p, closest_q: world-frame closest points
        iterations: GJK iterations run
        support_calls: per-body support evaluations
        converged: False when max_iterations was hit (distance is best so far)
        history: ||v|| after each iteration
    """

    distance: float
    colliding: bool
    closest_p: np.ndarray
    closest_q: np.ndarray
    iterations: int
    support_calls: int
    converged: bool = True
    history: Tuple[float, ...] = field(default=())

    def to_dict(self) -> dict:
        return {
            "distance": self.distance,
            "colliding": self.colliding,
            "closest_p": self.closest_p.tolist(),
            "closest_q": self.closest_q.tolist(),
            "iterations": self.iterations,
            "support_calls": self.support_calls,
            "converged": self.converged,
        }


def _placement(transform: Optional[Transform]) -> Tuple[np.ndarray, np.ndarray, bool]:
    if transform is None or transform.is_identity:
        return _IDENTITY, _ORIGIN, False
    return transform.rotation, transform.translation, True


def gjk_distance(
    P: VertexGraph,
    T_P: Optional[Transform],
    Q: VertexGraph,
    T_Q: Optional[Transform],
    cfg: Optional[GjkConfig] = None,
    hint: Optional[SupportHint] = None,
    initial_direction: Optional[Sequence[float]] = None,
    simplex_log: Optional[List[np.ndarray]] = None,
) -> Tuple[DistanceResult, SupportHint]:
    """
    Distance between the transformed convex graphs P and Q.

    Args:
        P, Q: Convex vertex graphs in their local frames
        T_P, T_Q: Placements in the world frame (None for identity)
        cfg: Iteration cap, tolerance and support strategy
        hint: Support vertices from a previous query of this pair
        initial_direction: Explicit starting v (a point estimate in P - Q);
            overrides the hint's starting witness but not its start vertices
        simplex_log: When given, every simplex handed to the sub-algorithm is
            appended as a (k, 3) array of Minkowski-difference points

    Returns:
        (DistanceResult, SupportHint holding the final support vertices)

    Raises:
        NonConvexGeometryError: hill climbing detected a non-convex graph
        ValueError: empty graph, or hint indices out of range
    """
    cfg = cfg or GjkConfig()
    if len(P) == 0 or len(Q) == 0:
        raise ValueError("Distance query on an empty graph")
    hint = hint or _NO_HINT
    cursor_p = cursor_q = 0
    if hint.is_set:
        if not (0 <= hint.p_start < len(P) and 0 <= hint.q_start < len(Q)):
            raise ValueError(f"Support hint {hint} out of range")
        cursor_p, cursor_q = int(hint.p_start), int(hint.q_start)

    warm = hint.is_set and initial_direction is None
    if initial_direction is not None:
        v0 = np.asarray(initial_direction, dtype=np.float64).reshape(3)
    elif warm:
        v0 = _ORIGIN
    else:
        c_p = P.centroid() if T_P is None else T_P.apply(P.centroid())
        c_q = Q.centroid() if T_Q is None else T_Q.apply(Q.centroid())
        v0 = c_p - c_q

    rot_p, tra_p, placed_p = _placement(T_P)
    rot_q, tra_q, placed_q = _placement(T_Q)
    ptr_p, idx_p = P.csr
    ptr_q, idx_q = Q.csr
    if simplex_log is None:
        trace, trace_sizes = _NO_TRACE, _NO_SIZES
    else:
        trace = np.zeros((cfg.max_iterations, 4, 3))
        trace_sizes = np.zeros(cfg.max_iterations, dtype=np.int64)
    closest = np.empty((2, 3))
    history = np.empty(cfg.max_iterations + 1)

    (
        status,
        distance,
        colliding,
        converged,
        iterations,
        cursor_p,
        cursor_q,
        n_history,
        n_trace,
    ) = gjk_loop(
        P.vertices, ptr_p, idx_p, rot_p, tra_p, placed_p,
        Q.vertices, ptr_q, idx_q, rot_q, tra_q, placed_q,
        cfg.support_strategy == SupportStrategy.HILL_CLIMB,
        cfg.max_iterations,
        cfg.termination_tolerance,
        cursor_p,
        cursor_q,
        warm,
        v0,
        closest,
        history,
        trace,
        trace_sizes,
    )  # fmt: skip

    if simplex_log is not None:
        simplex_log.extend(trace[k, : trace_sizes[k]].copy() for k in range(n_trace))
    if status != STATUS_OK:
        body = "P" if status == STATUS_NONCONVEX_P else "Q"
        raise NonConvexGeometryError(
            f"Hill climb on {body} exceeded its vertex count; the graph is not convex",
            vertex=int(cursor_p if body == "P" else cursor_q),
        )
    if not converged:
        logger.debug(
            f"GJK hit {cfg.max_iterations} iterations at distance {history[n_history - 1]:.6e}"
        )

    result = DistanceResult(
        distance=float(distance),
        colliding=bool(colliding),
        closest_p=closest[0],
        closest_q=closest[1],
        iterations=int(iterations),
        support_calls=2 * int(iterations),
        converged=bool(converged),
        history=tuple(history[:n_history].tolist()),
    )
    return result, SupportHint(int(cursor_p), int(cursor_q))
