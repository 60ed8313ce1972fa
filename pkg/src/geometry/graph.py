"""
Vertex Graph
Polytope meshes as welded vertices plus adjacency lists.

The graph representation is what lets the hill-climbing support function walk
from a vertex to its neighbours instead of scanning the whole mesh.
"""

from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union
import logging

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components
from scipy.spatial import cKDTree

from src.errors import MeshTopologyError
from src.geometry.stl import TriangleSoup, load_stl

logger = logging.getLogger("geometry.graph")

# Outward-wound triangles of the unit box corners below.
_BOX_CORNERS = np.array(
    [
        [-1, -1, -1],
        [1, -1, -1],
        [1, 1, -1],
        [-1, 1, -1],
        [-1, -1, 1],
        [1, -1, 1],
        [1, 1, 1],
        [-1, 1, 1],
    ],
    dtype=np.float64,
)
_BOX_FACES = np.array(
    [
        [0, 2, 1], [0, 3, 2],
        [4, 5, 6], [4, 6, 7],
        [0, 1, 5], [0, 5, 4],
        [1, 2, 6], [1, 6, 5],
        [2, 3, 7], [2, 7, 6],
        [3, 0, 4], [3, 4, 7],
    ],
    dtype=np.intp,
)


@dataclass(frozen=True, eq=False)
class VertexGraph:
    """
    Convex polytope as vertices plus symmetric adjacency lists.

    Attributes:
        vertices: (n, 3) float64 array in the mesh's local frame
        adjacency: per-vertex sorted int arrays of neighbour indices
        faces: optional (m, 3) vertex-index triangles, used for export
        metadata: build information (source, closed, warnings, ...)
    """

    vertices: np.ndarray
    adjacency: Tuple[np.ndarray, ...]
    faces: Optional[np.ndarray] = None
    metadata: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        vertices = np.asarray(self.vertices, dtype=np.float64).reshape(-1, 3)
        if not np.all(np.isfinite(vertices)):
            raise ValueError("Vertex coordinates must be finite")
        object.__setattr__(self, "vertices", vertices)
        object.__setattr__(
            self,
            "adjacency",
            tuple(np.asarray(nbrs, dtype=np.intp).reshape(-1) for nbrs in self.adjacency),
        )
        if self.faces is not None:
            object.__setattr__(
                self, "faces", np.asarray(self.faces, dtype=np.intp).reshape(-1, 3)
            )

    def __len__(self) -> int:
        return self.vertices.shape[0]

    def degree(self, index: int) -> int:
        return int(self.adjacency[index].shape[0])

    def centroid(self) -> np.ndarray:
        return self.vertices.mean(axis=0)

    @cached_property
    def csr(self) -> Tuple[np.ndarray, np.ndarray]:
        """Adjacency as (indptr, indices) int64 arrays for the compiled kernels."""
        counts = np.array([nbrs.shape[0] for nbrs in self.adjacency], dtype=np.int64)
        indptr = np.zeros(len(self.adjacency) + 1, dtype=np.int64)
        np.cumsum(counts, out=indptr[1:])
        if self.adjacency:
            indices = np.concatenate(self.adjacency).astype(np.int64)
        else:
            indices = np.zeros(0, dtype=np.int64)
        return indptr, indices

    def edges(self) -> np.ndarray:
        """Undirected edges as an (e, 2) array with i < j."""
        pairs = [
            (i, int(j)) for i, nbrs in enumerate(self.adjacency) for j in nbrs if i < j
        ]
        return np.array(pairs, dtype=np.intp).reshape(-1, 2)

    def triangles(self) -> np.ndarray:
        """Face triangles as (m, 3, 3) coordinates."""
        if self.faces is None:
            return np.zeros((0, 3, 3))
        return self.vertices[self.faces]

    def with_vertices(self, vertices: np.ndarray) -> "VertexGraph":
        """Same topology over a different vertex buffer (kept by reference)."""
        vertices = np.asarray(vertices, dtype=np.float64)
        if vertices.shape != self.vertices.shape:
            raise ValueError(
                f"Vertex buffer shape {vertices.shape} does not match {self.vertices.shape}"
            )
        return VertexGraph(vertices, self.adjacency, self.faces, dict(self.metadata))

    def validate(self) -> "VertexGraph":
        """
        Check the structural invariants.

        Raises:
            MeshTopologyError: adjacency out of range, asymmetric, self-looped,
                duplicate vertex positions, or a disconnected graph
        """
        n = len(self)
        if len(self.adjacency) != n:
            raise MeshTopologyError(
                f"Adjacency has {len(self.adjacency)} lists for {n} vertices"
            )
        neighbour_sets = []
        for i, nbrs in enumerate(self.adjacency):
            if nbrs.size and (nbrs.min() < 0 or nbrs.max() >= n):
                raise MeshTopologyError(f"Vertex {i} has a neighbour index out of range")
            if np.any(nbrs == i):
                raise MeshTopologyError(f"Vertex {i} is adjacent to itself")
            neighbour_sets.append(set(nbrs.tolist()))
        for i, nbrs in enumerate(neighbour_sets):
            for j in nbrs:
                if i not in neighbour_sets[j]:
                    raise MeshTopologyError(f"Adjacency is not symmetric for edge ({i}, {j})")

        if n:
            keys = _bitwise_keys(self.vertices)
            if np.unique(keys).shape[0] != n:
                raise MeshTopologyError("Vertex list contains duplicate positions")
            _check_connected(n, self.edges())
        return self

    def to_json(self) -> Dict[str, Any]:
        doc: Dict[str, Any] = {
            "vertices": self.vertices.tolist(),
            "adjacency": [nbrs.tolist() for nbrs in self.adjacency],
        }
        if self.faces is not None:
            doc["faces"] = self.faces.tolist()
        return doc

    @classmethod
    def from_json(cls, doc: Dict[str, Any]) -> "VertexGraph":
        """Import the {vertices, adjacency[, faces]} fixture format and validate it."""
        try:
            vertices = doc["vertices"]
            adjacency = doc["adjacency"]
        except (KeyError, TypeError) as e:
            raise MeshTopologyError(f"Graph document is missing {e}") from e
        graph = cls(
            vertices,
            tuple(sorted(int(j) for j in nbrs) for nbrs in adjacency),
            doc.get("faces"),
            {"source": "json"},
        )
        return graph.validate()


def _bitwise_keys(points: np.ndarray) -> np.ndarray:
    # Adding 0.0 maps -0.0 to 0.0 so signed zeros share a key.
    contiguous = np.ascontiguousarray(points, dtype=np.float64) + 0.0
    return contiguous.view(np.dtype((np.void, contiguous.itemsize * 3))).reshape(-1)


def _check_connected(n: int, edges: np.ndarray):
    if n <= 1:
        return
    matrix = coo_matrix(
        (np.ones(edges.shape[0]), (edges[:, 0], edges[:, 1])), shape=(n, n)
    )
    count, labels = connected_components(matrix, directed=False)
    if count > 1:
        sizes = sorted(np.bincount(labels).tolist(), reverse=True)
        raise MeshTopologyError(
            f"Mesh graph is disconnected: {count} components of sizes {sizes}",
            component_sizes=sizes,
        )


def _weld_exact(points: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    # Bitwise equality after signed-zero normalization; the first occurrence
    # is kept as the representative.
    keys = _bitwise_keys(points)
    _, first, inverse = np.unique(keys, return_index=True, return_inverse=True)
    order = np.argsort(first, kind="stable")
    rank = np.empty_like(order)
    rank[order] = np.arange(order.shape[0])
    return points[first[order]], rank[np.asarray(inverse).reshape(-1)]


def _weld_within(points: np.ndarray, tolerance: float) -> Tuple[np.ndarray, np.ndarray]:
    tree = cKDTree(points)
    remap = np.full(points.shape[0], -1, dtype=np.intp)
    representatives: List[int] = []
    for k in range(points.shape[0]):
        if remap[k] >= 0:
            continue
        index = len(representatives)
        representatives.append(k)
        for j in tree.query_ball_point(points[k], r=tolerance):
            if remap[j] < 0:
                remap[j] = index
    return points[representatives], remap


def adjacency_from_faces(n: int, faces: np.ndarray) -> Tuple[np.ndarray, ...]:
    """Symmetric adjacency lists containing (a, b) iff some face holds both."""
    faces = np.asarray(faces, dtype=np.intp).reshape(-1, 3)
    pairs = np.concatenate([faces[:, [0, 1]], faces[:, [1, 2]], faces[:, [2, 0]]])
    pairs = pairs[pairs[:, 0] != pairs[:, 1]]
    both = np.unique(np.concatenate([pairs, pairs[:, ::-1]]), axis=0)
    lists: List[List[int]] = [[] for _ in range(n)]
    for a, b in both:
        lists[a].append(int(b))
    return tuple(np.array(nbrs, dtype=np.intp) for nbrs in lists)


def _is_closed(faces: np.ndarray) -> bool:
    # Closed 2-manifold: every undirected edge is shared by exactly two faces.
    proper = faces[
        (faces[:, 0] != faces[:, 1])
        & (faces[:, 1] != faces[:, 2])
        & (faces[:, 2] != faces[:, 0])
    ]
    if proper.shape[0] == 0:
        return False
    edges = np.sort(
        np.concatenate([proper[:, [0, 1]], proper[:, [1, 2]], proper[:, [2, 0]]]), axis=1
    )
    _, counts = np.unique(edges, axis=0, return_counts=True)
    return bool(np.all(counts == 2))


def build_graph(
    soup: TriangleSoup, weld_tolerance: Optional[float] = None
) -> VertexGraph:
    """
    Weld a triangle soup into a vertex graph.

    Args:
        soup: Triangles to weld
        weld_tolerance: None for exact bitwise welding, else merge radius in meters

    Returns:
        VertexGraph whose adjacency holds (a, b) iff some triangle contains both

    Raises:
        MeshTopologyError: empty soup or disconnected result
    """
    if len(soup) == 0:
        raise MeshTopologyError("Cannot build a graph from an empty triangle soup")

    points = soup.triangles.reshape(-1, 3)
    if weld_tolerance:
        vertices, remap = _weld_within(points, weld_tolerance)
    else:
        vertices, remap = _weld_exact(points)
    faces = remap.reshape(-1, 3)
    adjacency = adjacency_from_faces(vertices.shape[0], faces)

    edges = np.array(
        [(i, int(j)) for i, nbrs in enumerate(adjacency) for j in nbrs if i < j],
        dtype=np.intp,
    ).reshape(-1, 2)
    _check_connected(vertices.shape[0], edges)

    closed = _is_closed(faces)
    warnings = []
    degenerate = int(np.count_nonzero(soup.degenerate))
    if degenerate:
        warnings.append(f"{degenerate} zero-area triangles")
    if closed:
        low = [i for i, nbrs in enumerate(adjacency) if nbrs.shape[0] < 3]
        if low:
            warnings.append(f"vertices with degree < 3 on a closed mesh: {low}")
    for message in warnings:
        logger.warning(message)

    return VertexGraph(
        vertices,
        adjacency,
        faces,
        {
            "source": "triangles",
            "closed": closed,
            "degenerate_triangles": degenerate,
            "warnings": warnings,
        },
    )


def box_graph(size: Sequence[float]) -> VertexGraph:
    """Eight-vertex graph of an axis-aligned box centred on the origin."""
    half = 0.5 * np.asarray(size, dtype=np.float64).reshape(3)
    if np.any(half <= 0.0):
        raise ValueError(f"Box size must be positive, got {list(size)}")
    soup = TriangleSoup((_BOX_CORNERS * half)[_BOX_FACES])
    graph = build_graph(soup)
    graph.metadata["source"] = "box"
    return graph


def load_mesh(
    path: Union[str, Path],
    scale: Optional[Sequence[float]] = None,
    weld_tolerance: Optional[float] = None,
) -> VertexGraph:
    """
    Read an STL file and weld it into a graph.

    Args:
        path: STL file location
        scale: optional per-axis scale factors applied to every vertex
        weld_tolerance: see build_graph

    Returns:
        VertexGraph with metadata["path"] set
    """
    path = Path(path)
    with open(path, "rb") as f:
        soup = load_stl(f.read())
    if scale is not None:
        factors = np.broadcast_to(np.asarray(scale, dtype=np.float64), (3,))
        soup = TriangleSoup(soup.triangles * factors, soup.normals)
    graph = build_graph(soup, weld_tolerance)
    graph.metadata["path"] = str(path)
    logger.info(f"Loaded {path.name}: {len(soup)} triangles, {len(graph)} vertices")
    return graph
