import numpy as np
import pytest

from src.errors import DegenerateGeometryError
from src.geometry.graph import VertexGraph, adjacency_from_faces, load_mesh
from src.geometry.hull import affine_rank, convex_hull, verify_convex

CUBE_CORNERS = np.array(
    [[x, y, z] for x in (-1.0, 1.0) for y in (-1.0, 1.0) for z in (-1.0, 1.0)]
)


def test_interior_point_discarded():
    hull = convex_hull(np.vstack([CUBE_CORNERS, [[0.0, 0.0, 0.0]]]))
    assert len(hull) == 8
    np.testing.assert_array_equal(hull.vertices, CUBE_CORNERS)


def test_tetrahedron_hull():
    hull = convex_hull([[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1]])
    assert len(hull) == 4
    assert [hull.degree(i) for i in range(4)] == [3, 3, 3, 3]
    assert hull.faces.shape == (4, 3)


def test_faces_wound_outward():
    hull = convex_hull(CUBE_CORNERS)
    tris = hull.triangles()
    normals = np.cross(tris[:, 1] - tris[:, 0], tris[:, 2] - tris[:, 0])
    outward = np.einsum("ij,ij->i", normals, tris.mean(axis=1))
    assert np.all(outward > 0.0)


def test_random_ball_points_contained(rng):
    points = rng.normal(size=(200, 3))
    points *= (rng.uniform(size=200) ** (1.0 / 3.0) / np.linalg.norm(points, axis=1))[
        :, None
    ]
    hull = convex_hull(points)
    assert hull.metadata["max_outside"] <= 1e-9 * 2.0

    # Hull vertices are a subset of the inputs.
    as_rows = {tuple(p) for p in points}
    assert all(tuple(v) in as_rows for v in hull.vertices)

    tris = hull.triangles()
    normals = np.cross(tris[:, 1] - tris[:, 0], tris[:, 2] - tris[:, 0])
    normals /= np.linalg.norm(normals, axis=1, keepdims=True)
    offsets = points[:, None, :] - tris[None, :, 0, :]
    distances = np.einsum("pfk,fk->pf", offsets, normals)
    assert distances.max() <= 1e-9
    assert verify_convex(hull)


@pytest.mark.parametrize(
    "points, kind",
    [
        ([[0, 0, 0], [1, 0, 0], [0, 1, 0]], "at least 4"),
        ([[0, 0, 0], [1, 0, 0], [2, 0, 0], [3, 0, 0]], "collinear"),
        ([[0, 0, 0], [1, 0, 0], [0, 1, 0], [1, 1, 0], [0.5, 0.5, 0]], "coplanar"),
        ([[1, 1, 1]] * 5, "coincident"),
    ],
)
def test_degenerate_input(points, kind):
    with pytest.raises(DegenerateGeometryError, match=kind):
        convex_hull(points)


def test_already_convex_is_idempotent(cube_graph):
    hull = convex_hull(cube_graph.vertices)
    assert {tuple(v) for v in hull.vertices} == {tuple(v) for v in cube_graph.vertices}
    again = convex_hull(hull.vertices)
    np.testing.assert_array_equal(again.vertices, hull.vertices)


def test_random_hulls_are_idempotent(rng):
    for _ in range(25):
        points = rng.normal(size=(int(rng.integers(8, 80)), 3))
        hull = convex_hull(points)
        again = convex_hull(hull.vertices)
        np.testing.assert_array_equal(again.vertices, hull.vertices)
        assert again.faces.shape == hull.faces.shape
        assert verify_convex(again)


def test_affine_rank():
    assert affine_rank(np.zeros((1, 3))) == 0
    assert affine_rank([[0, 0, 0], [1, 1, 1]]) == 1
    assert affine_rank([[0, 0, 0], [1, 0, 0], [0, 1, 0]]) == 2
    assert affine_rank(CUBE_CORNERS) == 3


def test_verify_convex_cube(cube_graph):
    report = verify_convex(cube_graph)
    assert report
    assert report.vertex is None


def test_verify_convex_face_center_vertex(cube_graph):
    # Stitch the centre of the +z face into the graph.
    vertices = np.vstack([cube_graph.vertices, [[0.0, 0.0, 1.0]]])
    top = [i for i in range(8) if vertices[i, 2] == 1.0]
    ring = sorted(top, key=lambda i: np.arctan2(vertices[i, 1], vertices[i, 0]))
    faces = [f for f in cube_graph.faces.tolist() if not all(vertices[j, 2] == 1.0 for j in f)]
    faces += [[ring[k], ring[(k + 1) % 4], 8] for k in range(4)]
    graph = VertexGraph(vertices, adjacency_from_faces(9, np.array(faces)), np.array(faces))
    report = verify_convex(graph)
    assert not report
    assert report.vertex == 8


def test_verify_convex_bump_fixture(data_dir):
    bump = load_mesh(data_dir / "meshes" / "cube_bump.stl")
    report = verify_convex(bump)
    assert not report
    assert report.vertex == 8
    assert len(convex_hull(bump.vertices)) == 8


def test_verify_convex_flat_sets():
    square = VertexGraph(
        [[0, 0, 0], [1, 0, 0], [1, 1, 0], [0, 1, 0]],
        ([1, 3], [0, 2], [1, 3], [0, 2]),
    )
    assert verify_convex(square)
    segment = VertexGraph([[0, 0, 0], [0.5, 0, 0], [1, 0, 0]], ([1], [0, 2], [1]))
    report = verify_convex(segment)
    assert not report and report.vertex == 1
