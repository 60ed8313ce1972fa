"""Shared fixtures: small polytopes, random hulls, STL bytes and a planar demo arm."""

from pathlib import Path
import json

import numpy as np
import pytest
from scipy.spatial.transform import Rotation

from src.geometry import box_graph, convex_hull, dump_ascii_stl, dump_binary_stl
from src.kinematics import Transform, parse_urdf

DATA_DIR = Path(__file__).resolve().parents[1] / "data"

# Three 1 m bars hinged about z; at zero they lie end to end along x.
DEMO_URDF = """<?xml version="1.0"?>
<robot name="demo">
  <link name="base">
    <collision><geometry><box size="0.2 0.2 0.2"/></geometry></collision>
  </link>
  <link name="link1">
    <collision><origin xyz="0.5 0 0"/><geometry><box size="1.0 0.1 0.1"/></geometry></collision>
  </link>
  <link name="link2">
    <collision><origin xyz="0.5 0 0"/><geometry><box size="1.0 0.1 0.1"/></geometry></collision>
  </link>
  <link name="link3">
    <collision><origin xyz="0.5 0 0"/><geometry><box size="1.0 0.1 0.1"/></geometry></collision>
  </link>
  <joint name="j1" type="revolute">
    <parent link="base"/><child link="link1"/>
    <origin xyz="0 0 0.5"/><axis xyz="0 0 1"/>
    <limit lower="-3.1" upper="3.1"/>
  </joint>
  <joint name="j2" type="revolute">
    <parent link="link1"/><child link="link2"/>
    <origin xyz="1 0 0"/><axis xyz="0 0 1"/>
    <limit lower="-3.1" upper="3.1"/>
  </joint>
  <joint name="j3" type="revolute">
    <parent link="link2"/><child link="link3"/>
    <origin xyz="1 0 0"/><axis xyz="0 0 1"/>
    <limit lower="-3.1" upper="3.1"/>
  </joint>
</robot>
"""

# link2 folds back over link1, link3 then swings down across link1's root.
DEMO_FOLDED = (0.0, 3.0, 1.71)


@pytest.fixture
def data_dir() -> Path:
    return DATA_DIR


@pytest.fixture
def example_poses():
    with open(DATA_DIR / "example_poses.json", "r", encoding="utf-8") as f:
        return json.load(f)


@pytest.fixture
def cube_graph():
    """Cube with vertices at +-1."""
    return box_graph((2.0, 2.0, 2.0))


@pytest.fixture
def tetra_graph():
    return convex_hull([[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1]])


@pytest.fixture
def cube_triangles(cube_graph):
    return cube_graph.triangles()


@pytest.fixture
def ascii_cube(cube_triangles) -> bytes:
    return dump_ascii_stl(cube_triangles, name="cube").encode("ascii")


@pytest.fixture
def binary_cube(cube_triangles) -> bytes:
    return dump_binary_stl(cube_triangles, header=b"binary cube")


def random_polytope(rng: np.random.Generator, low: int = 8, high: int = 64):
    """Hull of points on a random ellipsoid, so every point is a vertex."""
    n = int(rng.integers(low, high + 1))
    directions = rng.normal(size=(n, 3))
    directions /= np.linalg.norm(directions, axis=1, keepdims=True)
    radii = rng.uniform(0.5, 1.0, size=3)
    return convex_hull(directions * radii)


def random_transform(rng: np.random.Generator, spread: float = 1.0) -> Transform:
    rotation = Rotation.from_quat(rng.normal(size=4)).as_matrix()
    return Transform(rotation, rng.uniform(-spread, spread, size=3))


def random_pair(rng: np.random.Generator):
    """Two polytopes whose centres are 0 to 3.5 apart: overlapping or separated."""
    P = random_polytope(rng)
    Q = random_polytope(rng)
    T_P = Transform(Rotation.from_quat(rng.normal(size=4)).as_matrix(), np.zeros(3))
    offset = rng.normal(size=3)
    offset *= rng.uniform(0.0, 3.5) / np.linalg.norm(offset)
    T_Q = Transform(Rotation.from_quat(rng.normal(size=4)).as_matrix(), offset)
    return P, T_P, Q, T_Q


@pytest.fixture
def rng():
    return np.random.default_rng(20240521)


@pytest.fixture
def polytope_factory():
    return random_polytope


@pytest.fixture
def pair_factory():
    return random_pair


@pytest.fixture
def demo_chain():
    return parse_urdf(DEMO_URDF)


@pytest.fixture
def demo_graphs(demo_chain):
    return {name: box_graph(demo_chain.link(name).box) for name in demo_chain.geometric_links}
