import json

import numpy as np
import pytest

from src.config import AppConfig, GjkConfig, MeshSettings, WorldSettings
from src.errors import ConvergenceError, JointLimitError, NonConvexGeometryError, UrdfError
from src.evaluation.sampling import PoseSampler
from src.geometry.graph import box_graph, build_graph
from src.geometry.stl import load_stl
from src.gjk.oracle import oracle_distance
from src.kinematics import Joint, JointType, KinematicChain, Link, Transform
from src.validation.event_log import (
    HULL_PREPROCESSED,
    JOINT_CLAMPED,
    NON_CONVERGENCE,
    EventLog,
)
from src.world import WorldModel, check_collisions, export_scene, load_robot, update_pose

DEMO_FOLDED = (0.0, 3.0, 1.71)
SKEWED = Transform.from_xyz_rpy((4.0, 1.0, 0.5), (0.3, 0.2, 0.1))


def _two_boxes(epsilon: float = 0.0) -> WorldModel:
    world = WorldModel(WorldSettings(epsilon=epsilon))
    world.add_obstacle("left", box_graph((1.0, 1.0, 1.0)))
    world.add_obstacle(
        "right", box_graph((1.0, 1.0, 1.0)), Transform.from_translation((2.0, 0.0, 0.0))
    )
    return world


def _oracle_colliding(world: WorldModel, pair) -> bool:
    a, b = world.component(pair.name_i), world.component(pair.name_j)
    return oracle_distance(a.current, None, b.current, None) == 0.0


def test_separated_boxes():
    report = _two_boxes().check_collisions()
    assert not report.colliding
    assert len(report.pairs) == 1
    assert report.pairs[0].distance == pytest.approx(1.0, abs=1e-12)
    assert report.min_distance == pytest.approx(1.0, abs=1e-12)
    assert report.to_dict()["schema"] == "collision_report/1"


def test_epsilon_threshold():
    report = _two_boxes(epsilon=10.0).check_collisions()
    assert report.colliding
    assert report.pairs[0].distance == pytest.approx(1.0, abs=1e-12)


def test_demo_zero_pose(demo_chain, demo_graphs):
    world = WorldModel.from_chain(demo_chain, demo_graphs)
    assert len(world) == 4
    assert len(world.pairs()) == 6 - 3
    update_pose(world, demo_chain, [0.0, 0.0, 0.0])
    report = check_collisions(world, early_exit=False)
    assert not report.colliding
    by_key = {p.key: p for p in report.pairs}
    assert by_key["link1|link3"].distance == pytest.approx(1.0, abs=1e-12)


def test_demo_folded_pose(demo_chain, demo_graphs):
    world = WorldModel.from_chain(demo_chain, demo_graphs)
    world.update_pose(demo_chain, DEMO_FOLDED)
    report = world.check_collisions(early_exit=False)
    assert report.colliding
    assert [p.key for p in report.colliding_pairs] == ["link1|link3"]
    assert _oracle_colliding(world, report.colliding_pairs[0])


def test_adjacent_pairs_can_be_included(demo_chain, demo_graphs):
    world = WorldModel.from_chain(
        demo_chain, demo_graphs, WorldSettings(exclude_adjacent=False)
    )
    assert len(world.pairs()) == 6
    world.update_pose(demo_chain, DEMO_FOLDED)
    keys = {p.key for p in world.check_collisions(early_exit=False).colliding_pairs}
    assert "link1|link3" in keys
    assert "link1|link2" in keys


def test_update_is_idempotent(demo_chain, demo_graphs):
    world = WorldModel.from_chain(demo_chain, demo_graphs)
    world.update_pose(demo_chain, DEMO_FOLDED)
    first = {c.name: c.current.vertices.copy() for c in world.components}
    world.update_pose(demo_chain, DEMO_FOLDED)
    for c in world.components:
        np.testing.assert_array_equal(c.current.vertices, first[c.name])


def test_identity_pose_reproduces_backup():
    chain = KinematicChain(
        [Link("a", box=(1.0, 1.0, 1.0)), Link("b", box=(0.5, 0.5, 0.5))],
        [
            Joint(
                "j",
                JointType.REVOLUTE,
                "a",
                "b",
                axis=np.array([0.0, 0.0, 1.0]),
                lower=-1.0,
                upper=1.0,
            )
        ],
    )
    graphs = {name: box_graph(chain.link(name).box) for name in ("a", "b")}
    world = WorldModel.from_chain(chain, graphs)
    world.update_pose(chain, [0.0])
    moving = world.component("b")
    np.testing.assert_array_equal(moving.current.vertices, moving.backup.vertices)


def test_stationary_components_untouched(demo_chain, demo_graphs):
    world = WorldModel.from_chain(demo_chain, demo_graphs)
    base = world.component("base")
    buffer = base.current.vertices
    before = buffer.copy()
    world.update_pose(demo_chain, DEMO_FOLDED)
    assert base.current.vertices is buffer
    np.testing.assert_array_equal(buffer, before)
    link3 = world.component("link3")
    assert not np.array_equal(link3.current.vertices, link3.backup.vertices)
    # Backups stay in the local frame.
    np.testing.assert_array_equal(link3.backup.vertices, demo_graphs["link3"].vertices)


def test_update_rejects_bad_joint_vector(demo_chain, demo_graphs):
    world = WorldModel.from_chain(demo_chain, demo_graphs)
    with pytest.raises(JointLimitError):
        world.update_pose(demo_chain, [0.0, 0.0])
    with pytest.raises(JointLimitError):
        world.update_pose(demo_chain, [0.0, 5.0, 0.0])


def test_clamped_joints_are_recorded(demo_chain, demo_graphs):
    events = EventLog()
    world = WorldModel.from_chain(demo_chain, demo_graphs, events=events)
    world.update_pose(demo_chain, [0.0, 5.0, 0.0], clamp=True)
    assert [e["joint"] for e in events.get_events(JOINT_CLAMPED)] == ["j2"]


def test_unknown_link_component(demo_chain, demo_graphs):
    world = WorldModel.from_chain(demo_chain, demo_graphs)
    world.add_component("ghost", box_graph((1, 1, 1)), mobile=True, link="nowhere")
    with pytest.raises(UrdfError):
        world.update_pose(demo_chain, [0.0, 0.0, 0.0])


def test_component_validation():
    world = _two_boxes()
    with pytest.raises(ValueError):
        world.add_obstacle("left", box_graph((1, 1, 1)))
    with pytest.raises(ValueError):
        world.add_component("floating", box_graph((1, 1, 1)), mobile=True)
    with pytest.raises(ValueError):
        world.exclude("left", "missing")
    world.exclude("left", "right")
    assert world.pairs() == []
    report = world.check_collisions()
    assert not report.colliding
    assert report.min_distance is None


def test_early_exit_matches_exhaustive(demo_chain, demo_graphs):
    world = WorldModel.from_chain(demo_chain, demo_graphs)
    for theta in PoseSampler(demo_chain, seed=3).poses(60):
        world.update_pose(demo_chain, theta)
        early = world.check_collisions(early_exit=True)
        full = world.check_collisions(early_exit=False)
        assert early.colliding == full.colliding
        assert len(full.pairs) == len(world.pairs())
        for pair in full.pairs:
            assert pair.colliding == _oracle_colliding(world, pair)


def test_parallel_sweep_matches_sequential(demo_chain, demo_graphs):
    sequential = WorldModel.from_chain(demo_chain, demo_graphs)
    parallel = WorldModel.from_chain(demo_chain, demo_graphs, WorldSettings(parallel=True))
    for theta in PoseSampler(demo_chain, seed=11).poses(20):
        sequential.update_pose(demo_chain, theta)
        parallel.update_pose(demo_chain, theta)
        a = sequential.check_collisions(early_exit=False)
        b = parallel.check_collisions(early_exit=False)
        assert [p.key for p in a.pairs] == [p.key for p in b.pairs]
        for x, y in zip(a.pairs, b.pairs):
            assert x.colliding == y.colliding
            assert x.distance == pytest.approx(y.distance, abs=1e-9)


def test_non_convergence_is_reported():
    events = EventLog()
    world = WorldModel(gjk=GjkConfig(max_iterations=1), events=events)
    world.add_obstacle("a", box_graph((2, 2, 2)))
    world.add_obstacle("b", box_graph((2, 2, 2)), SKEWED)
    report = world.check_collisions()
    assert report.non_converged == ("a|b",)
    assert len(events.get_events(NON_CONVERGENCE)) == 1
    assert report.to_dict()["non_converged"] == ["a|b"]


def test_strict_mode_raises():
    world = WorldModel(WorldSettings(strict=True), GjkConfig(max_iterations=1))
    world.add_obstacle("a", box_graph((2, 2, 2)))
    world.add_obstacle("b", box_graph((2, 2, 2)), SKEWED)
    with pytest.raises(ConvergenceError) as info:
        world.check_collisions()
    assert info.value.pairs == ["a|b"]


def test_hint_cache(demo_chain, demo_graphs):
    world = WorldModel.from_chain(demo_chain, demo_graphs)
    world.update_pose(demo_chain, [0.1, 0.2, 0.3])
    cold = world.check_collisions(early_exit=False)
    warm = world.check_collisions(early_exit=False)
    for x, y in zip(cold.pairs, warm.pairs):
        assert y.distance == pytest.approx(x.distance, abs=1e-9)
    world.reset_hints()
    again = world.check_collisions(early_exit=False)
    assert [p.iterations for p in again.pairs] == [p.iterations for p in cold.pairs]


def test_sweeps_are_reproducible(demo_chain, demo_graphs):
    world = WorldModel.from_chain(demo_chain, demo_graphs)
    poses = list(PoseSampler(demo_chain, seed=3).poses(25))

    def run():
        docs = []
        for theta in poses:
            world.update_pose(demo_chain, theta)
            docs.append(json.dumps(world.check_collisions(early_exit=False).to_dict()))
        return docs

    first = run()
    world.reset_hints()
    assert run() == first


def test_export_empty_world():
    text = export_scene(WorldModel(), "stl")
    assert text == "solid scene\nendsolid scene\n"
    assert len(load_stl(text.encode("ascii"))) == 0


def test_export_single_cube(cube_graph):
    world = WorldModel()
    world.add_obstacle("cube", cube_graph)
    soup = load_stl(world.export_scene("stl").encode("ascii"))
    assert len(soup) == 12
    graph = build_graph(soup)
    assert {tuple(v) for v in graph.vertices} == {tuple(v) for v in cube_graph.vertices}


def test_export_json(demo_chain, demo_graphs):
    world = WorldModel.from_chain(demo_chain, demo_graphs)
    world.update_pose(demo_chain, DEMO_FOLDED)
    doc = json.loads(world.export_scene("json"))
    assert doc["schema"] == "scene/1"
    assert [c["name"] for c in doc["components"]] == ["base", "link1", "link2", "link3"]
    link3 = doc["components"][3]
    assert link3["mobile"] and link3["link"] == "link3"
    np.testing.assert_allclose(link3["vertices"], world.component("link3").current.vertices)
    with pytest.raises(ValueError):
        world.export_scene("obj")


# ---------------------------------------------------------------- robots on disk


def test_load_robot(data_dir):
    chain, graphs = load_robot(data_dir / "robots" / "arm6.urdf")
    assert set(graphs) == set(chain.geometric_links)
    np.testing.assert_allclose(graphs["link6"].vertices.max(axis=0), [0.025, 0.025, 0.01])
    world = WorldModel.from_chain(chain, graphs)
    assert len(world.pairs()) == 21 - 6


def test_arm7_pair_count(data_dir):
    chain, graphs = load_robot(data_dir / "robots" / "arm7.urdf")
    assert len(WorldModel.from_chain(chain, graphs).pairs()) == 28 - 7


def test_example_poses(data_dir, example_poses):
    for entry in example_poses:
        chain, graphs = load_robot(data_dir / entry["robot"])
        world = WorldModel.from_chain(chain, graphs)
        world.update_pose(chain, entry["theta"])
        report = world.check_collisions(early_exit=False)
        assert report.colliding == entry["expected_colliding"], entry["name"]
        for pair in report.pairs:
            a, b = world.component(pair.name_i), world.component(pair.name_j)
            expected = oracle_distance(a.current, None, b.current, None)
            assert pair.colliding == (expected == 0.0)
            assert pair.distance == pytest.approx(expected, abs=1e-9)


def test_arm6_zero_pose_clearance(data_dir):
    chain, graphs = load_robot(data_dir / "robots" / "arm6.urdf")
    world = WorldModel.from_chain(chain, graphs)
    world.update_pose(chain, np.zeros(6))
    report = world.check_collisions(early_exit=False)
    assert report.min_distance == pytest.approx(0.085, abs=1e-9)


def test_arm6_folded_elbow(data_dir):
    chain, graphs = load_robot(data_dir / "robots" / "arm6.urdf")
    world = WorldModel.from_chain(chain, graphs)
    world.update_pose(chain, [0.0, 0.0, 2.6, 0.0, 0.0, 0.0])
    keys = {p.key for p in world.check_collisions(early_exit=False).colliding_pairs}
    assert "link2|link4" in keys


def _bump_robot(tmp_path, data_dir):
    mesh = (data_dir / "meshes" / "cube_bump.stl").resolve()
    urdf = tmp_path / "bump.urdf"
    urdf.write_text(
        f"""<robot name="bump">
  <link name="base"><collision><geometry><box size="1 1 1"/></geometry></collision></link>
  <link name="tool"><collision><geometry>
    <mesh filename="{mesh}" scale="0.1 0.1 0.1"/>
  </geometry></collision></link>
  <joint name="j" type="revolute"><parent link="base"/><child link="tool"/>
    <origin xyz="0 0 2"/><axis xyz="0 0 1"/><limit lower="-1" upper="1"/></joint>
</robot>""",
        encoding="utf-8",
    )
    return urdf


def test_nonconvex_mesh_rejected(tmp_path, data_dir):
    with pytest.raises(NonConvexGeometryError) as info:
        load_robot(_bump_robot(tmp_path, data_dir))
    assert info.value.vertex == 8


def test_nonconvex_mesh_replaced_by_hull(tmp_path, data_dir):
    events = EventLog()
    config = AppConfig(mesh=MeshSettings(allow_nonconvex=True))
    _, graphs = load_robot(_bump_robot(tmp_path, data_dir), config, events)
    assert len(graphs["tool"]) == 8
    assert graphs["tool"].metadata["source"] == "hull"
    assert len(events.get_events(HULL_PREPROCESSED)) == 1


def test_missing_mesh(tmp_path):
    urdf = tmp_path / "missing.urdf"
    urdf.write_text(
        '<robot name="m"><link name="a"><collision><geometry>'
        '<mesh filename="nowhere.stl"/></geometry></collision></link></robot>',
        encoding="utf-8",
    )
    with pytest.raises(UrdfError):
        load_robot(urdf)
