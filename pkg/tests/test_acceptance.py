"""
Acceptance-scale runs. Deselected by default; run with `pytest -m slow`.
"""

import numpy as np
import pytest
from scipy.spatial.transform import Rotation

from src.config import AppConfig, GjkConfig, SupportStrategy
from src.evaluation import CollisionBenchmark, PoseSampler
from src.gjk.distance import gjk_distance
from src.gjk.oracle import oracle_distance
from src.kinematics import load_urdf
from src.kinematics.transform import Transform
from src.world import WorldModel, load_robot
from test_kinematics import check_continuity, check_rigidity
from test_simplex import check_against_reference, loop_simplexes

pytestmark = pytest.mark.slow

EXHAUSTIVE = GjkConfig(support_strategy=SupportStrategy.EXHAUSTIVE)
HILL_CLIMB = GjkConfig(support_strategy=SupportStrategy.HILL_CLIMB)

# Mean time per pose (update + early-exit sweep), in milliseconds.
TIME_BOUNDS = {"arm6": 0.5, "arm7": 1.0}


def _tolerance(d):
    return 1e-9 * max(1.0, d)


def test_oracle_agreement(rng, pair_factory):
    for _ in range(500):
        P, T_P, Q, T_Q = pair_factory(rng)
        expected = oracle_distance(P, T_P, Q, T_Q)
        result, _ = gjk_distance(P, T_P, Q, T_Q, EXHAUSTIVE)
        assert result.converged
        assert result.colliding == (expected == 0.0)
        assert abs(result.distance - expected) <= _tolerance(expected)


def test_support_strategy_equivalence(rng, pair_factory):
    for _ in range(500):
        P, T_P, Q, T_Q = pair_factory(rng)
        a, _ = gjk_distance(P, T_P, Q, T_Q, EXHAUSTIVE)
        b, _ = gjk_distance(P, T_P, Q, T_Q, HILL_CLIMB)
        assert a.colliding == b.colliding
        assert abs(a.distance - b.distance) <= 1e-12


def test_simplex_reductions_at_scale(rng, pair_factory):
    simplexes = []
    while len(simplexes) < 100_000:
        simplexes.extend(loop_simplexes(rng, pair_factory, 200))
    check_against_reference(simplexes)


def test_invariance(rng, pair_factory):
    for _ in range(1000):
        P, T_P, Q, T_Q = pair_factory(rng)
        reference, _ = gjk_distance(P, T_P, Q, T_Q)
        G = Transform(Rotation.from_quat(rng.normal(size=4)).as_matrix(), rng.normal(size=3) * 5)
        moved, _ = gjk_distance(P, G @ T_P, Q, G @ T_Q)
        swapped, _ = gjk_distance(Q, T_Q, P, T_P)
        restarted, _ = gjk_distance(P, T_P, Q, T_Q, initial_direction=rng.normal(size=3))
        for other in (moved, swapped, restarted):
            assert other.colliding == reference.colliding
            assert abs(other.distance - reference.distance) <= _tolerance(reference.distance)


@pytest.mark.parametrize("robot", ["arm6", "arm7"])
def test_forward_kinematics_at_scale(rng, data_dir, robot):
    chain = load_urdf(data_dir / "robots" / f"{robot}.urdf")
    check_rigidity(chain, rng, 10_000)
    check_continuity(chain, rng, 10_000)


@pytest.mark.parametrize("robot", ["arm6", "arm7"])
def test_self_collision_verdicts(data_dir, robot):
    chain, graphs = load_robot(data_dir / "robots" / f"{robot}.urdf")
    world = WorldModel.from_chain(chain, graphs)
    for theta in PoseSampler(chain, seed=2024).poses(2000):
        world.update_pose(chain, theta)
        early = world.check_collisions(early_exit=True)
        full = world.check_collisions(early_exit=False)
        assert early.colliding == full.colliding
        expected = any(
            oracle_distance(a.current, None, b.current, None) == 0.0 for a, b in world.pairs()
        )
        assert full.colliding == expected


@pytest.mark.parametrize("robot", ["arm6", "arm7"])
def test_robot_strategy_equivalence(data_dir, robot):
    chain, graphs = load_robot(data_dir / "robots" / f"{robot}.urdf")
    exhaustive = WorldModel.from_chain(chain, graphs, gjk=EXHAUSTIVE)
    climbing = WorldModel.from_chain(chain, graphs, gjk=HILL_CLIMB)
    for theta in PoseSampler(chain, seed=99).poses(2000):
        exhaustive.update_pose(chain, theta)
        climbing.update_pose(chain, theta)
        a = exhaustive.check_collisions(early_exit=False)
        b = climbing.check_collisions(early_exit=False)
        assert a.colliding == b.colliding
        for x, y in zip(a.pairs, b.pairs):
            assert (x.name_i, x.name_j) == (y.name_i, y.name_j)
            assert x.colliding == y.colliding
            assert abs(x.distance - y.distance) <= 1e-12


def test_benchmark_timing(data_dir):
    config = AppConfig()
    means = {}
    for robot in TIME_BOUNDS:
        chain, graphs = load_robot(data_dir / "robots" / f"{robot}.urdf", config)
        world = WorldModel.from_chain(chain, graphs, config.world, config.gjk)
        report = CollisionBenchmark(config, chain, world).run(poses=2000, seed=7)
        print(report.summary_line())
        assert report.poses == 2000
        assert np.isfinite(report.mean_ms)
        means[robot] = report.mean_ms
    for robot, bound in TIME_BOUNDS.items():
        assert means[robot] < bound, f"{robot}: {means[robot]:.3f} ms/pose"
    assert means["arm7"] / means["arm6"] < 10.0
