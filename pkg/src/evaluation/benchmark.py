"""
Self-collision Benchmark
Times the full per-pose pipeline (pose update plus early-exit collision
sweep) over a seeded stream of random joint vectors.

Example usage:
    chain, graphs = load_robot("data/robots/arm6.urdf", config)
    world = WorldModel.from_chain(chain, graphs, config.world, config.gjk)
    bench = CollisionBenchmark(config, chain, world)
    report = bench.run(poses=2000, seed=7)
    # Results are saved to outputs/ when save=True
"""

from dataclasses import asdict, dataclass, field
from datetime import datetime
from pathlib import Path
from time import perf_counter
from typing import Any, Dict, List, Optional, Union
import csv
import json
import logging

import numpy as np

from src.config import AppConfig
from src.evaluation.sampling import PoseSampler
from src.kinematics.chain import KinematicChain
from src.world.world_model import WorldModel

CSV_COLUMNS = ("pose_index", "time_ms", "colliding", "min_distance")


@dataclass
class PoseSample:
    pose_index: int
    time_ms: float
    colliding: bool
    # Minimum over the pairs queried for this pose (early exit stops at a hit).
    min_distance: Optional[float]


def _timing_stats(times: np.ndarray) -> Dict[str, Optional[float]]:
    if times.size == 0:
        return {"count": 0, "mean_ms": None, "std_ms": None}
    return {
        "count": int(times.size),
        "mean_ms": float(times.mean()),
        "std_ms": float(times.std()),
    }


@dataclass
class BenchReport:
    """
    Timing statistics of one benchmark run.

    std_ms is the population standard deviation of the per-pose times, so
    both statistics can be recomputed exactly from the CSV samples.
    """

    robot: str
    poses: int
    seed: int
    mean_ms: float
    std_ms: float
    min_ms: float
    max_ms: float
    p95_ms: float
    collision_count: int
    config: Dict[str, Any] = field(default_factory=dict)
    stratified: Dict[str, Dict[str, Optional[float]]] = field(default_factory=dict)
    first_pose: List[float] = field(default_factory=list)
    samples: List[PoseSample] = field(default_factory=list, repr=False)
    timestamp: str = field(default_factory=lambda: datetime.now().isoformat())

    def summary_line(self) -> str:
        return (
            f"{self.robot}: {self.mean_ms:.3f} ± {self.std_ms:.3f} ms/pose over "
            f"{self.poses} poses ({self.collision_count} colliding)"
        )

    def to_dict(self, include_samples: bool = False) -> Dict[str, Any]:
        doc = {"schema": "bench_report/1", **asdict(self)}
        if not include_samples:
            doc.pop("samples")
        return doc


class CollisionBenchmark:
    """
    Runs the per-pose pipeline over random poses and reports timing.
    """

    def __init__(self, config: AppConfig, chain: KinematicChain, world: WorldModel):
        """
        Args:
            config: Application configuration (bench and world sections)
            chain: Kinematic chain driving the world's mobile components
            world: World built from the chain
        """
        self.config = config
        self.chain = chain
        self.world = world
        self.logger = logging.getLogger("evaluation.benchmark")

    def run(
        self,
        poses: Optional[int] = None,
        seed: Optional[int] = None,
        early_exit: bool = True,
    ) -> BenchReport:
        """
        Time update_pose + check_collisions on each sampled pose.

        Args:
            poses: Number of poses (defaults to config.bench.poses)
            seed: Generator seed (defaults to config.bench.seed)
            early_exit: Stop each sweep at the first colliding pair

        Returns:
            BenchReport with per-pose samples attached
        """
        poses = self.config.bench.poses if poses is None else poses
        seed = self.config.bench.seed if seed is None else seed
        if poses < 1:
            raise ValueError(f"Benchmark needs at least one pose, got {poses}")

        sampler = PoseSampler(self.chain, seed)
        # Compile the GJK kernels outside the timed loop.
        self.world.check_collisions(early_exit=early_exit)
        self.world.reset_hints()
        samples: List[PoseSample] = []
        first_pose: List[float] = []

        self.logger.info(f"Benchmarking {poses} poses of '{self.chain.name}' (seed={seed})")
        for index, theta in enumerate(sampler.poses(poses)):
            if index == 0:
                first_pose = theta.tolist()
                self.logger.info(f"First pose: {first_pose}")
            start = perf_counter()
            self.world.update_pose(self.chain, theta)
            report = self.world.check_collisions(early_exit=early_exit)
            elapsed = (perf_counter() - start) * 1000.0
            samples.append(PoseSample(index, elapsed, report.colliding, report.min_distance))

        report = self._generate_report(samples, seed, first_pose)
        self.logger.info(report.summary_line())
        return report

    def _generate_report(
        self, samples: List[PoseSample], seed: int, first_pose: List[float]
    ) -> BenchReport:
        times = np.array([s.time_ms for s in samples])
        hits = np.array([s.colliding for s in samples], dtype=bool)
        settings = self.world.settings
        stratified = {}
        if self.config.bench.stratify:
            stratified = {
                "colliding": _timing_stats(times[hits]),
                "free": _timing_stats(times[~hits]),
            }
        return BenchReport(
            robot=self.chain.name,
            poses=len(samples),
            seed=seed,
            mean_ms=float(times.mean()),
            std_ms=float(times.std()),
            min_ms=float(times.min()),
            max_ms=float(times.max()),
            p95_ms=float(np.percentile(times, 95)),
            collision_count=int(hits.sum()),
            config={
                "epsilon": settings.epsilon,
                "exclude_adjacent": settings.exclude_adjacent,
                "excluded_pairs": len(self.world.excluded_pairs),
                "pairs": len(self.world.pairs()),
                "strategy": self.world.gjk.support_strategy.value,
                "parallel": settings.parallel,
            },
            stratified=stratified,
            first_pose=first_pose,
            samples=samples,
        )

    def save_results(self, report: BenchReport, output_dir: Optional[str] = None) -> Path:
        """Write the report as timestamped JSON under the output directory."""
        out = Path(output_dir or self.config.bench.output_dir)
        out.mkdir(parents=True, exist_ok=True)
        stamp = datetime.now().strftime("%Y%m%d_%H%M%S")
        path = out / f"bench_{self.chain.name}_{stamp}.json"
        with open(path, "w", encoding="utf-8") as f:
            json.dump(report.to_dict(), f, indent=2, default=str)
        self.logger.info(f"Benchmark report saved to {path}")
        return path


def write_samples_csv(samples: List[PoseSample], path: Union[str, Path]) -> Path:
    """CSV of raw per-pose samples; floats use repr for exact re-reading."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(CSV_COLUMNS)
        for s in samples:
            writer.writerow(
                [
                    s.pose_index,
                    repr(s.time_ms),
                    int(s.colliding),
                    "" if s.min_distance is None else repr(s.min_distance),
                ]
            )
    return path
