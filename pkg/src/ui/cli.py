"""
Command Line Interface
distance / check / bench / hull subcommands over the collision engine.

Exit codes: 0 = ran (collision verdicts are data, not status),
2 = usage or validation error, 3 = non-convergence in strict mode.
"""

from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence
import argparse
import json
import logging
import sys

import numpy as np
from dotenv import load_dotenv

from src.config import AppConfig, SupportStrategy, load_config
from src.errors import CollisionError, ConvergenceError
from src.evaluation.benchmark import CollisionBenchmark, write_samples_csv
from src.geometry.graph import load_mesh
from src.geometry.hull import convex_hull, verify_convex
from src.geometry.stl import dump_ascii_stl, dump_binary_stl
from src.gjk.distance import gjk_distance
from src.kinematics.transform import Transform
from src.validation.event_log import EventLog
from src.validation.gates import ConvexityGate
from src.world.loader import load_robot
from src.world.world_model import WorldModel

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NONCONVERGENCE = 3


def _update(config: AppConfig, section: str, **values: Any) -> AppConfig:
    """Copy of config with non-None values overriding one section."""
    values = {k: v for k, v in values.items() if v is not None}
    if not values:
        return config
    current = getattr(config, section)
    return config.model_copy(update={section: current.model_copy(update=values)})


class CLI:
    """
    Command-line front end.

    Loads configuration once, sets up logging and an event log, then runs one
    subcommand and returns its exit code.
    """

    def __init__(
        self,
        config_path: Optional[str] = None,
        log_level: Optional[str] = None,
        json_output: bool = False,
    ):
        """
        Args:
            config_path: Path to a YAML config (None falls back to $COLLISION_CONFIG)
            log_level: Overrides logging.level
            json_output: Print JSON documents instead of text
        """
        self.config = _update(load_config(config_path), "logging", level=log_level)
        self._setup_logging()
        self.logger = logging.getLogger("cli")
        self.events = EventLog(self.config.logging.events_log)
        self.json_output = json_output

    def _setup_logging(self):
        """Setup logging configuration."""
        log_config = self.config.logging
        level = getattr(logging, log_config.level.upper(), logging.INFO)
        logging.basicConfig(level=level, format=log_config.format)
        if log_config.file:
            Path(log_config.file).parent.mkdir(parents=True, exist_ok=True)
            handler = logging.FileHandler(log_config.file, encoding="utf-8")
            handler.setFormatter(logging.Formatter(log_config.format))
            logging.getLogger().addHandler(handler)

    def _emit(self, doc: Dict[str, Any], lines: List[str]):
        if self.json_output:
            print(json.dumps(doc, indent=2, default=str))
        else:
            print("\n".join(lines))

    def _apply_overrides(self, args: argparse.Namespace):
        strategy = getattr(args, "strategy", None)
        self.config = _update(
            self.config,
            "gjk",
            support_strategy=SupportStrategy(strategy) if strategy else None,
        )
        exclude = getattr(args, "no_adjacent_exclusion", False)
        self.config = _update(
            self.config,
            "world",
            epsilon=getattr(args, "epsilon", None),
            exclude_adjacent=False if exclude else None,
            parallel=True if getattr(args, "parallel", False) else None,
            strict=True if getattr(args, "strict", False) else None,
        )
        self.config = _update(
            self.config,
            "mesh",
            allow_nonconvex=True if getattr(args, "allow_nonconvex", False) else None,
            weld_tolerance=getattr(args, "weld_tolerance", None),
        )
        self.config = _update(
            self.config, "kinematics", package_root=getattr(args, "package_root", None)
        )

    # ------------------------------------------------------------------ commands

    def cmd_distance(self, args: argparse.Namespace) -> int:
        """Distance between two meshes placed by xyz/rpy transforms."""
        gate = ConvexityGate(self.config.mesh, self.events)
        weld = self.config.mesh.weld_tolerance
        graph_a = gate.admit(load_mesh(args.mesh_a, weld_tolerance=weld), Path(args.mesh_a).name)
        graph_b = gate.admit(load_mesh(args.mesh_b, weld_tolerance=weld), Path(args.mesh_b).name)
        transform_a = Transform.from_xyz_rpy(args.xyz_a, args.rpy_a)
        transform_b = Transform.from_xyz_rpy(args.xyz_b, args.rpy_b)

        result, _ = gjk_distance(graph_a, transform_a, graph_b, transform_b, self.config.gjk)
        doc = {"schema": "distance_result/1", **result.to_dict()}
        self._emit(
            doc,
            [
                f"distance:      {result.distance:.12g}",
                f"colliding:     {result.colliding}",
                f"closest_p:     {np.round(result.closest_p, 12).tolist()}",
                f"closest_q:     {np.round(result.closest_q, 12).tolist()}",
                f"iterations:    {result.iterations}",
                f"support_calls: {result.support_calls}",
                f"converged:     {result.converged}",
            ],
        )
        return EXIT_OK

    def _world(self, urdf: str):
        chain, graphs = load_robot(urdf, self.config, self.events)
        world = WorldModel.from_chain(
            chain, graphs, self.config.world, self.config.gjk, self.events
        )
        return chain, world

    def cmd_check(self, args: argparse.Namespace) -> int:
        """Exhaustive pair sweep at one joint vector."""
        chain, world = self._world(args.urdf)
        theta = args.theta if args.theta is not None else [0.0] * chain.dof
        world.update_pose(chain, theta, clamp=self.config.kinematics.clamp_limits)
        report = world.check_collisions(early_exit=False)

        if args.export:
            fmt = "json" if args.export.endswith(".json") else "stl"
            Path(args.export).write_text(world.export_scene(fmt), encoding="utf-8")
            self.logger.info(f"Scene written to {args.export}")

        lines = [
            f"robot:        {chain.name}",
            f"colliding:    {report.colliding}",
            f"min_distance: {report.min_distance}",
            f"pairs:        {len(report.pairs)}",
        ]
        for pair in sorted(report.pairs, key=lambda p: p.distance):
            flag = "HIT " if pair.colliding else "    "
            lines.append(f"  {flag}{pair.name_i} - {pair.name_j}: {pair.distance:.9g}")
        if report.non_converged:
            lines.append(f"non-converged: {', '.join(report.non_converged)}")
        self._emit({**report.to_dict(), "robot": chain.name, "theta": list(theta)}, lines)
        return EXIT_OK

    def cmd_bench(self, args: argparse.Namespace) -> int:
        """Random-pose timing benchmark."""
        poses = args.poses if args.poses is not None else self.config.bench.poses
        if poses < 1:
            print(f"error: --poses must be at least 1, got {poses}", file=sys.stderr)
            return EXIT_USAGE

        chain, world = self._world(args.urdf)
        bench = CollisionBenchmark(self.config, chain, world)
        report = bench.run(poses=poses, seed=args.seed)

        csv_path = args.csv or self.config.bench.csv
        if csv_path:
            write_samples_csv(report.samples, csv_path)
            self.logger.info(f"Samples written to {csv_path}")
        if not args.no_save:
            bench.save_results(report)

        lines = [report.summary_line(), f"seed: {report.seed}  first pose: {report.first_pose}"]
        lines.append(
            f"min {report.min_ms:.4f} / p95 {report.p95_ms:.4f} / max {report.max_ms:.4f} ms"
        )
        for label, stats in report.stratified.items():
            if stats["count"]:
                lines.append(
                    f"{label}: {stats['mean_ms']:.4f} ± {stats['std_ms']:.4f} ms "
                    f"({stats['count']} poses)"
                )
        event_stats = self.events.get_stats()
        if event_stats["total_events"]:
            lines.append(f"events: {event_stats['by_type']}")
        self._emit(report.to_dict(), lines)
        return EXIT_OK

    def cmd_hull(self, args: argparse.Namespace) -> int:
        """Convex hull of a mesh's vertices, written as STL (and optionally JSON)."""
        graph = load_mesh(args.mesh, weld_tolerance=self.config.mesh.weld_tolerance)
        hull = convex_hull(graph.vertices)
        check = verify_convex(hull)

        out = Path(args.out)
        out.parent.mkdir(parents=True, exist_ok=True)
        if args.binary:
            out.write_bytes(dump_binary_stl(hull.triangles(), header=b"convex hull"))
        else:
            out.write_text(dump_ascii_stl(hull.triangles(), name=out.stem), encoding="utf-8")
        if args.graph_json:
            Path(args.graph_json).write_text(json.dumps(hull.to_json()), encoding="utf-8")

        doc = {
            "schema": "hull_result/1",
            "input_vertices": len(graph),
            "hull_vertices": len(hull),
            "hull_faces": int(hull.faces.shape[0]),
            "convex": check.convex,
            "out": str(out),
        }
        self._emit(
            doc,
            [
                f"input vertices: {len(graph)}",
                f"hull vertices:  {len(hull)} ({hull.faces.shape[0]} faces)",
                f"convex:         {check.convex}",
                f"written to:     {out}",
            ],
        )
        return EXIT_OK

    def run(self, args: argparse.Namespace) -> int:
        handlers = {
            "distance": self.cmd_distance,
            "check": self.cmd_check,
            "bench": self.cmd_bench,
            "hull": self.cmd_hull,
        }
        self._apply_overrides(args)
        try:
            return handlers[args.command](args)
        except ConvergenceError as e:
            self.logger.error(f"Non-convergence: {e}")
            print(f"error: {e} ({', '.join(e.pairs)})", file=sys.stderr)
            return EXIT_NONCONVERGENCE
        except CollisionError as e:
            print(f"error: {e}", file=sys.stderr)
            return EXIT_USAGE
        except (OSError, ValueError) as e:
            print(f"error: {e}", file=sys.stderr)
            return EXIT_USAGE


def _add_world_flags(parser: argparse.ArgumentParser):
    parser.add_argument("urdf", help="Path to the robot URDF")
    parser.add_argument("--epsilon", type=float, help="Collision distance threshold (m)")
    parser.add_argument(
        "--no-adjacent-exclusion",
        action="store_true",
        help="Also check pairs of links connected by a joint",
    )
    parser.add_argument("--strategy", choices=[s.value for s in SupportStrategy])
    parser.add_argument("--package-root", help="Root directory for package:// mesh URIs")
    parser.add_argument("--allow-nonconvex", action="store_true", help="Replace non-convex meshes by their hull")
    parser.add_argument("--weld-tolerance", type=float, help="Epsilon vertex welding (m)")
    parser.add_argument("--parallel", action="store_true", help="Run pair queries on a thread pool")
    parser.add_argument("--strict", action="store_true", help="Exit 3 if any pair query does not converge")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description="Convex collision detection and distance queries for articulated robots"
    )
    parser.add_argument("--config", help="Path to configuration file")
    parser.add_argument("--json", action="store_true", help="Print JSON documents")
    parser.add_argument("--log-level", help="Logging level (DEBUG, INFO, ...)")
    sub = parser.add_subparsers(dest="command", required=True)

    distance = sub.add_parser("distance", help="Distance between two convex meshes")
    distance.add_argument("mesh_a")
    distance.add_argument("mesh_b")
    for side in ("a", "b"):
        distance.add_argument(f"--xyz-{side}", type=float, nargs=3, default=[0.0, 0.0, 0.0], metavar=("X", "Y", "Z"))
        distance.add_argument(f"--rpy-{side}", type=float, nargs=3, default=[0.0, 0.0, 0.0], metavar=("R", "P", "Y"))
    distance.add_argument("--strategy", choices=[s.value for s in SupportStrategy])
    distance.add_argument("--allow-nonconvex", action="store_true", help="Replace non-convex meshes by their hull")
    distance.add_argument("--weld-tolerance", type=float, help="Epsilon vertex welding (m)")

    check = sub.add_parser("check", help="Self-collision check at one joint vector")
    _add_world_flags(check)
    check.add_argument("--theta", type=float, nargs="*", help="Joint values in document order (default zeros)")
    check.add_argument("--export", help="Write the posed scene (.stl or .json)")

    bench = sub.add_parser("bench", help="Random-pose timing benchmark")
    _add_world_flags(bench)
    bench.add_argument("--poses", type=int, help="Number of random poses")
    bench.add_argument("--seed", type=int, help="Pose generator seed")
    bench.add_argument("--csv", help="Write per-pose samples to this CSV file")
    bench.add_argument("--no-save", action="store_true", help="Do not write a report to outputs/")

    hull = sub.add_parser("hull", help="Convex hull of a mesh")
    hull.add_argument("mesh")
    hull.add_argument("out", help="Output STL path")
    hull.add_argument("--binary", action="store_true", help="Write binary STL")
    hull.add_argument("--graph-json", help="Also write the hull graph as JSON")
    hull.add_argument("--weld-tolerance", type=float, help="Epsilon vertex welding (m)")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Parse arguments, run one subcommand and return its exit code."""
    load_dotenv()
    args = build_parser().parse_args(argv)
    try:
        cli = CLI(args.config, args.log_level, args.json)
    except CollisionError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    return cli.run(args)


if __name__ == "__main__":
    sys.exit(main())
