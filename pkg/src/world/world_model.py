"""
World Model
Component set for self-collision checking.

Each component keeps a backup graph in its local frame and a current graph
holding world-frame vertices over the same adjacency. Once per frame
update_pose rewrites the current vertices of mobile components in place; the
pairwise distance sweep then runs on those pre-transformed buffers with
identity transforms.
"""

from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field
from itertools import combinations
from typing import Any, Dict, FrozenSet, List, Mapping, Optional, Sequence, Set, Tuple
import json
import logging

import numpy as np

from src.config import GjkConfig, WorldSettings
from src.errors import ConvergenceError, UrdfError
from src.geometry.graph import VertexGraph
from src.geometry.hull import convex_hull
from src.geometry.stl import dump_ascii_stl
from src.gjk.distance import SupportHint, gjk_distance
from src.kinematics.chain import KinematicChain, forward_kinematics
from src.kinematics.transform import Transform
from src.validation.event_log import JOINT_CLAMPED, NON_CONVERGENCE, EventLog

logger = logging.getLogger("world")


@dataclass(eq=False)
class Component:
    """
    One body of the world.

    Attributes:
        name: Unique component name
        backup: Original graph in the local frame
        current: World-frame vertices sharing backup's adjacency
        mobile: Moves with a chain link
        link: Attached link for mobile components
    """

    name: str
    backup: VertexGraph
    current: VertexGraph
    mobile: bool
    link: Optional[str] = None


@dataclass(frozen=True)
class PairReport:
    name_i: str
    name_j: str
    distance: float
    colliding: bool
    iterations: int
    support_calls: int
    converged: bool = True

    @property
    def key(self) -> str:
        return f"{self.name_i}|{self.name_j}"

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name_i": self.name_i,
            "name_j": self.name_j,
            "distance": self.distance,
            "colliding": self.colliding,
            "iterations": self.iterations,
            "support_calls": self.support_calls,
            "converged": self.converged,
        }


@dataclass(frozen=True)
class CollisionReport:
    """
    Outcome of one collision sweep.

    In early-exit mode `pairs` holds the queries run up to the first hit.
    """

    colliding: bool
    pairs: Tuple[PairReport, ...] = ()
    non_converged: Tuple[str, ...] = field(default=())

    @property
    def min_distance(self) -> Optional[float]:
        if not self.pairs:
            return None
        return min(p.distance for p in self.pairs)

    @property
    def colliding_pairs(self) -> List[PairReport]:
        return [p for p in self.pairs if p.colliding]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "schema": "collision_report/1",
            "colliding": self.colliding,
            "min_distance": self.min_distance,
            "queries": len(self.pairs),
            "non_converged": list(self.non_converged),
            "pairs": [p.to_dict() for p in self.pairs],
        }


def _pair_key(a: str, b: str) -> FrozenSet[str]:
    return frozenset((a, b))


class WorldModel:
    """
    Backup/current graphs, pair exclusions, the epsilon threshold and the
    per-pair warm-start cache.

    Example usage:
        world = WorldModel.from_chain(chain, graphs, config.world, config.gjk)
        world.update_pose(chain, theta)
        report = world.check_collisions()
    """

    def __init__(
        self,
        settings: Optional[WorldSettings] = None,
        gjk: Optional[GjkConfig] = None,
        events: Optional[EventLog] = None,
    ):
        self.settings = settings or WorldSettings()
        self.gjk = gjk or GjkConfig()
        self.events = events
        self.components: List[Component] = []
        self.excluded_pairs: Set[FrozenSet[str]] = set()
        self._by_name: Dict[str, Component] = {}
        self._hints: Dict[Tuple[str, str], SupportHint] = {}
        self._pairs: Optional[List[Tuple[Component, Component]]] = None

    @property
    def epsilon(self) -> float:
        return self.settings.epsilon

    def __len__(self) -> int:
        return len(self.components)

    def component(self, name: str) -> Component:
        return self._by_name[name]

    def add_component(
        self,
        name: str,
        graph: VertexGraph,
        mobile: bool = False,
        link: Optional[str] = None,
        transform: Optional[Transform] = None,
    ) -> Component:
        """
        Insert a component. Stationary components are placed once by
        `transform`; mobile ones start at their local coordinates.
        """
        if name in self._by_name:
            raise ValueError(f"Duplicate component name '{name}'")
        if mobile and link is None:
            raise ValueError(f"Mobile component '{name}' needs an attached link")
        vertices = graph.vertices.copy()
        if transform is not None and not mobile:
            vertices = transform.apply(vertices)
        component = Component(name, graph, graph.with_vertices(vertices), mobile, link)
        self.components.append(component)
        self._by_name[name] = component
        self._pairs = None
        return component

    def add_obstacle(
        self, name: str, graph: VertexGraph, transform: Optional[Transform] = None
    ) -> Component:
        return self.add_component(name, graph, mobile=False, transform=transform)

    def exclude(self, a: str, b: str):
        for name in (a, b):
            if name not in self._by_name:
                raise ValueError(f"Cannot exclude unknown component '{name}'")
        self.excluded_pairs.add(_pair_key(a, b))
        self._pairs = None

    def reset_hints(self):
        self._hints.clear()

    def pairs(self) -> List[Tuple[Component, Component]]:
        """Unordered component pairs in insertion order, exclusions removed."""
        if self._pairs is None:
            self._pairs = [
                (a, b)
                for a, b in combinations(self.components, 2)
                if _pair_key(a.name, b.name) not in self.excluded_pairs
            ]
        return list(self._pairs)

    @classmethod
    def from_chain(
        cls,
        chain: KinematicChain,
        graphs: Mapping[str, VertexGraph],
        settings: Optional[WorldSettings] = None,
        gjk: Optional[GjkConfig] = None,
        events: Optional[EventLog] = None,
    ) -> "WorldModel":
        """
        World with one component per link that has geometry. The root link is
        stationary (placed by its collision origin); every other link is mobile.
        Joint-connected pairs are excluded when settings.exclude_adjacent is set.
        """
        world = cls(settings, gjk, events)
        for name in chain.geometric_links:
            if name not in graphs:
                raise UrdfError(f"No graph loaded for link '{name}'", link=name)
            if name == chain.root:
                world.add_obstacle(name, graphs[name], chain.link(name).collision_origin)
            else:
                world.add_component(name, graphs[name], mobile=True, link=name)
        if world.settings.exclude_adjacent:
            for pair in chain.adjacent_link_pairs():
                world.exclude(*sorted(pair))
        logger.info(
            f"World for '{chain.name}': {len(world)} components, "
            f"{len(world.excluded_pairs)} excluded pairs"
        )
        return world

    def update_pose(
        self, chain: KinematicChain, theta: Sequence[float], clamp: bool = False
    ):
        """
        Move every mobile component to the pose `theta`.

        Forward kinematics runs once; each mobile component's current vertex
        buffer is overwritten with T_link applied to its backup vertices.

        Raises:
            UrdfError: a mobile component's link is not in the chain
            JointLimitError: theta has the wrong length or violates limits
        """
        frames = forward_kinematics(chain, theta, clamp)
        if clamp and self.events is not None:
            limits = chain.limits()
            values = np.asarray(theta, dtype=np.float64)
            for k, joint in enumerate(chain.actuated_joints):
                if not limits[k, 0] <= values[k] <= limits[k, 1]:
                    self.events.record(
                        JOINT_CLAMPED,
                        f"joint '{joint.name}' clamped",
                        joint=joint.name,
                        value=float(values[k]),
                    )

        for component in self.components:
            if not component.mobile:
                continue
            transform = frames.get(component.link)
            if transform is None:
                raise UrdfError(
                    f"Mobile component '{component.name}' is attached to unknown "
                    f"link '{component.link}'",
                    link=component.link,
                )
            out = component.current.vertices
            np.matmul(component.backup.vertices, transform.rotation.T, out=out)
            out += transform.translation

    def _query(self, a: Component, b: Component) -> PairReport:
        key = (a.name, b.name)
        result, hint = gjk_distance(
            a.current, None, b.current, None, self.gjk, self._hints.get(key)
        )
        self._hints[key] = hint
        return PairReport(
            name_i=a.name,
            name_j=b.name,
            distance=result.distance,
            colliding=result.colliding or result.distance <= self.epsilon,
            iterations=result.iterations,
            support_calls=result.support_calls,
            converged=result.converged,
        )

    def check_collisions(self, early_exit: Optional[bool] = None) -> CollisionReport:
        """
        Run the pairwise distance sweep on the current frame.

        Args:
            early_exit: Stop at the first colliding pair (defaults to settings)

        Returns:
            CollisionReport; non-converged pairs are listed, not fatal

        Raises:
            ConvergenceError: strict mode and some pair hit max_iterations
        """
        early = self.settings.early_exit if early_exit is None else early_exit
        pairs = self.pairs()
        reports: List[PairReport] = []

        if self.settings.parallel and len(pairs) > 1:
            with ThreadPoolExecutor() as pool:
                futures = [pool.submit(self._query, a, b) for a, b in pairs]
                for future in as_completed(futures):
                    report = future.result()
                    reports.append(report)
                    if early and report.colliding:
                        for other in futures:
                            other.cancel()
                        break
            order = {(a.name, b.name): k for k, (a, b) in enumerate(pairs)}
            reports.sort(key=lambda r: order[(r.name_i, r.name_j)])
        else:
            for a, b in pairs:
                report = self._query(a, b)
                reports.append(report)
                if early and report.colliding:
                    break

        non_converged = tuple(r.key for r in reports if not r.converged)
        for key in non_converged:
            if self.events is not None:
                self.events.record(NON_CONVERGENCE, f"pair {key} hit the iteration cap", pair=key)
            else:
                logger.warning(f"Pair {key} did not converge")
        report = CollisionReport(
            colliding=any(r.colliding for r in reports),
            pairs=tuple(reports),
            non_converged=non_converged,
        )
        if non_converged and self.settings.strict:
            raise ConvergenceError(
                f"{len(non_converged)} pair queries did not converge", pairs=list(non_converged)
            )
        return report

    def export_scene(self, fmt: str = "stl") -> str:
        """
        Current-frame meshes of all components as one document.

        Args:
            fmt: "stl" (ASCII STL, solid "scene") or "json" (graph documents)
        """
        if fmt == "json":
            doc = {
                "schema": "scene/1",
                "components": [
                    {
                        "name": c.name,
                        "mobile": c.mobile,
                        "link": c.link,
                        **c.current.to_json(),
                    }
                    for c in self.components
                ],
            }
            return json.dumps(doc, indent=2)
        if fmt != "stl":
            raise ValueError(f"Unknown scene format '{fmt}'")

        triangles = []
        for c in self.components:
            graph = c.current
            if graph.faces is None:
                graph = convex_hull(graph.vertices)
            triangles.append(graph.triangles())
        soup = np.concatenate(triangles) if triangles else np.zeros((0, 3, 3))
        return dump_ascii_stl(soup, name="scene")


def update_pose(world: WorldModel, chain: KinematicChain, theta: Sequence[float], clamp: bool = False):
    world.update_pose(chain, theta, clamp)


def check_collisions(world: WorldModel, early_exit: Optional[bool] = None) -> CollisionReport:
    return world.check_collisions(early_exit)


def export_scene(world: WorldModel, fmt: str = "stl") -> str:
    return world.export_scene(fmt)
