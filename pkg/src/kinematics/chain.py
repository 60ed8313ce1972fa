"""
Kinematic Chain
Link/joint tree with joint-vector validation and forward kinematics.
"""

from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, FrozenSet, List, Optional, Sequence, Set, Tuple
import logging

import numpy as np

from src.errors import JointLimitError, UrdfError
from src.kinematics.transform import Transform

logger = logging.getLogger("kinematics.chain")

AXIS_TOLERANCE = 1e-9


class JointType(str, Enum):
    REVOLUTE = "revolute"
    CONTINUOUS = "continuous"
    PRISMATIC = "prismatic"
    FIXED = "fixed"


@dataclass(frozen=True, eq=False)
class Link:
    """
    A rigid body of the chain and its collision geometry.

    Exactly one of `mesh` (file name or URI) and `box` (full extents) is set
    for links with geometry; both are None otherwise.
    """

    name: str
    mesh: Optional[str] = None
    box: Optional[Tuple[float, float, float]] = None
    collision_origin: Transform = field(default_factory=Transform.identity)
    scale: Optional[Tuple[float, float, float]] = None

    @property
    def has_geometry(self) -> bool:
        return self.mesh is not None or self.box is not None


@dataclass(frozen=True, eq=False)
class Joint:
    name: str
    type: JointType
    parent: str
    child: str
    origin: Transform = field(default_factory=Transform.identity)
    axis: np.ndarray = field(default_factory=lambda: np.array([1.0, 0.0, 0.0]))
    lower: float = -np.inf
    upper: float = np.inf

    @property
    def actuated(self) -> bool:
        return self.type != JointType.FIXED

    def motion(self, value: float) -> Transform:
        """Joint displacement for one joint-vector entry."""
        if self.type == JointType.PRISMATIC:
            return Transform.from_translation(self.axis * value)
        return Transform.from_axis_angle(self.axis, value)


class KinematicChain:
    """
    Rooted tree of links connected by joints.

    Actuated (non-fixed) joints keep document order; that order defines the
    entries of a joint vector.
    """

    def __init__(self, links: Sequence[Link], joints: Sequence[Joint], name: str = "robot"):
        self.name = name
        self.links: Tuple[Link, ...] = tuple(links)
        self.joints: Tuple[Joint, ...] = tuple(joints)
        self._links = {link.name: link for link in self.links}
        self._joints = {joint.name: joint for joint in self.joints}
        if len(self._links) != len(self.links):
            raise UrdfError("Duplicate link names")
        if len(self._joints) != len(self.joints):
            raise UrdfError("Duplicate joint names")

        self._parent_joint: Dict[str, Joint] = {}
        self._children: Dict[str, List[Joint]] = {link.name: [] for link in self.links}
        for joint in self.joints:
            for end in (joint.parent, joint.child):
                if end not in self._links:
                    raise UrdfError(
                        f"Joint '{joint.name}' references unknown link '{end}'",
                        link=end,
                        joint=joint.name,
                    )
            if joint.child in self._parent_joint:
                raise UrdfError(
                    f"Link '{joint.child}' has more than one parent joint",
                    link=joint.child,
                    joint=joint.name,
                )
            if joint.actuated:
                norm = float(np.linalg.norm(joint.axis))
                if abs(norm - 1.0) > AXIS_TOLERANCE:
                    raise UrdfError(
                        f"Joint '{joint.name}' axis is not unit length", joint=joint.name
                    )
                if joint.lower > joint.upper:
                    raise UrdfError(
                        f"Joint '{joint.name}' has lower limit above upper limit",
                        joint=joint.name,
                    )
            self._parent_joint[joint.child] = joint
            self._children[joint.parent].append(joint)

        roots = [link.name for link in self.links if link.name not in self._parent_joint]
        if len(roots) != 1:
            raise UrdfError(
                f"Chain must have exactly one root link, found {len(roots) or 'none'}"
                + (f": {roots}" if roots else " (cycle)")
            )
        self.root = roots[0]

        # Joints parents-first, so forward kinematics is a single pass.
        self._order: List[Joint] = []
        queue = deque([self.root])
        seen = {self.root}
        while queue:
            current = queue.popleft()
            for joint in self._children[current]:
                self._order.append(joint)
                seen.add(joint.child)
                queue.append(joint.child)
        if len(seen) != len(self.links):
            cyclic = sorted(set(self._links) - seen)
            raise UrdfError(f"Links not reachable from the root (cycle): {cyclic}")

        self.actuated_joints: Tuple[Joint, ...] = tuple(j for j in self.joints if j.actuated)
        self._actuated_index = {j.name: k for k, j in enumerate(self.actuated_joints)}

    def __repr__(self) -> str:
        return (
            f"KinematicChain({self.name!r}, links={len(self.links)}, "
            f"dof={self.dof})"
        )

    @property
    def dof(self) -> int:
        return len(self.actuated_joints)

    @property
    def geometric_links(self) -> Tuple[str, ...]:
        return tuple(link.name for link in self.links if link.has_geometry)

    def link(self, name: str) -> Link:
        return self._links[name]

    def joint(self, name: str) -> Joint:
        return self._joints[name]

    def parent_link(self, name: str) -> Optional[str]:
        joint = self._parent_joint.get(name)
        return joint.parent if joint else None

    def limits(self) -> np.ndarray:
        """(dof, 2) array of [lower, upper]; continuous joints are unbounded."""
        return np.array(
            [[j.lower, j.upper] for j in self.actuated_joints], dtype=np.float64
        ).reshape(-1, 2)

    def actuated_index(self, joint_name: str) -> int:
        return self._actuated_index[joint_name]

    def subchain(self, link_name: str) -> "KinematicChain":
        """The subtree rooted at `link_name`, as its own chain."""
        if link_name not in self._links:
            raise UrdfError(f"Unknown link '{link_name}'", link=link_name)
        keep = {link_name}
        joints = []
        for joint in self._order:
            if joint.parent in keep:
                keep.add(joint.child)
                joints.append(joint)
        doc_order = {j.name: k for k, j in enumerate(self.joints)}
        joints.sort(key=lambda j: doc_order[j.name])
        links = [link for link in self.links if link.name in keep]
        return KinematicChain(links, joints, name=f"{self.name}/{link_name}")

    def adjacent_link_pairs(self) -> Set[FrozenSet[str]]:
        """
        Pairs of geometric links joined by a joint. Links without geometry are
        skipped over, so a geometric link pairs with its nearest geometric
        ancestor.
        """
        pairs = set()
        for name in self.geometric_links:
            parent = self.parent_link(name)
            while parent is not None and not self._links[parent].has_geometry:
                parent = self.parent_link(parent)
            if parent is not None:
                pairs.add(frozenset((parent, name)))
        return pairs

    def traversal(self) -> List[Joint]:
        return list(self._order)


def check_joint_vector(
    chain: KinematicChain, values: Sequence[float], clamp: bool = False
) -> Tuple[np.ndarray, List[str]]:
    """
    Validate a joint vector against the chain.

    Args:
        chain: Kinematic chain
        values: One entry per actuated joint, in document order
        clamp: Clip out-of-limit values instead of raising

    Returns:
        (values as float64 array, names of clamped joints)

    Raises:
        JointLimitError: wrong length, non-finite entry, or out of limits without clamp
    """
    theta = np.asarray(values, dtype=np.float64).reshape(-1)
    if theta.shape[0] != chain.dof:
        raise JointLimitError(
            f"Expected {chain.dof} joint values, got {theta.shape[0]}",
            expected=chain.dof,
            actual=int(theta.shape[0]),
        )
    if not np.all(np.isfinite(theta)):
        raise JointLimitError("Joint values must be finite")

    clamped = []
    for k, joint in enumerate(chain.actuated_joints):
        if joint.lower <= theta[k] <= joint.upper:
            continue
        if not clamp:
            raise JointLimitError(
                f"Joint '{joint.name}' value {theta[k]:.6g} outside "
                f"[{joint.lower:.6g}, {joint.upper:.6g}]",
                joint=joint.name,
            )
        theta = theta.copy() if not clamped else theta
        theta[k] = min(max(theta[k], joint.lower), joint.upper)
        clamped.append(joint.name)
        logger.warning(f"Clamped joint '{joint.name}' to {theta[k]:.6g}")
    return theta, clamped


def link_frames(
    chain: KinematicChain, values: Sequence[float], clamp: bool = False
) -> Dict[str, Transform]:
    """World frame of every link (joint frames, without collision origins)."""
    theta, _ = check_joint_vector(chain, values, clamp)
    frames = {chain.root: Transform.identity()}
    for joint in chain.traversal():
        frame = frames[joint.parent] @ joint.origin
        if joint.actuated:
            frame = frame @ joint.motion(theta[chain.actuated_index(joint.name)])
        frames[joint.child] = frame
    return frames


def forward_kinematics(
    chain: KinematicChain, values: Sequence[float], clamp: bool = False
) -> Dict[str, Transform]:
    """
    Per-link transforms placing collision geometry in the world frame.

    Each link's joint frame is composed with the link's collision origin, so
    applying the result to local mesh vertices gives world coordinates.
    """
    frames = link_frames(chain, values, clamp)
    out = {}
    for link in chain.links:
        frame = frames[link.name]
        origin = link.collision_origin
        out[link.name] = frame if origin.is_identity else frame @ origin
    return out
