"""
URDF Reader
Parses the subset of URDF needed for collision checking: the link/joint tree,
joint origins, axes and limits, and each link's collision geometry.

Visual, inertial, dynamics and transmission elements are ignored.
"""

from pathlib import Path
from typing import List, Optional, Sequence, Tuple, Union
import logging

import numpy as np
from defusedxml import DefusedXmlException
from defusedxml import ElementTree as ET

from src.errors import UrdfError
from src.kinematics.chain import Joint, JointType, KinematicChain, Link
from src.kinematics.transform import Transform

logger = logging.getLogger("kinematics.urdf")

_UNSUPPORTED_GEOMETRY = ("cylinder", "sphere", "capsule")


def _floats(
    text: Optional[str],
    count: int,
    default: Sequence[float],
    what: str,
    link: Optional[str] = None,
    joint: Optional[str] = None,
) -> Tuple[float, ...]:
    if text is None:
        return tuple(default)
    try:
        values = tuple(float(t) for t in text.split())
    except ValueError as e:
        raise UrdfError(f"Unparseable {what} '{text}'", link=link, joint=joint) from e
    if count == 3 and len(values) == 1 and what == "scale":
        return values * 3
    if len(values) != count or not all(np.isfinite(values)):
        raise UrdfError(
            f"Expected {count} finite numbers for {what}, got '{text}'",
            link=link,
            joint=joint,
        )
    return values


def _origin(element, link: Optional[str] = None, joint: Optional[str] = None) -> Transform:
    if element is None:
        return Transform.identity()
    xyz = _floats(element.get("xyz"), 3, (0.0, 0.0, 0.0), "origin xyz", link, joint)
    rpy = _floats(element.get("rpy"), 3, (0.0, 0.0, 0.0), "origin rpy", link, joint)
    if not any(xyz) and not any(rpy):
        return Transform.identity()
    return Transform.from_xyz_rpy(xyz, rpy)


def _parse_link(element) -> Link:
    name = element.get("name")
    if not name:
        raise UrdfError("Link without a name")

    collisions = element.findall("collision")
    if not collisions:
        return Link(name)
    if len(collisions) > 1:
        logger.warning(f"Link '{name}' has {len(collisions)} collision elements; using the first")
    collision = collisions[0]

    origin = _origin(collision.find("origin"), link=name)
    geometry = collision.find("geometry")
    if geometry is None or len(geometry) == 0:
        raise UrdfError(f"Link '{name}' has a collision element without geometry", link=name)

    shape = geometry[0]
    if shape.tag == "mesh":
        filename = shape.get("filename")
        if not filename:
            raise UrdfError(f"Link '{name}' mesh has no filename", link=name)
        scale = shape.get("scale")
        return Link(
            name,
            mesh=filename,
            collision_origin=origin,
            scale=_floats(scale, 3, (), "scale", link=name) if scale else None,
        )
    if shape.tag == "box":
        size = _floats(shape.get("size"), 3, (), "box size", link=name)
        if min(size) <= 0.0:
            raise UrdfError(f"Link '{name}' box size must be positive", link=name)
        return Link(name, box=size, collision_origin=origin)
    if shape.tag in _UNSUPPORTED_GEOMETRY:
        raise UrdfError(
            f"Link '{name}' uses unsupported {shape.tag} geometry; use a mesh or box",
            link=name,
        )
    raise UrdfError(f"Link '{name}' has unknown geometry <{shape.tag}>", link=name)


def _parse_joint(element) -> Joint:
    name = element.get("name")
    if not name:
        raise UrdfError("Joint without a name")
    kind = element.get("type")
    try:
        joint_type = JointType(kind)
    except ValueError:
        raise UrdfError(f"Joint '{name}' has unsupported type '{kind}'", joint=name) from None

    parent = element.find("parent")
    child = element.find("child")
    if parent is None or child is None or not parent.get("link") or not child.get("link"):
        raise UrdfError(f"Joint '{name}' needs parent and child links", joint=name)

    origin = _origin(element.find("origin"), joint=name)
    axis_el = element.find("axis")
    axis = np.array(
        _floats(
            axis_el.get("xyz") if axis_el is not None else None,
            3,
            (1.0, 0.0, 0.0),
            "axis",
            joint=name,
        )
    )
    lower, upper = -np.inf, np.inf
    if joint_type != JointType.FIXED:
        norm = float(np.linalg.norm(axis))
        if norm == 0.0:
            raise UrdfError(f"Joint '{name}' has a zero axis", joint=name)
        axis = axis / norm
    if joint_type in (JointType.REVOLUTE, JointType.PRISMATIC):
        limit = element.find("limit")
        if limit is None:
            raise UrdfError(f"Joint '{name}' of type {kind} needs a <limit>", joint=name)
        (lower,) = _floats(limit.get("lower"), 1, (0.0,), "lower limit", joint=name)
        (upper,) = _floats(limit.get("upper"), 1, (0.0,), "upper limit", joint=name)

    return Joint(
        name=name,
        type=joint_type,
        parent=parent.get("link"),
        child=child.get("link"),
        origin=origin,
        axis=axis,
        lower=lower,
        upper=upper,
    )


def parse_urdf(xml: Union[str, bytes]) -> KinematicChain:
    """
    Build a kinematic chain from URDF text.

    Raises:
        UrdfError: malformed XML, unsupported joint types or geometry, missing
            mesh file names, or a link/joint structure that is not a tree
    """
    try:
        root = ET.fromstring(xml)
    except (ET.ParseError, DefusedXmlException) as e:
        raise UrdfError(f"Invalid URDF XML: {e}") from e
    if root.tag != "robot":
        raise UrdfError(f"Expected <robot> root element, got <{root.tag}>")

    links: List[Link] = [_parse_link(el) for el in root.findall("link")]
    joints: List[Joint] = [_parse_joint(el) for el in root.findall("joint")]
    if not links:
        raise UrdfError("URDF defines no links")

    chain = KinematicChain(links, joints, name=root.get("name", "robot"))
    logger.debug(
        f"Parsed URDF '{chain.name}': {len(links)} links, {len(joints)} joints, "
        f"{chain.dof} actuated"
    )
    return chain


def load_urdf(path: Union[str, Path]) -> KinematicChain:
    path = Path(path)
    try:
        text = path.read_bytes()
    except OSError as e:
        raise UrdfError(f"Cannot read URDF {path}: {e}") from e
    return parse_urdf(text)


def resolve_mesh_uri(
    uri: str, urdf_dir: Union[str, Path], package_root: Optional[Union[str, Path]] = None
) -> Path:
    """
    Map a URDF mesh filename to a local path.

    package://pkg/rel resolves to <package_root>/pkg/rel, or <package_root>/rel
    when the root already points inside the package; file:// and absolute paths
    are taken as is; anything else is relative to the URDF's directory.
    """
    if uri.startswith("package://"):
        if package_root is None:
            raise UrdfError(f"Mesh '{uri}' needs a package root to resolve")
        rest = uri[len("package://"):]
        package, _, relative = rest.partition("/")
        root = Path(package_root)
        candidates = [root / package / relative, root / relative]
        for candidate in candidates:
            if candidate.exists():
                return candidate
        return candidates[0]
    if uri.startswith("file://"):
        return Path(uri[len("file://"):])
    path = Path(uri)
    if path.is_absolute():
        return path
    return Path(urdf_dir) / path
