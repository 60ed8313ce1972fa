"""
Kinematics Module
Rigid transforms, URDF parsing and forward kinematics.
"""

from .transform import Transform
from .chain import (
    Joint,
    JointType,
    KinematicChain,
    Link,
    check_joint_vector,
    forward_kinematics,
    link_frames,
)
from .urdf import load_urdf, parse_urdf, resolve_mesh_uri

__all__ = [
    "Transform",
    "Joint",
    "JointType",
    "KinematicChain",
    "Link",
    "check_joint_vector",
    "forward_kinematics",
    "link_frames",
    "load_urdf",
    "parse_urdf",
    "resolve_mesh_uri",
]
