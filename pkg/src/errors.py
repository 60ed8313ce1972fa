"""
Error Types
Exception hierarchy shared by the geometry, kinematics and world layers.

Everything the CLI should report as a usage/validation failure derives from
CollisionError, so a single except clause maps it to exit code 2.
"""

from typing import List, Optional


class CollisionError(Exception):
    """Base class for all errors raised by the collision engine."""


class StlParseError(CollisionError, ValueError):
    """
    Malformed STL input.

    Attributes:
        offset: Byte offset of the failure (binary files)
        line: 1-based line number of the failure (ASCII files)
        record: 1-based triangle record that could not be read (binary files)
    """

    def __init__(
        self,
        message: str,
        offset: Optional[int] = None,
        line: Optional[int] = None,
        record: Optional[int] = None,
    ):
        self.offset = offset
        self.line = line
        self.record = record
        location = []
        if record is not None:
            location.append(f"record {record}")
        if line is not None:
            location.append(f"line {line}")
        if offset is not None:
            location.append(f"byte {offset}")
        suffix = f" ({', '.join(location)})" if location else ""
        super().__init__(f"{message}{suffix}")


class MeshTopologyError(CollisionError, ValueError):
    """Mesh graph violates a structural invariant (e.g. it is disconnected)."""

    def __init__(self, message: str, component_sizes: Optional[List[int]] = None):
        self.component_sizes = component_sizes or []
        super().__init__(message)


class DegenerateGeometryError(CollisionError, ValueError):
    """Too few points, or points that do not span three dimensions."""


class NonConvexGeometryError(CollisionError, ValueError):
    """A graph that must be convex is not; `vertex` names an offending index."""

    def __init__(self, message: str, vertex: Optional[int] = None):
        self.vertex = vertex
        super().__init__(message)


class UrdfError(CollisionError, ValueError):
    """Unsupported or inconsistent robot description."""

    def __init__(
        self, message: str, link: Optional[str] = None, joint: Optional[str] = None
    ):
        self.link = link
        self.joint = joint
        super().__init__(message)


class JointLimitError(CollisionError, ValueError):
    """Joint vector of the wrong arity or outside the joint limits."""

    def __init__(
        self,
        message: str,
        joint: Optional[str] = None,
        expected: Optional[int] = None,
        actual: Optional[int] = None,
    ):
        self.joint = joint
        self.expected = expected
        self.actual = actual
        super().__init__(message)


class ConfigError(CollisionError, ValueError):
    """Invalid configuration file or value."""


class ConvergenceError(CollisionError, RuntimeError):
    """One or more distance queries hit the iteration cap in strict mode."""

    def __init__(self, message: str, pairs: Optional[List[str]] = None):
        self.pairs = pairs or []
        super().__init__(message)
