"""
Rigid Transforms
Rotation + translation pairs mapping local coordinates into a parent frame.

RPY angles follow the URDF convention: fixed-axis XYZ (roll about x, then
pitch about y, then yaw about z), i.e. R = Rz(yaw) Ry(pitch) Rx(roll).
"""

from dataclasses import dataclass
from functools import cached_property
from typing import Sequence, Union
import math

import numpy as np
from scipy.spatial.transform import Rotation

ORTHONORMAL_TOLERANCE = 1e-9


@dataclass(frozen=True, eq=False)
class Transform:
    """
    Rigid transform x -> R x + t.

    Attributes:
        rotation: (3, 3) orthonormal matrix with determinant +1
        translation: (3,) vector in meters
    """

    rotation: np.ndarray
    translation: np.ndarray

    def __post_init__(self):
        object.__setattr__(
            self, "rotation", np.asarray(self.rotation, dtype=np.float64).reshape(3, 3)
        )
        object.__setattr__(
            self, "translation", np.asarray(self.translation, dtype=np.float64).reshape(3)
        )

    @classmethod
    def identity(cls) -> "Transform":
        return cls(np.eye(3), np.zeros(3))

    @classmethod
    def from_translation(cls, xyz: Sequence[float]) -> "Transform":
        return cls(np.eye(3), xyz)

    @classmethod
    def from_xyz_rpy(
        cls, xyz: Sequence[float] = (0.0, 0.0, 0.0), rpy: Sequence[float] = (0.0, 0.0, 0.0)
    ) -> "Transform":
        rotation = Rotation.from_euler("xyz", np.asarray(rpy, dtype=np.float64))
        return cls(rotation.as_matrix(), xyz)

    @classmethod
    def from_axis_angle(cls, axis: Sequence[float], angle: float) -> "Transform":
        """
        Rotation of `angle` radians about a unit axis through the origin
        (Rodrigues' formula).
        """
        x, y, z = (float(a) for a in axis)
        c = math.cos(angle)
        s = math.sin(angle)
        t = 1.0 - c
        rotation = np.array(
            [
                [c + x * x * t, x * y * t - z * s, x * z * t + y * s],
                [x * y * t + z * s, c + y * y * t, y * z * t - x * s],
                [x * z * t - y * s, y * z * t + x * s, c + z * z * t],
            ]
        )
        return cls(rotation, np.zeros(3))

    @classmethod
    def from_matrix(cls, matrix: Union[np.ndarray, Sequence]) -> "Transform":
        """
        Build from a 4x4 homogeneous matrix.

        Raises:
            ValueError: the rotation block is not a proper rotation
        """
        matrix = np.asarray(matrix, dtype=np.float64)
        if matrix.shape != (4, 4):
            raise ValueError(f"Expected a 4x4 matrix, got shape {matrix.shape}")
        if not np.allclose(matrix[3], [0.0, 0.0, 0.0, 1.0]):
            raise ValueError("Bottom row of a homogeneous transform must be [0, 0, 0, 1]")
        transform = cls(matrix[:3, :3], matrix[:3, 3])
        if not transform.is_rigid():
            raise ValueError("Rotation block is not orthonormal with determinant +1")
        return transform

    def __matmul__(self, other: "Transform") -> "Transform":
        if not isinstance(other, Transform):
            return NotImplemented
        return Transform(
            self.rotation @ other.rotation,
            self.rotation @ other.translation + self.translation,
        )

    def apply(self, points: np.ndarray) -> np.ndarray:
        """Map a (3,) point or an (n, 3) array of points."""
        points = np.asarray(points, dtype=np.float64)
        return points @ self.rotation.T + self.translation

    def apply_direction(self, vector: np.ndarray) -> np.ndarray:
        return self.rotation @ np.asarray(vector, dtype=np.float64)

    def inverse(self) -> "Transform":
        rt = self.rotation.T
        return Transform(rt, -(rt @ self.translation))

    def as_matrix(self) -> np.ndarray:
        matrix = np.eye(4)
        matrix[:3, :3] = self.rotation
        matrix[:3, 3] = self.translation
        return matrix

    def is_rigid(self, tolerance: float = ORTHONORMAL_TOLERANCE) -> bool:
        r = self.rotation
        return bool(
            np.all(np.abs(r.T @ r - np.eye(3)) <= tolerance)
            and abs(np.linalg.det(r) - 1.0) <= tolerance
        )

    @cached_property
    def is_identity(self) -> bool:
        return bool(
            np.array_equal(self.rotation, np.eye(3)) and not np.any(self.translation)
        )

    def __repr__(self) -> str:
        rpy = Rotation.from_matrix(self.rotation).as_euler("xyz")
        return (
            f"Transform(xyz={np.round(self.translation, 6).tolist()}, "
            f"rpy={np.round(rpy, 6).tolist()})"
        )
