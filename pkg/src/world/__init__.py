"""
World Module
Component model, pose updates and the pairwise self-collision sweep.
"""

from .world_model import (
    CollisionReport,
    Component,
    PairReport,
    WorldModel,
    check_collisions,
    export_scene,
    update_pose,
)
from .loader import load_link_graphs, load_robot

__all__ = [
    "CollisionReport",
    "Component",
    "PairReport",
    "WorldModel",
    "check_collisions",
    "export_scene",
    "update_pose",
    "load_link_graphs",
    "load_robot",
]
