"""
Robot Loader
Reads a URDF and the collision geometry of its links.
"""

from pathlib import Path
from typing import Dict, Optional, Tuple, Union
import logging

from src.config import AppConfig
from src.errors import CollisionError, UrdfError
from src.geometry.graph import VertexGraph, box_graph, load_mesh
from src.kinematics.chain import KinematicChain
from src.kinematics.urdf import load_urdf, resolve_mesh_uri
from src.validation.event_log import EventLog
from src.validation.gates import ConvexityGate

logger = logging.getLogger("world.loader")


def load_link_graphs(
    chain: KinematicChain,
    urdf_dir: Union[str, Path],
    config: Optional[AppConfig] = None,
    events: Optional[EventLog] = None,
) -> Dict[str, VertexGraph]:
    """
    Load and admit the collision graph of every link with geometry.

    Meshes are scaled by the URDF `scale`, welded per config.mesh and passed
    through the convexity gate. Boxes become 8-vertex graphs.
    """
    config = config or AppConfig()
    gate = ConvexityGate(config.mesh, events)
    graphs: Dict[str, VertexGraph] = {}
    cache: Dict[Tuple[Path, Optional[Tuple[float, ...]]], VertexGraph] = {}

    for name in chain.geometric_links:
        link = chain.link(name)
        if link.box is not None:
            graphs[name] = box_graph(link.box)
            continue

        path = resolve_mesh_uri(link.mesh, urdf_dir, config.kinematics.package_root)
        key = (path, link.scale)
        if key not in cache:
            try:
                graph = load_mesh(path, link.scale, config.mesh.weld_tolerance)
            except OSError as e:
                raise UrdfError(f"Cannot read mesh for link '{name}': {e}", link=name) from e
            except CollisionError:
                logger.error(f"Failed to load mesh for link '{name}' from {path}")
                raise
            cache[key] = gate.admit(graph, name)
        graphs[name] = cache[key]
    return graphs


def load_robot(
    urdf_path: Union[str, Path],
    config: Optional[AppConfig] = None,
    events: Optional[EventLog] = None,
) -> Tuple[KinematicChain, Dict[str, VertexGraph]]:
    """
    Parse a URDF file and load its link graphs.

    Returns:
        (chain, graphs keyed by link name)
    """
    urdf_path = Path(urdf_path)
    chain = load_urdf(urdf_path)
    graphs = load_link_graphs(chain, urdf_path.parent, config, events)
    total = sum(len(g) for g in graphs.values())
    logger.info(f"Loaded '{chain.name}': {len(graphs)} link meshes, {total} vertices")
    return chain, graphs
