"""
Geometry Gates
Checks a mesh must pass before it is used in distance queries.

Hill-climbing support can stop at a local optimum on a non-convex graph, so
non-convex meshes are rejected unless hull preprocessing is allowed.
"""

from typing import Any, Dict, List, Optional
import logging

from src.config import MeshSettings
from src.errors import NonConvexGeometryError
from src.geometry.graph import VertexGraph
from src.geometry.hull import convex_hull, verify_convex
from src.validation.event_log import HULL_PREPROCESSED, MESH_WARNING, EventLog


class ConvexityGate:
    """
    Validates meshes and optionally replaces non-convex ones by their hull.

    Example usage:
        gate = ConvexityGate(config.mesh, events)
        graph = gate.admit(load_mesh("link.stl"), "link_1")
    """

    def __init__(self, settings: Optional[MeshSettings] = None, events: Optional[EventLog] = None):
        self.settings = settings or MeshSettings()
        self.events = events
        self.logger = logging.getLogger("validation.gates")

    def validate(self, graph: VertexGraph) -> Dict[str, Any]:
        """
        Check one graph.

        Returns:
            Dictionary with 'valid' boolean and 'violations' list; low-severity
            violations (mesh warnings) do not make the graph invalid
        """
        violations: List[Dict[str, Any]] = []
        for warning in graph.metadata.get("warnings", []):
            violations.append(
                {"validator": "mesh", "reason": warning, "severity": "low"}
            )

        report = verify_convex(graph)
        if not report:
            violations.append(
                {
                    "validator": "convexity",
                    "reason": report.message,
                    "severity": "high",
                    "vertex": report.vertex,
                }
            )

        return {
            "valid": all(v["severity"] != "high" for v in violations),
            "violations": violations,
        }

    def admit(self, graph: VertexGraph, name: str = "mesh") -> VertexGraph:
        """
        Return a graph safe for distance queries.

        Raises:
            NonConvexGeometryError: graph is not convex and hull preprocessing is off
        """
        result = self.validate(graph)
        for v in result["violations"]:
            if v["severity"] == "low" and self.events is not None:
                self.events.record(MESH_WARNING, f"{name}: {v['reason']}", mesh=name)

        if result["valid"]:
            return graph

        violation = next(v for v in result["violations"] if v["validator"] == "convexity")
        if not self.settings.allow_nonconvex:
            raise NonConvexGeometryError(
                f"Mesh '{name}' is not convex: {violation['reason']}",
                vertex=violation["vertex"],
            )

        hull = convex_hull(graph.vertices)
        hull.metadata["path"] = graph.metadata.get("path")
        message = f"{name}: replaced {len(graph)} vertices by a {len(hull)}-vertex hull"
        if self.events is not None:
            self.events.record(
                HULL_PREPROCESSED,
                message,
                mesh=name,
                vertices_before=len(graph),
                vertices_after=len(hull),
            )
        else:
            self.logger.warning(message)
        return hull
