import json

import numpy as np
import pytest

from src.config import MeshSettings
from src.errors import NonConvexGeometryError
from src.geometry.graph import VertexGraph
from src.validation import ConvexityGate, EventLog
from src.validation.event_log import (
    HULL_PREPROCESSED,
    JOINT_CLAMPED,
    MESH_WARNING,
    NON_CONVERGENCE,
)


def _stitched_cube(cube_graph) -> VertexGraph:
    """Cube plus a vertex at the centre of its +z face."""
    vertices = np.vstack([cube_graph.vertices, [[0.0, 0.0, 1.0]]])
    top = [i for i in range(8) if cube_graph.vertices[i, 2] == 1.0]
    adjacency = [list(nbrs) for nbrs in cube_graph.adjacency] + [top]
    for i in top:
        adjacency[i].append(8)
    return VertexGraph(vertices, adjacency)


def test_event_log_records(tmp_path):
    path = tmp_path / "logs" / "events.jsonl"
    events = EventLog(path)
    events.record(NON_CONVERGENCE, "pair a|b hit the cap", pair="a|b")
    events.record(JOINT_CLAMPED, "joint j1 clamped", severity="info", joint="j1")

    stats = events.get_stats()
    assert stats["total_events"] == 2
    assert stats["by_type"] == {NON_CONVERGENCE: 1, JOINT_CLAMPED: 1}
    assert stats["warnings"] == 1
    assert events.get_events(JOINT_CLAMPED)[0]["joint"] == "j1"

    lines = path.read_text(encoding="utf-8").splitlines()
    assert [json.loads(line)["type"] for line in lines] == [NON_CONVERGENCE, JOINT_CLAMPED]
    assert json.loads(lines[0])["pair"] == "a|b"


def test_disabled_event_log(tmp_path):
    path = tmp_path / "events.jsonl"
    events = EventLog(path, enabled=False)
    assert events.record(NON_CONVERGENCE, "ignored") is None
    assert events.get_events() == []
    assert not path.exists()


def test_gate_accepts_convex(cube_graph):
    gate = ConvexityGate()
    assert gate.validate(cube_graph) == {"valid": True, "violations": []}
    assert gate.admit(cube_graph) is cube_graph


def test_gate_rejects_nonconvex(cube_graph):
    gate = ConvexityGate()
    graph = _stitched_cube(cube_graph)
    result = gate.validate(graph)
    assert not result["valid"]
    assert result["violations"][0]["vertex"] == 8
    with pytest.raises(NonConvexGeometryError, match="stitched") as info:
        gate.admit(graph, "stitched")
    assert info.value.vertex == 8


def test_gate_hull_preprocessing(cube_graph):
    events = EventLog()
    gate = ConvexityGate(MeshSettings(allow_nonconvex=True), events)
    hull = gate.admit(_stitched_cube(cube_graph), "stitched")
    assert len(hull) == 8
    recorded = events.get_events(HULL_PREPROCESSED)
    assert len(recorded) == 1
    assert (recorded[0]["vertices_before"], recorded[0]["vertices_after"]) == (9, 8)


def test_mesh_warnings_are_low_severity(cube_graph):
    graph = cube_graph.with_vertices(cube_graph.vertices.copy())
    graph.metadata["warnings"] = ["2 zero-area triangles"]
    events = EventLog()
    gate = ConvexityGate(events=events)
    result = gate.validate(graph)
    assert result["valid"]
    assert [v["severity"] for v in result["violations"]] == ["low"]
    assert gate.admit(graph, "warned") is graph
    assert events.get_events(MESH_WARNING)[0]["mesh"] == "warned"
