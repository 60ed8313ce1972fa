"""
Geometry Module
STL import/export, vertex graphs and convex hull preprocessing.
"""

from .stl import TriangleSoup, load_stl, dump_ascii_stl, dump_binary_stl
from .graph import VertexGraph, build_graph, box_graph, load_mesh
from .hull import ConvexityReport, convex_hull, verify_convex

__all__ = [
    "TriangleSoup",
    "load_stl",
    "dump_ascii_stl",
    "dump_binary_stl",
    "VertexGraph",
    "build_graph",
    "box_graph",
    "load_mesh",
    "ConvexityReport",
    "convex_hull",
    "verify_convex",
]
