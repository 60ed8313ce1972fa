"""
User Interface Module
Command-line front end.

Usage:
    python -m src.ui.cli check data/robots/arm6.urdf
    # or
    python main.py check data/robots/arm6.urdf
"""

from .cli import CLI, build_parser, main

__all__ = ["CLI", "build_parser", "main"]
