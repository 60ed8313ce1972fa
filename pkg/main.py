"""
Main Entry Point
Runs one collision-engine subcommand.

Usage:
  python main.py distance data/meshes/cube.stl data/meshes/cube.stl --xyz-b 4 0 0
  python main.py check data/robots/arm6.urdf --theta 0 0.5 -0.5 0 0 0
  python main.py bench data/robots/arm6.urdf --poses 2000 --seed 7 --csv outputs/samples.csv
  python main.py hull data/meshes/cube_bump.stl outputs/cube_hull.stl
"""

import sys

from src.ui.cli import main

if __name__ == "__main__":
    sys.exit(main())
