"""
Evaluation Module
Seeded pose sampling and the self-collision timing benchmark.
"""

from .sampling import PoseSampler, XorShift64Star
from .benchmark import BenchReport, CollisionBenchmark, write_samples_csv

__all__ = [
    "PoseSampler",
    "XorShift64Star",
    "BenchReport",
    "CollisionBenchmark",
    "write_samples_csv",
]
