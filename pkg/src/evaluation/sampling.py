"""
Pose Sampling
Reproducible joint-vector streams for benchmarks.

The generator is xorshift64* (shifts 12, 25, 27; multiplier
0x2545F4914F6CDD1D) whose 64-bit state is the first SplitMix64 output for the
user seed (increment 0x9E3779B97F4A7C15, multipliers 0xBF58476D1CE4E5B9 and
0x94D049BB133111EB). A uniform double in [0, 1) is the top 53 bits of an
output times 2^-53. Both algorithms are fixed so other implementations can
reproduce the same pose stream from (seed, N, chain).
"""

from typing import Iterator, List
import math

import numpy as np

from src.kinematics.chain import JointType, KinematicChain

_MASK = (1 << 64) - 1


def splitmix64(seed: int) -> int:
    z = (seed + 0x9E3779B97F4A7C15) & _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


class XorShift64Star:
    """64-bit xorshift* generator."""

    def __init__(self, seed: int = 0):
        state = splitmix64(seed & _MASK)
        # An all-zero state would stay zero forever.
        self.state = state or 0x9E3779B97F4A7C15

    def next_u64(self) -> int:
        x = self.state
        x ^= x >> 12
        x ^= (x << 25) & _MASK
        x ^= x >> 27
        self.state = x
        return (x * 0x2545F4914F6CDD1D) & _MASK

    def uniform(self) -> float:
        """Double in [0, 1)."""
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))


class PoseSampler:
    """
    Uniform joint vectors within limits; continuous joints sample [-pi, pi).
    """

    def __init__(self, chain: KinematicChain, seed: int = 0):
        self.chain = chain
        self.seed = seed
        self.rng = XorShift64Star(seed)
        bounds: List[tuple] = []
        for joint in chain.actuated_joints:
            if joint.type == JointType.CONTINUOUS or not (
                math.isfinite(joint.lower) and math.isfinite(joint.upper)
            ):
                bounds.append((-math.pi, 2.0 * math.pi))
            else:
                bounds.append((joint.lower, joint.upper - joint.lower))
        self._bounds = bounds

    def next_pose(self) -> np.ndarray:
        return np.array(
            [low + self.rng.uniform() * width for low, width in self._bounds],
            dtype=np.float64,
        )

    def poses(self, count: int) -> Iterator[np.ndarray]:
        for _ in range(count):
            yield self.next_pose()
