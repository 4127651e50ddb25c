"""Counted, buffered random streams keyed by ``(seed, replication)``.

Each replication owns one :class:`RandomStream`. Streams are derived from a
``numpy.random.SeedSequence`` with the replication index as spawn key, so the
draws of replication ``r`` never depend on how many other replications exist
or on the order in which workers pick them up.
"""

from __future__ import annotations

import math

import numpy as np

# Uniform blocks start small (most streams are short-lived) and double up to the cap.
_FIRST_BLOCK = 64
_MAX_BLOCK = 4096
# Poisson means above this go to numpy's sampler instead of inversion.
_INVERSION_LIMIT = 40.0


class RandomStream:
    """Uniform, exponential and Poisson variates with a primitive-draw counter.

    Uniforms are pulled from the underlying generator in blocks and served
    from a Python list; this keeps per-variate overhead low in the
    event-by-event cluster loops.
    """

    __slots__ = ("seed", "rep", "draws", "_gen", "_buf", "_block")

    def __init__(self, seed: int = 0, rep: int = 0):
        self.seed = int(seed)
        self.rep = int(rep)
        ss = np.random.SeedSequence(self.seed, spawn_key=(self.rep,))
        self._gen = np.random.Generator(np.random.PCG64(ss))
        self._buf: list[float] = []
        self._block = _FIRST_BLOCK
        self.draws = 0

    def uniform(self) -> float:
        """U[0, 1)."""
        buf = self._buf
        if not buf:
            buf.extend(self._gen.random(self._block).tolist())
            self._block = min(2 * self._block, _MAX_BLOCK)
        self.draws += 1
        return buf.pop()

    def exponential(self, rate: float) -> float:
        return -math.log1p(-self.uniform()) / rate

    def poisson(self, mean: float) -> int:
        if mean <= 0.0:
            return 0
        if mean > _INVERSION_LIMIT:
            self.draws += 1
            return int(self._gen.poisson(mean))
        u = self.uniform()
        p = math.exp(-mean)
        cdf = p
        k = 0
        while u > cdf:
            k += 1
            p *= mean / k
            if p == 0.0:
                break
            cdf += p
        return k

    def uniforms(self, n: int) -> np.ndarray:
        self.draws += n
        return self._gen.random(n)


def stream(seed: int, rep: int) -> RandomStream:
    return RandomStream(seed, rep)
