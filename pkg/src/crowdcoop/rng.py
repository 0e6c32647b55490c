"""Seeded random streams.

Every run derives four independent PCG64 streams from its 64-bit seed through
``numpy.random.SeedSequence``, one per consumer, spawned in this fixed order:
spawn jitter, candidate-circle offset, update-order shuffle, free-flow speed.
Only raw uniform doubles are drawn (53-bit, ``(next_uint64 >> 11) * 2**-53``);
shuffles and normal variates are built on top of them here, so the streams do
not depend on numpy's higher-level sampling algorithms.
"""

from __future__ import annotations

import math

import numpy as np

STREAMS = ("spawn", "offset", "order", "speed")


class Stream:
    def __init__(self, seed_seq: np.random.SeedSequence):
        self._gen = np.random.Generator(np.random.PCG64(seed_seq))

    def uniform(self, lo: float = 0.0, hi: float = 1.0) -> float:
        return lo + (hi - lo) * float(self._gen.random())

    def shuffle(self, items: list) -> list:
        out = list(items)
        for i in range(len(out) - 1, 0, -1):
            j = int(self.uniform() * (i + 1))
            out[i], out[j] = out[j], out[i]
        return out

    def normal(self, mean: float, std: float) -> float:
        # Box-Muller, one variate per pair of draws
        u1 = 1.0 - self.uniform()
        u2 = self.uniform()
        return mean + std * math.sqrt(-2.0 * math.log(u1)) * math.cos(2.0 * math.pi * u2)

    def truncated_normal(self, mean: float, std: float, lo: float, hi: float) -> float:
        while True:
            v = self.normal(mean, std)
            if lo <= v <= hi:
                return v


class RunRng:
    def __init__(self, seed: int):
        children = np.random.SeedSequence(seed).spawn(len(STREAMS))
        self.spawn, self.offset, self.order, self.speed = (Stream(c) for c in children)
