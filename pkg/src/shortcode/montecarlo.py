"""Chunked, seeded Monte Carlo driver.

Trials are cut into fixed-size chunks and chunk k draws from the child
stream ``Prng(seed, k)``, so the merged count does not depend on how many
workers ran the chunks.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable

from .errors import ParameterError
from .gf2 import Prng

CHUNK = 1 << 16


@dataclass(frozen=True)
class Estimate:
    passes: int
    trials: int
    seed: int

    @property
    def probability(self) -> float:
        return self.passes / self.trials

    @property
    def ci3sigma(self) -> float:
        p = self.probability
        return 3.0 * math.sqrt(p * (1.0 - p) / self.trials)


def _chunk_sizes(trials: int) -> list[int]:
    full, rem = divmod(trials, CHUNK)
    return [CHUNK] * full + ([rem] if rem else [])


def _call(args):
    fn, payload, seed, index, size = args
    return fn(payload, Prng(seed, index), size)


def run(
    fn: Callable[[object, Prng, int], int],
    payload: object,
    trials: int,
    seed: int,
    jobs: int = 1,
) -> Estimate:
    """Sum ``fn(payload, prng_k, size_k)`` over all chunks."""
    if trials <= 0:
        raise ParameterError("trials must be positive")
    if jobs < 1:
        raise ParameterError("jobs must be >= 1")
    tasks = [(fn, payload, seed, k, size) for k, size in enumerate(_chunk_sizes(trials))]
    if jobs == 1 or len(tasks) == 1:
        passes = sum(_call(t) for t in tasks)
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            passes = sum(pool.map(_call, tasks))
    return Estimate(int(passes), trials, seed)


def within_3sigma(estimate: Estimate, exact: float) -> bool:
    """Does the estimate lie within 3 binomial sigma of the exact value?"""
    sigma = math.sqrt(exact * (1.0 - exact) / estimate.trials)
    return abs(estimate.probability - exact) <= 3.0 * sigma + 1e-12
