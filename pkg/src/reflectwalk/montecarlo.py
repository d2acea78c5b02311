"""Direct simulation of the walk.

Paths are simulated in fixed-size blocks.  Block ``b`` under seed ``s``
draws from its own Philox stream keyed by ``SeedSequence(s, spawn_key=(b,))``,
so blocks can run in any order or in parallel without changing the
result, and the mean/variance reduction is done in exact integers.

Jump targets use inverse-CDF sampling: a raw 64-bit draw ``u`` selects the
first ``k`` with ``u < ceil(2^64 * (p_0 + ... + p_k))``.  Each target's
probability is off from ``p_k`` by less than ``2^-64``.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import WalkError
from .jump_model import JumpDistribution

__all__ = ["MCEstimate", "estimate_expectation", "jump_thresholds", "make_stream", "simulate_path"]

BLOCK = 1 << 16
_TWO64 = 1 << 64
_TOP_BIT = np.uint64(63)


@dataclass(frozen=True)
class MCEstimate:
    mean: float
    stderr: float
    paths: int
    seed: int


def jump_thresholds(d: JumpDistribution) -> np.ndarray:
    """Integer cut points ``ceil(2^64 * cdf_k)`` for ``k < N``."""
    cuts = []
    acc = Fraction(0)
    for p in d.probs[:-1]:
        acc += p
        t = -((-acc.numerator * _TWO64) // acc.denominator)
        cuts.append(min(t, _TWO64 - 1))
    return np.array(cuts, dtype=np.uint64)


def make_stream(seed: int, block: int = 0) -> np.random.Generator:
    if not 0 <= seed < _TWO64:
        raise WalkError("BAD_SEED", f"seed must be an unsigned 64-bit integer, got {seed}")
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(block,))))


def simulate_path(d: JumpDistribution, j: int, n: int, stream: np.random.Generator) -> int:
    """Final position of one path; consumes one raw 64-bit draw per step."""
    cuts = [int(t) for t in jump_thresholds(d)]
    bits = stream.bit_generator
    x = j
    for _ in range(n):
        u = bits.random_raw()
        if x == 0:
            x = sum(1 for t in cuts if t <= u)
        else:
            x += 1 if u >> 63 else -1
    return x


def _run_block(d: JumpDistribution, j: int, n: int, size: int, seed: int, block: int) -> tuple[int, int]:
    cuts = jump_thresholds(d)
    bits = make_stream(seed, block).bit_generator
    x = np.full(size, j, dtype=np.int64)
    for _ in range(n):
        u = bits.random_raw(size)
        at_origin = x == 0
        move = np.where((u >> _TOP_BIT).astype(bool), 1, -1)
        if cuts.size:
            jump = np.searchsorted(cuts, u, side="right").astype(np.int64)
        else:
            jump = np.zeros(size, dtype=np.int64)
        x = np.where(at_origin, jump, x + move)
    return int(x.sum()), int(np.dot(x, x))


def estimate_expectation(
    d: JumpDistribution,
    j: int,
    n: int,
    paths: int,
    seed: int,
    workers: int = 1,
) -> MCEstimate:
    """Sample mean of ``X_n`` over ``paths`` walks, with its standard error."""
    if paths < 2:
        raise WalkError("TOO_FEW_PATHS", f"need at least 2 paths, got {paths}")
    if j < 0 or n < 0:
        raise WalkError("BAD_ARGUMENT", "j and n must be nonnegative")
    make_stream(seed)  # validates the seed
    sizes = [min(BLOCK, paths - b * BLOCK) for b in range(-(-paths // BLOCK))]
    jobs = [(d, j, n, size, seed, b) for b, size in enumerate(sizes)]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda a: _run_block(*a), jobs))
    else:
        parts = [_run_block(*a) for a in jobs]
    s = sum(p[0] for p in parts)
    q = sum(p[1] for p in parts)
    mean = Fraction(s, paths)
    var = (q - s * mean) / (paths - 1)
    return MCEstimate(float(mean), math.sqrt(var / paths), paths, seed)
