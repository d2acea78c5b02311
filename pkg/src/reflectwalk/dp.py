"""Exact forward evolution of the walk's distribution.

This is the ground-truth route for ``E(X_n | X_0 = j)``.  Mass vectors are
stored as integer numerators over one shared denominator so that a step
is a handful of big-integer multiply-adds instead of Fraction arithmetic;
a step multiplies the denominator by ``2 L`` where ``L`` is the lcm of the
jump-law denominators.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterator

from .errors import WalkError
from .jump_model import JumpDistribution, phi_polynomial

__all__ = [
    "ProbVector",
    "distributions",
    "expected_position_dp",
    "expected_positions_dp",
    "f_bivariate_closed_form",
    "f_bivariate_residual",
    "point_mass",
    "step",
]


@dataclass(frozen=True)
class ProbVector:
    """Law of ``X_n`` given ``X_0 = start``: ``P(X_n = k) = numer[k] / denom``."""

    numer: tuple[int, ...]
    denom: int
    time: int
    start: int

    @property
    def mass(self) -> list[Fraction]:
        return [Fraction(a, self.denom) for a in self.numer]

    def __getitem__(self, k: int) -> Fraction:
        if 0 <= k < len(self.numer):
            return Fraction(self.numer[k], self.denom)
        return Fraction(0)

    def __len__(self) -> int:
        return len(self.numer)

    def total(self) -> Fraction:
        return Fraction(sum(self.numer), self.denom)

    def mean(self) -> Fraction:
        return Fraction(sum(k * a for k, a in enumerate(self.numer)), self.denom)


def point_mass(j: int) -> ProbVector:
    if j < 0:
        raise WalkError("BAD_START", f"start position must be >= 0, got {j}")
    return ProbVector(tuple([0] * j + [1]), 1, 0, j)


@lru_cache(maxsize=64)
def _scaled_jumps(d: JumpDistribution) -> tuple[int, tuple[int, ...]]:
    lcm = math.lcm(*(p.denominator for p in d.probs))
    return lcm, tuple(int(p * lcm) for p in d.probs)


def step(v: ProbVector, d: JumpDistribution) -> ProbVector:
    lcm, jumps = _scaled_jumps(d)
    m = v.numer
    size = max(len(m) + 1, len(jumps))
    out = [0] * size
    # interior sites split evenly; site 1 sends half its mass to 0
    for k in range(1, len(m)):
        a = m[k]
        if a:
            a *= lcm
            out[k - 1] += a
            out[k + 1] += a
    a0 = 2 * m[0]
    if a0:
        for k, pk in enumerate(jumps):
            out[k] += a0 * pk
    while len(out) > 1 and out[-1] == 0:
        out.pop()
    return ProbVector(tuple(out), v.denom * 2 * lcm, v.time + 1, v.start)


def distributions(d: JumpDistribution, j: int) -> Iterator[ProbVector]:
    """Yield the laws of ``X_0, X_1, ...`` forever."""
    v = point_mass(j)
    while True:
        yield v
        v = step(v, d)


def expected_positions_dp(d: JumpDistribution, j: int, n_max: int) -> list[Fraction]:
    """``[E(X_n | X_0=j) for n in 0..n_max]`` as exact rationals."""
    if n_max < 0:
        raise WalkError("BAD_TIME", f"n must be >= 0, got {n_max}")
    out = []
    for v in distributions(d, j):
        out.append(v.mean())
        if v.time == n_max:
            return out


def expected_position_dp(d: JumpDistribution, j: int, n: int) -> Fraction:
    return expected_positions_dp(d, j, n)[-1]


def _rho(z: float) -> float:
    # same as (1 - sqrt(1 - z^2)) / z without the cancellation near 0
    return z / (1.0 + math.sqrt(1.0 - z * z))


def f_bivariate_closed_form(d: JumpDistribution, j: int, w: float, z: float) -> float:
    """Closed form of ``sum_n sum_k P(X_n=k | X_0=j) w^k z^n`` for real ``|z| < 1``."""
    if not -1.0 < z < 1.0:
        raise WalkError("OUT_OF_DISK", f"need |z| < 1, got {z}")
    if z == 0.0:
        return w**j
    phi = phi_polynomial(d)
    r = _rho(z)
    phi_r = phi(r)
    num = r ** (j + 1) * phi(w) - phi_r * w ** (j + 1)
    den = z * (w * w + 1.0) - 2.0 * w
    return 2.0 / phi_r * num / den


def f_bivariate_residual(
    d: JumpDistribution, j: int, w: float, z: float, n_max: int
) -> float:
    """``|closed form - partial sum through z^n_max|``, a consistency diagnostic.

    With ``0 <= w <= 1`` the neglected tail is at most
    ``|z|^(n_max+1) / (1 - |z|)``.
    """
    if n_max < 0:
        raise WalkError("TRUNCATION_TOO_SMALL", f"n_max must be >= 0, got {n_max}")
    partial = 0.0
    zn = 1.0
    for v in distributions(d, j):
        fw = 0.0
        for a in reversed(v.numer):
            fw = fw * w + a / v.denom if a else fw * w
        partial += zn * fw
        if v.time == n_max:
            break
        zn *= z
    return abs(f_bivariate_closed_form(d, j, w, z) - partial)
