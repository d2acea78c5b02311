"""Large-n expansion of the expected position, and the pieces behind it.

For ``p_0 < 1`` the expected position behaves like

    E(X_n | X_0=j) ~ I + II + III
      I   = 2/sqrt(2 pi) * sqrt(n)
      II  = (E(Y^2) - 1) / (2 E(Y))
      III = [1/3 - E(Y^3)/(3 E(Y)) + (E(Y^2)-1)^2/(2 E(Y)^2)
             - j (E(Y^2)-1)/E(Y) + j^2 + parity] / sqrt(2 pi n)

with error ``O(n^-3/2)``; ``parity = (-1)^(n+j+1) / 2`` when every even
site has zero jump mass and 0 otherwise.  ``p_0 = 1`` is exact: ``E = j``.

The module also evaluates the partial-fraction decomposition of ``H_0``
over the roots of ``psi`` and a leading-order Darboux predictor, both used
to cross-check the expansion against exact series coefficients.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .errors import WalkError
from .jump_model import Case, JumpDistribution, classify_case, moment
from .series import binomial_series
from .spectral import SpectrumReport, psi_polynomial, spectrum_report

__all__ = [
    "AsymptoticBreakdown",
    "Constants",
    "asymptotic_expectation",
    "asymptotic_from_constants",
    "constants_closed_form",
    "constants_root_sum",
    "darboux_predict",
    "decomposition_eval",
    "gamma_half",
    "k_alpha",
    "k_alpha_series",
]

SQRT_2PI = math.sqrt(2 * math.pi)


@dataclass(frozen=True)
class Constants:
    """Coefficients of the four basic terms in the decomposition of ``H_0``.

    The closed-form route gives real ``c1..c3`` and no ``c4``; the root-sum
    route gives complex values whose imaginary parts are rounding noise.
    """

    c1: complex | float
    c2: complex | float
    c3: complex | float
    c4: complex | float | None = None


@dataclass(frozen=True)
class AsymptoticBreakdown:
    term1: float
    term2: float
    term3: float
    total: float
    case: Case
    parity_sign: int = 0


def constants_closed_form(d: JumpDistribution) -> Constants:
    e1, e2, e3 = (moment(d, m) for m in (1, 2, 3))
    if e1 == 0:
        raise WalkError("ZERO_MEAN_JUMP", "E(Y) = 0 (p_0 = 1); the constants are undefined")
    c1 = Fraction(-1, 12) - e3 / (6 * e1) + (e2 - 1) ** 2 / (4 * e1**2)
    c2 = (e2 - 1) / (2 * e1)
    return Constants(float(c1), float(c2), 0.5)


@lru_cache(maxsize=128)
def _cached_report(d: JumpDistribution) -> SpectrumReport:
    return spectrum_report(d)


def _psi_weights(d: JumpDistribution, report: SpectrumReport) -> list[tuple[complex, complex]]:
    tag = classify_case(d)
    if tag.variant is Case.SPECIAL_HALF_HALF:
        raise WalkError("NO_PSI_ROOTS", "psi is constant for p0 = p1 = 1/2")
    if tag.variant is Case.P0_ONE or not report.squarefree:
        raise WalkError("A4_VIOLATED", f"phi has a repeated root (separation {report.separation:.3g})")
    dpsi = psi_polynomial(d).derivative()
    return [(a, 1 / dpsi(a)) for a in report.psi_roots]


def constants_root_sum(d: JumpDistribution, report: SpectrumReport | None = None) -> Constants:
    """The four sums over roots ``alpha`` of ``psi`` weighted by ``1/psi'(alpha)``."""
    report = report if report is not None else _cached_report(d)
    mean = float(moment(d, 1))
    c1 = c2 = c3 = c4 = 0j
    for a, w in _psi_weights(d, report):
        c1 += w * a / (a - 1) ** 3
        c2 += w * (a + 1) / (a - 1) ** 2
        c3 += w / (a - 1)
        c4 += w * a / (a - 1) ** 2
    return Constants(2 * mean * c1, -mean * c2, mean * c3, 2 * mean * c4)


def asymptotic_expectation(
    d: JumpDistribution, j: int, n: int, check_a4: bool = True
) -> AsymptoticBreakdown:
    if n < 1:
        raise WalkError("NOT_ASYMPTOTIC", f"the expansion needs n >= 1, got {n}")
    if j < 0:
        raise WalkError("BAD_START", f"start position must be >= 0, got {j}")
    tag = classify_case(d)
    if tag.variant is Case.P0_ONE:
        return AsymptoticBreakdown(0.0, float(j), 0.0, float(j), tag.variant)
    if check_a4 and not _cached_report(d).squarefree:
        raise WalkError("A4_VIOLATED", "phi has a repeated root; the expansion is not established")
    e1, e2, e3 = (moment(d, m) for m in (1, 2, 3))
    bracket = (
        Fraction(1, 3)
        - e3 / (3 * e1)
        + (e2 - 1) ** 2 / (2 * e1**2)
        - j * (e2 - 1) / e1
        + j * j
    )
    sign = 0
    if tag.variant is Case.PARITY:
        sign = -1 if (n + j) % 2 == 0 else 1
        bracket += Fraction(sign, 2)
    root_n = math.sqrt(n)
    t1 = 2 / SQRT_2PI * root_n
    t2 = float((e2 - 1) / (2 * e1))
    t3 = float(bracket) / (SQRT_2PI * root_n)
    return AsymptoticBreakdown(t1, t2, t3, t1 + t2 + t3, tag.variant, sign)


def asymptotic_from_constants(c: Constants, j: int, n: int, parity_sign: int = 0) -> float:
    """The same expansion written through ``C_1, C_2`` instead of moments:

    ``2/sqrt(2 pi) sqrt(n) + C_2 + (C_1 - j C_2 + 1/4 + j^2/2 + parity/4) 2/sqrt(2 pi n)``.
    """
    c1, c2 = complex(c.c1).real, complex(c.c2).real
    coef = c1 - j * c2 + 0.25 + j * j / 2 + parity_sign / 4
    return 2 / SQRT_2PI * math.sqrt(n) + c2 + coef * 2 / (SQRT_2PI * math.sqrt(n))


def gamma_half(x: Fraction) -> float:
    """``Gamma(x)`` for integer or half-integer ``x`` (poles raise)."""
    x = Fraction(x)
    if x.denominator not in (1, 2):
        raise WalkError("BAD_WEIGHT", f"only integer and half-integer arguments, got {x}")
    if x.denominator == 1 and x <= 0:
        raise WalkError("GAMMA_POLE", f"Gamma has a pole at {x}")
    if x.denominator == 1:
        return float(math.factorial(int(x) - 1))
    # climb or descend from Gamma(1/2) = sqrt(pi)
    val = math.sqrt(math.pi)
    y = Fraction(1, 2)
    while y < x:
        val *= float(y)
        y += 1
    while y > x:
        y -= 1
        val /= float(y)
    return val


def darboux_predict(
    singularities: Iterable[tuple[complex, Fraction | float, complex]], n: int
) -> float:
    """Leading coefficient asymptotics from boundary singularities.

    Each singularity is ``(xi, omega, A)`` meaning the function looks like
    ``(1 - z/xi)^omega * A`` near ``xi``.  Only the minimal weight counts:
    ``[z^n] ~ sum A_i xi_i^-n / Gamma(-omega) * n^(-omega-1)``.
    """
    if n < 1:
        raise WalkError("NOT_ASYMPTOTIC", f"need n >= 1, got {n}")
    sing = []
    for xi, omega, amp in singularities:
        w = Fraction(omega).limit_denominator(1000)
        if w.denominator == 1 and w >= 0:
            raise WalkError("INTEGER_WEIGHT", f"weight {w} gives no singular behaviour")
        if abs(abs(xi) - 1) > 1e-12:
            raise WalkError("NOT_ON_CIRCLE", f"|xi| = {abs(xi)} != 1")
        sing.append((complex(xi), w, complex(amp)))
    if not sing:
        raise WalkError("NO_SINGULARITIES", "need at least one singularity")
    w_min = min(w for _, w, _ in sing)
    total = sum(a * xi ** (-n) for xi, w, a in sing if w == w_min)
    return (total / gamma_half(-w_min) * n ** (-float(w_min) - 1)).real


def k_alpha(alpha: complex, z: complex) -> complex:
    """``[(a-1)^2 + (a^2+1)((1-a) z + sqrt(1-z^2))] / ((a^2+1) z - 2a)``.

    For ``|a| > 1`` the numerator vanishes where the denominator does; near
    that point the value is taken as the mean over a small circle.
    """
    a = complex(alpha)
    z = complex(z)
    den = (a * a + 1) * z - 2 * a
    if abs(den) < 1e-6 * (abs(a * a + 1) + abs(2 * a)):
        r = 1e-2
        pts = z + r * np.exp(2j * np.pi * np.arange(32) / 32)
        return complex(np.mean([_k_alpha_raw(a, p) for p in pts]))
    return _k_alpha_raw(a, z)


def _k_alpha_raw(a: complex, z: complex) -> complex:
    num = (a - 1) ** 2 + (a * a + 1) * ((1 - a) * z + cmath.sqrt(1 - z * z))
    return num / ((a * a + 1) * z - 2 * a)


@lru_cache(maxsize=8)
def _sqrt_one_minus_z2(order: int) -> np.ndarray:
    s = binomial_series(1, 1, order)
    return np.array([float(c) for c in s.coeffs])


def k_alpha_series(alpha: complex, order: int) -> np.ndarray:
    """Taylor coefficients of ``K_alpha`` in complex floating point.

    The division by the linear denominator is run forward when its zero
    lies outside the unit disk and as a backward sum (using that the
    numerator vanishes there) when it lies inside; both directions are
    then contracting.
    """
    a = complex(alpha)
    a1 = a * a + 1
    d0 = -2 * a
    if a1 == 0:
        raise WalkError("BAD_ALPHA", "alpha = +-i makes K_alpha degenerate")
    z0 = -d0 / a1
    if abs(z0) >= 1:
        sq = _sqrt_one_minus_z2(order)
        num = a1 * sq.astype(complex)
        num[0] += (a - 1) ** 2
        if order >= 1:
            num[1] += a1 * (1 - a)
        out = np.empty(order + 1, dtype=complex)
        prev = 0j
        for k in range(order + 1):
            prev = (num[k] - a1 * prev) / d0 if k else num[0] / d0
            out[k] = prev
        return out
    if abs(a) <= 1:
        raise WalkError("BAD_ALPHA", "backward division needs |alpha| > 1")
    tail = int(math.ceil(40 * math.log(10) / -math.log(abs(z0)))) + 2
    sq = _sqrt_one_minus_z2(order + tail)
    num = a1 * sq.astype(complex)
    num[0] += (a - 1) ** 2
    num[1] += a1 * (1 - a)
    out = np.empty(order + 1, dtype=complex)
    acc = 0j
    for i in range(order + tail - 1, -1, -1):
        acc = num[i + 1] + z0 * acc
        if i <= order:
            out[i] = acc / a1
    return out


def decomposition_eval(
    d: JumpDistribution, z: complex, report: SpectrumReport | None = None
) -> complex:
    """``H_0(z)`` reassembled from its basic components, for ``|z| <= 1/2``."""
    z = complex(z)
    if abs(z) > 0.5 + 1e-15:
        raise WalkError("OUT_OF_RANGE", f"need |z| <= 1/2, got {abs(z)}")
    report = report if report is not None else _cached_report(d)
    weights = _psi_weights(d, report)
    c = constants_root_sum(d, report)
    mean = float(moment(d, 1))
    s = cmath.sqrt(1 + z)
    t = cmath.sqrt(1 - z)
    value = c.c1 * s / t + c.c2 / (1 - z) + c.c3 * s / (t * t * t) + c.c4
    for a, w in weights:
        value += 2 * mean * w * a / (a - 1) ** 3 * k_alpha(a, z)
    return value


def exact_coefficients(a: int, b: int, ns: Sequence[int]) -> list[Fraction]:
    """``[z^n] (1+z)^(a/2) (1-z)^(b/2)`` for each ``n`` in ``ns``."""
    s = binomial_series(a, b, max(ns))
    return [s[n] for n in ns]
