"""Jump distributions at the origin and the polynomials built from them.

A walk on ``{0, 1, 2, ...}`` moves +/-1 with probability 1/2 from any
positive site; from 0 it jumps to ``k`` with probability ``p_k``.  Everything
downstream is driven by

    h(x)   = sum_k p_k x^k
    phi(x) = x^2 + 1 - 2 x h(x)

which are kept here as polynomials with exact rational coefficients.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Sequence

from .errors import WalkError

__all__ = [
    "Case",
    "CaseTag",
    "JumpDistribution",
    "RationalPoly",
    "classify_case",
    "h_polynomial",
    "moment",
    "parse_probability",
    "phi_polynomial",
    "validate",
]


def parse_probability(value) -> Fraction:
    """Convert ``"3/10"``, ``"0.3"``, ``3``, or a ``Fraction`` exactly.

    Decimal strings go through ``Fraction(str)``, which is exact, so
    ``"0.1"`` becomes ``1/10``.  Binary floats are refused since their
    value is rarely the one the user typed.
    """
    if isinstance(value, bool):
        raise WalkError("INEXACT_INPUT", f"boolean {value!r} is not a probability")
    if isinstance(value, Rational):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise WalkError("BAD_NUMBER", f"cannot parse {value!r} as a rational") from exc
    if isinstance(value, float):
        raise WalkError(
            "INEXACT_INPUT",
            f"float {value!r} given; pass a string such as {str(value)!r} instead",
        )
    raise WalkError("BAD_NUMBER", f"unsupported probability type {type(value).__name__}")


class RationalPoly:
    """Dense polynomial over the rationals; ``coeffs[i]`` multiplies ``x**i``."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable = ()):
        c = [Fraction(a) for a in coeffs]
        while c and c[-1] == 0:
            c.pop()
        self.coeffs: tuple[Fraction, ...] = tuple(c)

    @classmethod
    def from_roots(cls, roots: Sequence) -> "RationalPoly":
        p = cls([1])
        for r in roots:
            p = p * cls([-Fraction(r), 1])
        return p

    @property
    def degree(self) -> int:
        """Degree, with -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def __call__(self, x):
        # Horner; complex/float arguments get float coefficients
        if isinstance(x, (Fraction, int)):
            acc = Fraction(0)
            for a in reversed(self.coeffs):
                acc = acc * x + a
            return acc
        acc = 0.0 * x
        for a in reversed(self.coeffs):
            acc = acc * x + float(a)
        return acc

    def derivative(self) -> "RationalPoly":
        return RationalPoly(i * a for i, a in enumerate(self.coeffs) if i > 0)

    def __add__(self, other: "RationalPoly") -> "RationalPoly":
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (Fraction(0),) * (n - len(self.coeffs))
        b = other.coeffs + (Fraction(0),) * (n - len(other.coeffs))
        return RationalPoly(x + y for x, y in zip(a, b))

    def __neg__(self) -> "RationalPoly":
        return RationalPoly(-a for a in self.coeffs)

    def __sub__(self, other: "RationalPoly") -> "RationalPoly":
        return self + (-other)

    def __mul__(self, other) -> "RationalPoly":
        if not isinstance(other, RationalPoly):
            return RationalPoly(a * other for a in self.coeffs)
        if self.is_zero() or other.is_zero():
            return RationalPoly()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for k, b in enumerate(other.coeffs):
                    out[i + k] += a * b
        return RationalPoly(out)

    __rmul__ = __mul__

    def divmod(self, other: "RationalPoly") -> tuple["RationalPoly", "RationalPoly"]:
        """Euclidean division: ``self = q * other + r`` with ``deg r < deg other``."""
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        d = other.degree
        lead = other.coeffs[-1]
        q = [Fraction(0)] * max(len(rem) - d, 0)
        for i in range(len(rem) - 1, d - 1, -1):
            c = rem[i] / lead
            q[i - d] = c
            if c:
                for k, b in enumerate(other.coeffs):
                    rem[i - d + k] -= c * b
        return RationalPoly(q), RationalPoly(rem[:d])

    def monic(self) -> "RationalPoly":
        if self.is_zero():
            return self
        return self * (1 / self.coeffs[-1])

    def gcd(self, other: "RationalPoly") -> "RationalPoly":
        """Monic greatest common divisor (exact Euclid)."""
        a, b = self, other
        while not b.is_zero():
            a, b = b, a.divmod(b)[1]
        return a.monic()

    def to_float(self) -> list[float]:
        return [float(a) for a in self.coeffs]

    def __eq__(self, other) -> bool:
        if isinstance(other, RationalPoly):
            return self.coeffs == other.coeffs
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __repr__(self) -> str:
        return f"RationalPoly([{', '.join(str(a) for a in self.coeffs)}])"

    def __str__(self) -> str:
        if self.is_zero():
            return "0"
        terms = []
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            mono = "" if i == 0 else ("x" if i == 1 else f"x^{i}")
            mag = abs(a)
            if mono and mag == 1:
                body = mono
            elif mono:
                body = f"({mag})*{mono}" if mag.denominator != 1 else f"{mag}*{mono}"
            else:
                body = str(mag)
            terms.append(("-" if a < 0 else "+", body))
        sign, body = terms[0]
        out = ("-" if sign == "-" else "") + body
        for sign, body in terms[1:]:
            out += f" {sign} {body}"
        return out


@dataclass(frozen=True)
class JumpDistribution:
    """Validated jump law ``p_0..p_N``; build it with :func:`validate`."""

    probs: tuple[Fraction, ...]

    @property
    def max_jump(self) -> int:
        return len(self.probs) - 1

    def __iter__(self):
        return iter(self.probs)

    def __len__(self) -> int:
        return len(self.probs)

    def __getitem__(self, k: int) -> Fraction:
        return self.probs[k]

    def prob(self, k: int) -> Fraction:
        """``p_k``, zero outside the support."""
        return self.probs[k] if 0 <= k < len(self.probs) else Fraction(0)

    def __str__(self) -> str:
        return "[" + ", ".join(str(p) for p in self.probs) + "]"


def validate(raw_probs: Sequence) -> JumpDistribution:
    if raw_probs is None or len(raw_probs) == 0:
        raise WalkError("EMPTY_INPUT", "need at least one probability")
    probs = [parse_probability(p) for p in raw_probs]
    for k, p in enumerate(probs):
        if p < 0:
            raise WalkError("NEGATIVE_PROBABILITY", f"p_{k} = {p} < 0")
    total = sum(probs, Fraction(0))
    if total != 1:
        raise WalkError("SUM_NOT_ONE", f"probabilities sum to {total}")
    while probs[-1] == 0:
        probs.pop()
    return JumpDistribution(tuple(probs))


def moment(d: JumpDistribution, m: int) -> Fraction:
    """``E(Y^m) = sum_k p_k k^m`` computed exactly."""
    if m < 0:
        raise WalkError("BAD_MOMENT", f"moment order must be >= 0, got {m}")
    return sum((p * k**m for k, p in enumerate(d.probs)), Fraction(0))


def h_polynomial(d: JumpDistribution) -> RationalPoly:
    return RationalPoly(d.probs)


def phi_polynomial(d: JumpDistribution) -> RationalPoly:
    """``x^2 + 1 - 2 x h(x)``."""
    return RationalPoly([1, 0, 1]) - RationalPoly([0, 2]) * h_polynomial(d)


class Case(str, enum.Enum):
    P0_ONE = "P0_ONE"
    SPECIAL_HALF_HALF = "SPECIAL_HALF_HALF"
    PARITY = "PARITY"
    GENERIC = "GENERIC"


@dataclass(frozen=True)
class CaseTag:
    """Which asymptotic regime a distribution falls in.

    ``a1``: ``p_0 < 1``.  ``a2``: some even site has positive mass.
    ``a4`` (phi squarefree) is only known after root finding and stays
    ``None`` until :func:`reflectwalk.spectral.spectrum_report` fills it.
    """

    variant: Case
    a1: bool
    a2: bool
    a4: bool | None = None


def classify_case(d: JumpDistribution) -> CaseTag:
    a1 = d.probs[0] < 1
    a2 = any(p > 0 for p in d.probs[0::2])
    if not a1:
        variant = Case.P0_ONE
    elif d.probs == (Fraction(1, 2), Fraction(1, 2)):
        variant = Case.SPECIAL_HALF_HALF
    elif not a2:
        variant = Case.PARITY
    else:
        variant = Case.GENERIC
    return CaseTag(variant, a1, a2)
