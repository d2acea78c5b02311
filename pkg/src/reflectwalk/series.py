"""Truncated power series with exact rational coefficients.

The generating function of the expected positions,

    H_j(z) = 2 E(Y) / (1 - z) * rho(z)^(j+1) / phi(rho(z)) + j / (1 - z),
    rho(z) = (1 - sqrt(1 - z^2)) / z,

is expanded here coefficient by coefficient, giving a second exact route to
``E(X_n | X_0 = j)`` that shares no code with the forward evolution in
:mod:`reflectwalk.dp`.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import WalkError
from .jump_model import JumpDistribution, RationalPoly, moment, phi_polynomial

__all__ = [
    "TruncatedSeries",
    "binomial_series",
    "binomial_series_convolution",
    "compose_poly",
    "expected_position_series",
    "h_series",
    "rho_series",
]


def _common_denominator(coeffs: Sequence[Fraction]) -> tuple[list[int], int]:
    den = math.lcm(*(c.denominator for c in coeffs)) if coeffs else 1
    return [c.numerator * (den // c.denominator) for c in coeffs], den


class TruncatedSeries:
    """``c_0 + c_1 z + ... + c_M z^M + O(z^(M+1))`` over the rationals.

    Binary operations between series of different orders return the
    smaller order; nothing past ``order`` is ever read or produced.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable = (), order: int | None = None):
        c = [Fraction(a) for a in coeffs]
        if order is not None:
            if order < 0:
                raise WalkError("ORDER_NEGATIVE", f"order must be >= 0, got {order}")
            c = c[: order + 1] + [Fraction(0)] * (order + 1 - len(c))
        if not c:
            raise WalkError("ORDER_NEGATIVE", "a series needs at least one coefficient")
        self.coeffs: tuple[Fraction, ...] = tuple(c)

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    @classmethod
    def constant(cls, c, order: int) -> "TruncatedSeries":
        return cls([c], order)

    @classmethod
    def geometric(cls, order: int) -> "TruncatedSeries":
        """``1 / (1 - z)``."""
        return cls([1] * (order + 1), order)

    def __getitem__(self, n: int) -> Fraction:
        return self.coeffs[n]

    def __len__(self) -> int:
        return len(self.coeffs)

    def __iter__(self):
        return iter(self.coeffs)

    def truncate(self, order: int) -> "TruncatedSeries":
        if order > self.order:
            raise WalkError("ORDER_TOO_LARGE", f"cannot extend order {self.order} to {order}")
        return TruncatedSeries(self.coeffs[: order + 1])

    def _coerce(self, other) -> "TruncatedSeries":
        if isinstance(other, TruncatedSeries):
            return other
        return TruncatedSeries.constant(other, self.order)

    def __add__(self, other) -> "TruncatedSeries":
        other = self._coerce(other)
        m = min(self.order, other.order)
        return TruncatedSeries(a + b for a, b in zip(self.coeffs[: m + 1], other.coeffs))

    __radd__ = __add__

    def __neg__(self) -> "TruncatedSeries":
        return TruncatedSeries(-a for a in self.coeffs)

    def __sub__(self, other) -> "TruncatedSeries":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "TruncatedSeries":
        return self._coerce(other) - self

    def __mul__(self, other) -> "TruncatedSeries":
        if not isinstance(other, TruncatedSeries):
            c = Fraction(other)
            return TruncatedSeries(a * c for a in self.coeffs)
        m = min(self.order, other.order)
        # integer convolution over a shared denominator, one gcd per output
        a, da = _common_denominator(self.coeffs[: m + 1])
        b, db = _common_denominator(other.coeffs[: m + 1])
        nz_b = [(k, y) for k, y in enumerate(b) if y]
        out = [0] * (m + 1)
        for i, x in enumerate(a):
            if not x:
                continue
            lim = m - i
            for k, y in nz_b:
                if k > lim:
                    break
                out[i + k] += x * y
        den = da * db
        return TruncatedSeries(Fraction(v, den) for v in out)

    __rmul__ = __mul__

    def reciprocal(self) -> "TruncatedSeries":
        """``1 / self`` by Newton iteration ``b <- b (2 - a b)``."""
        a0 = self.coeffs[0]
        if a0 == 0:
            raise WalkError("ZERO_CONSTANT_TERM", "series reciprocal needs a nonzero constant term")
        b = TruncatedSeries([1 / a0])
        prec = 1
        while prec <= self.order:
            prec = min(2 * prec, self.order + 1)
            a = self.truncate(prec - 1)
            b = TruncatedSeries(b.coeffs, prec - 1)
            b = b * (2 - a * b)
        return b

    def __truediv__(self, other) -> "TruncatedSeries":
        if isinstance(other, TruncatedSeries):
            return self * other.reciprocal()
        return self * (1 / Fraction(other))

    def __pow__(self, k: int) -> "TruncatedSeries":
        if k < 0:
            return self.reciprocal() ** (-k)
        result = TruncatedSeries.constant(1, self.order)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def cumulative(self) -> "TruncatedSeries":
        """Multiply by ``1 / (1 - z)``, i.e. take prefix sums."""
        out, acc = [], Fraction(0)
        for a in self.coeffs:
            acc += a
            out.append(acc)
        return TruncatedSeries(out)

    def evaluate(self, z) -> complex | float:
        """Horner evaluation of the truncated polynomial in floating point."""
        acc = 0.0 * z
        for a in reversed(self.coeffs):
            acc = acc * z + float(a)
        return acc

    def __eq__(self, other) -> bool:
        if isinstance(other, TruncatedSeries):
            return self.coeffs == other.coeffs
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __repr__(self) -> str:
        head = ", ".join(str(a) for a in self.coeffs[:6])
        more = ", ..." if len(self.coeffs) > 6 else ""
        return f"TruncatedSeries([{head}{more}], order={self.order})"


def compose_poly(p: RationalPoly, s: TruncatedSeries) -> TruncatedSeries:
    """``p(s(z))`` by Horner's rule; exact when ``s`` has no constant term."""
    if s.coeffs[0] != 0:
        raise WalkError("BAD_COMPOSITION", "inner series must vanish at 0")
    if p.is_zero():
        return TruncatedSeries.constant(0, s.order)
    acc = TruncatedSeries.constant(p.coeffs[-1], s.order)
    for c in reversed(p.coeffs[:-1]):
        acc = acc * s + c
    return acc


def binomial_series(a: int, b: int, order: int) -> TruncatedSeries:
    """Exact expansion of ``(1+z)^(a/2) (1-z)^(b/2)``.

    Uses the first-order recurrence that follows from
    ``(1 - z^2) f' = ((a-b)/2 - (a+b)/2 z) f``, which is linear in the
    order instead of quadratic.
    """
    if order < 0:
        raise WalkError("ORDER_NEGATIVE", f"order must be >= 0, got {order}")
    diff = Fraction(a - b, 2)
    tot = Fraction(a + b, 2)
    c = [Fraction(1)]
    prev = Fraction(0)
    for n in range(order):
        nxt = (diff * c[n] + (n - 1 - tot) * prev) / (n + 1)
        prev = c[n]
        c.append(nxt)
    return TruncatedSeries(c)


def _gen_binom(alpha: Fraction, order: int) -> list[Fraction]:
    out = [Fraction(1)]
    for k in range(order):
        out.append(out[-1] * (alpha - k) / (k + 1))
    return out


def binomial_series_convolution(a: int, b: int, order: int) -> TruncatedSeries:
    """Same coefficients as :func:`binomial_series`, by convolving the two
    generalized binomial expansions directly; quadratic cost."""
    left = TruncatedSeries(_gen_binom(Fraction(a, 2), order))
    right = _gen_binom(Fraction(b, 2), order)
    right = TruncatedSeries(c if k % 2 == 0 else -c for k, c in enumerate(right))
    return left * right


def rho_series(order: int) -> TruncatedSeries:
    """``rho(z) = (1 - sqrt(1 - z^2)) / z``: ``z/2 + z^3/8 + z^5/16 + ...``."""
    if order < 0:
        raise WalkError("ORDER_NEGATIVE", f"order must be >= 0, got {order}")
    # 1 - sqrt(1 - u) = sum_{k>=1} Catalan(k-1) / 2^(2k-1) * u^k, then u = z^2
    c = [Fraction(0)] * (order + 1)
    cat = 1
    k = 1
    while 2 * k - 1 <= order:
        c[2 * k - 1] = Fraction(cat, 2 ** (2 * k - 1))
        cat = cat * 2 * (2 * k - 1) // (k + 1)
        k += 1
    return TruncatedSeries(c)


def h_series(d: JumpDistribution, j: int, order: int) -> TruncatedSeries:
    """Expansion of ``H_j``; coefficient ``n`` is ``E(X_n | X_0 = j)``."""
    if order < 0:
        raise WalkError("ORDER_NEGATIVE", f"order must be >= 0, got {order}")
    if j < 0:
        raise WalkError("BAD_START", f"start position must be >= 0, got {j}")
    geo_j = TruncatedSeries.geometric(order) * j
    mean = moment(d, 1)
    if mean == 0:
        return geo_j
    rho = rho_series(order)
    inv_phi = compose_poly(phi_polynomial(d), rho).reciprocal()
    core = (rho ** (j + 1)) * inv_phi
    return core.cumulative() * (2 * mean) + geo_j


def expected_position_series(d: JumpDistribution, j: int, n: int) -> Fraction:
    if n < 0:
        raise WalkError("BAD_TIME", f"n must be >= 0, got {n}")
    return h_series(d, j, n)[n]
