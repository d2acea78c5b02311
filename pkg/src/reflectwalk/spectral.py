"""Roots of phi and what they say about the transition operator.

Each root ``alpha`` of ``phi`` gives a spectral value
``lambda = (alpha^2 + 1) / (2 alpha)``.  A root strictly inside the unit
disk gives an eigenvalue; a root outside gives a resonance.  Roots on the
circle (always ``alpha = 1``, plus ``alpha = -1`` when all jump mass sits
on odd sites) are resonances embedded in the essential spectrum ``[-1, 1]``.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field

import numpy as np

from .errors import WalkError
from .jump_model import (
    JumpDistribution,
    RationalPoly,
    classify_case,
    h_polynomial,
    phi_polynomial,
)

__all__ = [
    "RootClass",
    "SpectrumReport",
    "aberth",
    "cluster_roots",
    "poly_roots",
    "psi_polynomial",
    "spectrum_report",
    "squarefree_check",
    "squarefree_decomposition",
]

ESSENTIAL_SPECTRUM = (-1.0, 1.0)


def psi_polynomial(d: JumpDistribution) -> RationalPoly:
    """``phi(x) / (x - 1)``, by exact synthetic division."""
    q, r = phi_polynomial(d).divmod(RationalPoly([-1, 1]))
    if not r.is_zero():
        raise WalkError("NONZERO_REMAINDER", f"phi(1) = {r} should vanish")
    return q


def squarefree_decomposition(p: RationalPoly) -> list[tuple[RationalPoly, int]]:
    """Yun's algorithm: ``p = c * prod_i a_i^i`` with each ``a_i`` squarefree.

    Returns ``[(a_i, i), ...]`` for the nonconstant factors.
    """
    if p.degree < 1:
        return []
    dp = p.derivative()
    g = p.gcd(dp)
    b = p.divmod(g)[0]
    c = dp.divmod(g)[0]
    dd = c - b.derivative()
    out = []
    i = 1
    while b.degree >= 1:
        a = b.gcd(dd)
        if a.degree >= 1:
            out.append((a, i))
        b = b.divmod(a)[0]
        c = dd.divmod(a)[0]
        dd = c - b.derivative()
        i += 1
    return out


def _residual_scale(coeffs: np.ndarray, z: complex) -> float:
    r = max(1.0, abs(z))
    return float(sum(abs(a) * r**i for i, a in enumerate(coeffs)))


def aberth(
    coeffs,
    tol: float = 1e-14,
    max_iter: int = 1000,
    seed: int = 0,
) -> np.ndarray:
    """Simultaneous Aberth-Ehrlich iteration for all roots.

    ``coeffs`` are float/complex, lowest power first.  Starting points sit
    on a circle of the Cauchy radius with random phases drawn from ``seed``.
    Converged roots are frozen; iteration stops once every update is below
    ``tol`` relative to the root's size.
    """
    c = np.asarray(coeffs, dtype=complex)
    while c.size and c[-1] == 0:
        c = c[:-1]
    deg = c.size - 1
    if deg < 1:
        raise WalkError("DEGREE_TOO_LOW", "need a polynomial of degree >= 1")
    if deg == 1:
        return np.array([-c[0] / c[1]])
    hi = c[::-1]  # numpy.polyval order
    dhi = np.polyder(hi)
    radius = 1.0 + np.max(np.abs(c[:-1] / c[-1]))
    rng = np.random.default_rng(seed)
    phase = 2 * np.pi * (np.arange(deg) + rng.uniform(0.0, 1.0, deg)) / deg
    z = radius * np.exp(1j * phase)
    active = np.ones(deg, dtype=bool)
    for _ in range(max_iter):
        pz = np.polyval(hi, z)
        dpz = np.polyval(dhi, z)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = pz / dpz
            diff = z[:, None] - z[None, :]
            np.fill_diagonal(diff, 1.0)
            inv = 1.0 / diff
            np.fill_diagonal(inv, 0.0)
            repulse = inv.sum(axis=1)
            delta = ratio / (1.0 - ratio * repulse)
        delta = np.where(pz == 0, 0.0, delta)
        if not np.all(np.isfinite(delta[active])):
            # collided iterates; nudge and keep going
            bad = ~np.isfinite(delta)
            z[bad] += 1e-3 * radius * np.exp(1j * rng.uniform(0, 2 * np.pi, bad.sum()))
            continue
        z[active] -= delta[active]
        active &= np.abs(delta) > tol * np.maximum(1.0, np.abs(z))
        if not active.any():
            return z
    raise WalkError("NO_CONVERGENCE", f"Aberth iteration did not converge in {max_iter} steps")


def _newton_polish(p: RationalPoly, z: complex, steps: int = 3) -> complex:
    dp = p.derivative()
    for _ in range(steps):
        d = dp(z)
        if d == 0:
            break
        step = p(z) / d
        if not np.isfinite(step):
            break
        z = z - step
        if abs(step) <= 1e-17 * max(1.0, abs(z)):
            break
    return complex(z)


def poly_roots(p: RationalPoly, tol: float = 1e-12, max_iter: int = 1000) -> list[complex]:
    """All complex roots of ``p``, repeated according to multiplicity.

    Multiplicities come from an exact squarefree split, so a repeated root
    is reported as identical copies; each squarefree factor is solved by
    :func:`aberth` and polished by Newton's method on that factor.
    """
    if p.degree < 1:
        raise WalkError("DEGREE_TOO_LOW", f"polynomial {p} has no roots")
    roots: list[complex] = []
    for factor, mult in squarefree_decomposition(p):
        found = aberth(factor.to_float(), tol=min(tol, 1e-14), max_iter=max_iter)
        for z in found:
            z = _newton_polish(factor, complex(z))
            roots.extend([z] * mult)
    coeffs = np.array(p.to_float())
    for z in roots:
        if abs(p(z)) > max(tol, 1e-13) * _residual_scale(coeffs, z) * 10:
            raise WalkError("NO_CONVERGENCE", f"root {z} of {p} has residual {abs(p(z)):.3g}")
    return sorted(roots, key=lambda z: (round(abs(z), 12), round(np.angle(z), 12)))


def cluster_roots(roots, radius: float = 1e-7) -> list[tuple[complex, int]]:
    """Group numerically coincident roots: ``[(centre, multiplicity), ...]``."""
    groups: list[list[complex]] = []
    for z in roots:
        for g in groups:
            if abs(g[0] - z) <= radius:
                g.append(z)
                break
        else:
            groups.append([z])
    return [(complex(np.mean(g)), len(g)) for g in groups]


def _min_separation(roots) -> float:
    if len(roots) < 2:
        return float("inf")
    return min(abs(a - b) for a, b in itertools.combinations(roots, 2))


def squarefree_check(p: RationalPoly, sep_tol: float = 1e-7) -> tuple[bool, float]:
    """``(no two roots closer than sep_tol, minimum pairwise root distance)``."""
    roots = poly_roots(p)
    sep = _min_separation(roots)
    return sep > sep_tol, sep


class RootClass(str, enum.Enum):
    EIGENVALUE = "EIGENVALUE"
    RESONANCE = "RESONANCE"
    EMBEDDED_RESONANCE = "EMBEDDED_RESONANCE"


@dataclass(frozen=True)
class SpectrumReport:
    """Classified roots of ``phi``.

    ``roots[0]`` is always the root ``alpha = 1``; the remaining entries are
    the roots of ``psi``.
    """

    roots: tuple[complex, ...]
    classes: tuple[RootClass, ...]
    lambdas: tuple[complex, ...]
    squarefree: bool
    separation: float
    max_lambda_residual: float
    essential_spectrum: tuple[float, float] = field(default=ESSENTIAL_SPECTRUM)

    @property
    def psi_roots(self) -> tuple[complex, ...]:
        return self.roots[1:]

    def of_class(self, cls: RootClass) -> list[complex]:
        return [lam for lam, c in zip(self.lambdas, self.classes) if c is cls]

    @property
    def eigenvalues(self) -> list[complex]:
        return self.of_class(RootClass.EIGENVALUE)

    @property
    def resonances(self) -> list[complex]:
        return self.of_class(RootClass.RESONANCE)

    @property
    def embedded(self) -> list[complex]:
        return self.of_class(RootClass.EMBEDDED_RESONANCE)

    def counts(self) -> dict[str, int]:
        return {c.value: self.classes.count(c) for c in RootClass}


def spectrum_report(
    d: JumpDistribution,
    eps_circle: float = 1e-9,
    tol: float = 1e-12,
    sep_tol: float = 1e-7,
) -> SpectrumReport:
    phi = phi_polynomial(d)
    h = h_polynomial(d)
    psi = psi_polynomial(d)
    roots = [1 + 0j]
    if psi.degree >= 1:
        for z in poly_roots(psi, tol=tol):
            # polish against phi itself so deflation error cannot accumulate
            if abs(phi.derivative()(z)) > 1e-8:
                z = _newton_polish(phi, z, steps=2)
            roots.append(z)
    for z in roots:
        if abs(z) < tol:
            raise WalkError("ZERO_ROOT", f"root {z} at the origin; phi(0) = 1 forbids this")
    classes, lambdas = [], []
    worst = 0.0
    for z in roots:
        r = abs(z)
        if r < 1 - eps_circle:
            classes.append(RootClass.EIGENVALUE)
        elif r > 1 + eps_circle:
            classes.append(RootClass.RESONANCE)
        else:
            classes.append(RootClass.EMBEDDED_RESONANCE)
        lam = (z * z + 1) / (2 * z)
        lambdas.append(lam)
        worst = max(worst, abs(lam - h(z)))
    sep = _min_separation(roots)
    return SpectrumReport(
        roots=tuple(roots),
        classes=tuple(classes),
        lambdas=tuple(lambdas),
        squarefree=sep > sep_tol,
        separation=sep,
        max_lambda_residual=worst,
    )


def case_with_a4(d: JumpDistribution, report: SpectrumReport | None = None):
    """:func:`classify_case` with the squarefree flag filled in."""
    tag = classify_case(d)
    report = report if report is not None else spectrum_report(d)
    return type(tag)(tag.variant, tag.a1, tag.a2, report.squarefree)
