"""Checks of a computed profile against the first integral and the energy
partition over the level set {u <= u*}."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .constants import Thresholds
from .gridfn import GridFunction, differentiate
from .mpsolve import energy_densities
from .potentials import get_potential


def pohozaev_residual(u: GridFunction, beta: float, p, accuracy: int = 6,
                      boundary: str = "zero") -> GridFunction:
    """u'u''' - (u'')²/2 + (β²/2)(u')² + V(u); identically 0 on a homoclinic."""
    pot = get_potential(p)
    d1, d2, d3 = (differentiate(u, m, accuracy, boundary).values for m in (1, 2, 3))
    return u.with_values(d1 * d3 - 0.5 * d2 * d2 + 0.5 * beta**2 * d1 * d1 + pot.V_poho(u.values))


def nontriviality_check(u: GridFunction, beta: float) -> bool:
    """min u <= ln(β⁴/4)."""
    return bool(u.values.min() <= math.log(beta**4 / 4))


@dataclass(frozen=True)
class SubcriticalInterval:
    a: float
    b: float
    length: float
    local_energy: float
    sigma: float
    A: float
    B: float


@dataclass(frozen=True)
class PartitionCertificate:
    """Energy partition over the components of {u <= u*}.

    ``sigma`` is computed per component (the single-interval ratio applied
    to each piece separately).
    """

    u_star: float
    beta: float
    a_star: float
    subcritical_intervals: tuple
    supercritical_energy: float
    total_energy: float
    scale: float
    negative_count: int
    max_subcritical_length: float
    four_pi_check: bool
    a_star_check: bool
    supercritical_check: bool

    @property
    def negative_tol(self):
        return 1e-8 * self.scale

    def negative_intervals(self):
        return [iv for iv in self.subcritical_intervals if iv.local_energy < -self.negative_tol]


class _PiecewiseLinear:
    """Exact integrals of the piecewise-linear interpolant of node values."""

    def __init__(self, x, f):
        self.x, self.f = x, f
        self.h = x[1] - x[0]
        self.cum = np.concatenate([[0.0], np.cumsum(0.5 * self.h * (f[1:] + f[:-1]))])

    def primitive(self, t):
        j = min(max(int(math.floor((t - self.x[0]) / self.h)), 0), self.x.size - 2)
        s = t - self.x[j]
        ft = self.f[j] + (self.f[j + 1] - self.f[j]) * s / self.h
        return self.cum[j] + 0.5 * s * (self.f[j] + ft)

    def integral(self, a, b):
        return self.primitive(b) - self.primitive(a)


def _components(x, s):
    """Maximal intervals where s <= 0, with linearly interpolated ends."""
    below = s <= 0
    out = []
    i, n = 0, s.size
    while i < n:
        if not below[i]:
            i += 1
            continue
        j = i
        while j + 1 < n and below[j + 1]:
            j += 1
        left = x[0] if i == 0 else x[i - 1] + (x[i] - x[i - 1]) * s[i - 1] / (s[i - 1] - s[i])
        right = x[-1] if j == n - 1 else x[j] + (x[j + 1] - x[j]) * s[j] / (s[j] - s[j + 1])
        out.append((left, right))
        i = j + 1
    return out


def partition(u: GridFunction, beta: float, p, th: Thresholds, accuracy: int = 6) -> PartitionCertificate:
    """Localized energies over {u <= u*} and its complement.

    Node densities are integrated as piecewise-linear functions, so crossing
    cells split proportionally and the pieces add up to the trapezoid total.
    An interval counts as negative below -1e-8·(|total| + 1).
    """
    pot = get_potential(p)
    x = u.x
    dens = sum(energy_densities(u, beta, pot, accuracy))
    E = _PiecewiseLinear(x, dens)
    Aint = _PiecewiseLinear(x, pot.V_u(u.values) * (u.values - th.u_star))
    Bint = _PiecewiseLinear(x, pot.V(u.values))
    total = E.integral(x[0], x[-1])
    scale = abs(total) + 1.0
    pieces = _components(x, u.values - th.u_star)
    intervals = []
    for a, b in pieces:
        A = Aint.integral(a, b)
        B = Bint.integral(a, b)
        sigma = A / B if B > 0 else float("nan")
        intervals.append(SubcriticalInterval(
            float(a), float(b), float(b - a), float(E.integral(a, b)), float(sigma), float(A), float(B)
        ))
    edges = [x[0]] + [t for iv in pieces for t in iv] + [x[-1]]
    supercritical = sum(E.integral(edges[i], edges[i + 1]) for i in range(0, len(edges), 2))
    tol = 1e-8 * scale
    negative = [iv for iv in intervals if iv.local_energy < -tol]
    others = [iv for iv in intervals if iv.local_energy >= -tol]
    return PartitionCertificate(
        u_star=th.u_star,
        beta=beta,
        a_star=th.a_star,
        subcritical_intervals=tuple(intervals),
        supercritical_energy=float(supercritical),
        total_energy=float(total),
        scale=float(scale),
        negative_count=len(negative),
        max_subcritical_length=float(max((iv.length for iv in intervals), default=0.0)),
        four_pi_check=all(beta * iv.length < 4 * math.pi for iv in negative),
        a_star_check=all(iv.length <= 2 * th.a_star for iv in others),
        supercritical_check=bool(supercritical >= -tol),
    )


def interval_lower_bound(sigma: float) -> float:
    """(π/2)·sqrt(1 + 2/σ); +inf for σ = 0."""
    if sigma <= 0:
        return math.inf
    return 0.5 * math.pi * math.sqrt(1 + 2 / sigma)


def interval_lower_bound_check(cert: PartitionCertificate, beta: float) -> bool:
    """β·a >= (π/2)·sqrt(1 + 2/σ) on every negative-energy interval."""
    return all(
        beta * 0.5 * iv.length >= interval_lower_bound(iv.sigma) for iv in cert.negative_intervals()
    )


def sigma_bound(th: Thresholds) -> float:
    """Lower bound 1 + 15(-1 - u*)/(2 a*⁴) for 1/σ on a negative interval."""
    return 1 + 15 * (-1 - th.u_star) / (2 * th.a_star**4)


def certificate_dict(cert: PartitionCertificate, pohozaev_sup=None, nontrivial=None,
                     morse_index=None) -> dict:
    return {
        "u_star": cert.u_star,
        "intervals": [
            {"a": iv.a, "b": iv.b, "length": iv.length, "energy": iv.local_energy, "sigma": iv.sigma}
            for iv in cert.subcritical_intervals
        ],
        "supercritical_energy": cert.supercritical_energy,
        "negative_count": cert.negative_count,
        "checks": {
            "four_pi": cert.four_pi_check,
            "a_star": cert.a_star_check,
            "pohozaev_sup": pohozaev_sup,
            "nontrivial": nontrivial,
            "morse_index": morse_index,
        },
        "supercritical_nonnegative": cert.supercritical_check,
        "interval_lower_bound": interval_lower_bound_check(cert, cert.beta),
        "sigma_per_component": True,
    }
