"""Scalar constants and wave-speed dependent thresholds.

All root finding is done by bracketing bisection. Brackets:

* ``k^2 - 1 - k - sqrt(k^2 - 1)``: coarse scan of (1, 10] for the first
  sign change, then bisection.
* ``(e^u - u - 1)/u^2 = c`` on u < 0: the left side decreases from 1/2 at
  0- to 0 at -inf, and is below ``c`` at ``u = -1/c - 1``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass, field

from scipy.optimize import bisect

from .errors import (
    ComplexRootsError,
    ConditionVacuousError,
    FormulaDomainError,
    InvalidArgument,
    NoRootError,
    RealRootsRegimeError,
)

log = logging.getLogger(__name__)

K0_DEFAULT = 1.62
BETA_STAR_REPORTED = 0.7427
BETA_STAR_GRID_STEP = 1e-3

_XTOL = 1e-15
_RTOL = 8.9e-16


def _k1_equation(k):
    return k * k - 1.0 - k - math.sqrt(k * k - 1.0)


def _k2_equation(k):
    return 4.0 * k * k - 2.0 * k - 3.0


def solve_k2() -> float:
    """Root > 1 of 4k^2 - 2k - 3 = 0."""
    return (1.0 + math.sqrt(13.0)) / 4.0


def solve_k1_literal() -> float:
    """Smallest root k > 1 of k^2 - 1 - k - sqrt(k^2 - 1) = 0."""
    grid = [1.0 + 0.01 * i for i in range(901)]
    for lo, hi in zip(grid, grid[1:]):
        if _k1_equation(lo) < 0 <= _k1_equation(hi):
            return bisect(_k1_equation, lo, hi, xtol=_XTOL, rtol=_RTOL, maxiter=200)
    raise NoRootError("no sign change of the k1 equation on (1, 10]")


def compute_beta0(k0: float) -> float:
    if not k0 > 0:
        raise InvalidArgument(f"k0 must be positive, got {k0}")
    return math.sqrt(math.sqrt(2.0) / k0)


def u_star_root_bound(k0: float) -> float:
    """Largest beta for which the bridge threshold equation has a root.

    The left side of the equation is below 1/2 on u < 0, so a root needs
    beta^4 k0^2 / 8 < 1/2, i.e. beta < sqrt(2/k0).
    """
    if not k0 > 0:
        raise InvalidArgument(f"k0 must be positive, got {k0}")
    return math.sqrt(2.0 / k0)


def _ustar_lhs(u):
    return (math.expm1(u) - u) / (u * u)


def u_star_bridge(beta: float, k0: float) -> float:
    """The u < 0 with (e^u - u - 1)/u^2 = beta^4 k0^2 / 8."""
    if not beta > 0:
        raise InvalidArgument(f"beta must be positive, got {beta}")
    c = beta**4 * k0**2 / 8.0
    bound = u_star_root_bound(k0)
    if not c < 0.5:
        raise NoRootError(
            f"no threshold root for beta={beta}: need beta < sqrt(2/k0) = {bound:.6g} "
            f"(beta0 = {compute_beta0(k0):.6g})"
        )
    lo = -1.0 / c - 1.0
    while _ustar_lhs(lo) >= c:
        lo *= 2.0
    hi = -1e-6
    while _ustar_lhs(hi) <= c:
        hi /= 2.0
        if hi > -1e-300:
            raise NoRootError(f"threshold root for beta={beta} too close to 0")
    return bisect(lambda u: _ustar_lhs(u) - c, lo, hi, xtol=_XTOL, rtol=_RTOL, maxiter=400)


def u_star_sh(beta: float, k0: float) -> float:
    """-2 + k0 beta^2 / sqrt(2)."""
    if beta < 0:
        raise InvalidArgument(f"beta must be nonnegative, got {beta}")
    b0 = compute_beta0(k0)
    if beta > b0 * (1 + 1e-12):
        raise InvalidArgument(f"beta={beta} exceeds beta0={b0:.6g}")
    return -2.0 + k0 * beta * beta / math.sqrt(2.0)


def linearization_mus(beta: float, e_u_star: float) -> tuple[float, float]:
    """Roots mu1 <= mu2 of mu^4 - beta^2 mu^2 + e_u_star = 0 (as positive reals)."""
    if e_u_star < 0:
        raise InvalidArgument("e_u_star must be nonnegative")
    disc = beta**4 / 4.0 - e_u_star
    if disc < 0:
        if disc < -1e-15 * max(beta**4, 1e-300):
            raise ComplexRootsError(
                f"beta^4/4 = {beta**4 / 4:.6g} < e^u* = {e_u_star:.6g}: complex roots"
            )
        disc = 0.0
    mu2 = math.sqrt(beta * beta / 2.0 + math.sqrt(disc))
    # mu1 * mu2 = sqrt(e_u_star) exactly; avoids cancellation for tiny e_u_star
    mu1 = math.sqrt(e_u_star) / mu2 if mu2 > 0 else 0.0
    return mu1, mu2


def _a_star_from_mus(mu1, mu2):
    arg = 1.5 * math.pi * mu1 / mu2
    if arg >= math.pi / 2:
        raise FormulaDomainError(f"tan argument {arg:.6g} >= pi/2")
    return math.pi / mu2 + (mu1 / mu2) * math.tan(arg)


def a_star(beta: float, k0: float) -> float:
    """Half-length bound pi/mu2 + (mu1/mu2) tan(3 mu1 pi / (2 mu2))."""
    u = u_star_bridge(beta, k0)
    mu1, mu2 = linearization_mus(beta, math.exp(u))
    return _a_star_from_mus(mu1, mu2)


def a_star_details(beta: float, k0: float) -> dict:
    """a* together with the root of mu2 tan(mu2 a) = mu1 tan(mu1 a) it bounds."""
    from .ineqlab import solve_mu_tan

    u = u_star_bridge(beta, k0)
    e = math.exp(u)
    mu1, mu2 = linearization_mus(beta, e)
    a = _a_star_from_mus(mu1, mu2)
    root = solve_mu_tan(mu1, mu2)
    return {
        "beta": beta,
        "k0": k0,
        "u_star": u,
        "e_u_star": e,
        "mu1": mu1,
        "mu2": mu2,
        "a_star": a,
        "tan_root": root,
        "a_star_bounds_root": a >= root * (1 - 1e-12),
    }


def condition_1_44(beta: float, k0: float) -> tuple[bool, float, float]:
    """(lhs > rhs, lhs, rhs) with lhs = (pi/2) sqrt(15(-1-u*)/a*^4 + 3), rhs = beta a*."""
    u = u_star_bridge(beta, k0)
    if u > -1:
        raise ConditionVacuousError(f"u* = {u:.6g} > -1 at beta={beta}")
    mu1, mu2 = linearization_mus(beta, math.exp(u))
    a = _a_star_from_mus(mu1, mu2)
    lhs = 0.5 * math.pi * math.sqrt(15.0 * (-1.0 - u) / a**4 + 3.0)
    rhs = beta * a
    return lhs > rhs, lhs, rhs


def _condition_holds(beta, k0):
    try:
        return condition_1_44(beta, k0)[0]
    except (NoRootError, ConditionVacuousError, FormulaDomainError, ComplexRootsError):
        return False


def beta_star_bisect(k0: float) -> float:
    """Supremum of beta such that the condition holds on all of (0, beta).

    Samples a grid of step 1e-3, then bisects the first bracket where the
    condition stops holding (an inadmissible beta counts as not holding).
    Returns 0 when the condition already fails at the first grid point.
    """
    if not k0 > 0:
        raise InvalidArgument(f"k0 must be positive, got {k0}")
    limit = u_star_root_bound(k0)
    n = int(limit / BETA_STAR_GRID_STEP)
    grid = [BETA_STAR_GRID_STEP * i for i in range(1, n + 1)] + [limit * (1 - 1e-12)]
    if not _condition_holds(grid[0], k0):
        log.warning(
            "condition fails at beta=%g for k0=%g; no admissible beta* (reported %g)",
            grid[0], k0, BETA_STAR_REPORTED,
        )
        return 0.0
    prev = grid[0]
    for b in grid[1:]:
        if not _condition_holds(b, k0):
            lo, hi = prev, b
            while hi - lo > 1e-12:
                mid = 0.5 * (lo + hi)
                if _condition_holds(mid, k0):
                    lo = mid
                else:
                    hi = mid
            return lo
        prev = b
    return prev


def beta_star_report(k0: float) -> dict:
    computed = beta_star_bisect(k0)
    out = {
        "k0": k0,
        "beta_star_computed": computed,
        "beta_star_reported": BETA_STAR_REPORTED,
        "difference": computed - BETA_STAR_REPORTED,
    }
    if computed == 0.0:
        out["diagnostic"] = "condition fails for all small beta at this k0"
    return out


@dataclass(frozen=True)
class DecayRoots:
    c0: float
    tau: float
    delta: float
    eta: float


def decay_roots(beta: float, c0: float = 1.0) -> DecayRoots:
    """Roots +-tau +- i delta of m^4 + beta^2 m^2 + c0 = 0."""
    if not c0 > 0:
        raise InvalidArgument("c0 must be positive")
    if beta < 0:
        raise InvalidArgument("beta must be nonnegative")
    s = math.sqrt(c0)
    if beta * beta >= 2.0 * s:
        raise RealRootsRegimeError(f"beta^2 = {beta * beta:.6g} >= 2 sqrt(c0): real roots")
    r = c0**0.25
    ratio = beta * beta / (2.0 * s)
    tau = r * math.sqrt((1.0 - ratio) / 2.0)
    delta = r * math.sqrt((1.0 + ratio) / 2.0)
    return DecayRoots(c0, tau, delta, math.acos(tau / r))


@dataclass(frozen=True)
class Thresholds:
    beta: float
    k0: float
    u_star: float
    e_u_star: float
    mu1: float
    mu2: float
    a_star: float


def thresholds(beta: float, k0: float = K0_DEFAULT, potential: str = "bridge") -> Thresholds:
    """Threshold data for the partition certificate.

    For the shifted Swift-Hohenberg potential the exponential weight has no
    analogue, so e_u_star = 0 and a* reduces to pi/beta.
    """
    if potential == "bridge":
        u = u_star_bridge(beta, k0)
        e = math.exp(u)
    elif potential in ("sh", "swift_hohenberg_shifted"):
        u = u_star_sh(beta, k0)
        e = 0.0
    else:
        raise InvalidArgument(f"unknown potential {potential!r}")
    mu1, mu2 = linearization_mus(beta, e)
    return Thresholds(beta, k0, u, e, mu1, mu2, _a_star_from_mus(mu1, mu2))


@dataclass(frozen=True)
class PaperConstants:
    k1_literal: float
    k2: float
    k0: float
    beta0: float
    beta_star_reported: float = BETA_STAR_REPORTED
    residuals: dict = field(default_factory=dict)


def paper_constants(k0: float = K0_DEFAULT) -> PaperConstants:
    k1 = solve_k1_literal()
    k2 = solve_k2()
    b0 = compute_beta0(k0)
    residuals = {
        "k1_literal": abs(_k1_equation(k1)),
        "k2": abs(_k2_equation(k2)),
        "beta0": abs(b0**4 * k0**2 - 2.0),
    }
    return PaperConstants(k1, k2, k0, b0, BETA_STAR_REPORTED, residuals)


def constants_report(k0: float = K0_DEFAULT) -> dict:
    pc = paper_constants(k0)
    return {
        "k1_literal": pc.k1_literal,
        "k1_paper": K0_DEFAULT,
        "k2": pc.k2,
        "k0": pc.k0,
        "beta0": pc.beta0,
        "beta_star_computed": beta_star_bisect(k0),
        "beta_star_reported": pc.beta_star_reported,
        "residuals": dict(pc.residuals),
    }


def thresholds_report(th: Thresholds) -> dict:
    return asdict(th)
