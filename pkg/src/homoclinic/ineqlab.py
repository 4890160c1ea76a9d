"""Closed-form minimizers and discretized checks of the key quadratic-form
inequalities, plus the auxiliary eigenvalue and extremal problems."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.integrate import IntegrationWarning, quad
from scipy.optimize import bisect

from .errors import (
    ConstraintViolation,
    DegenerateDenominator,
    DegenerateProblem,
    InvalidArgument,
    NoRootError,
    NumericalFailure,
)
from .gridfn import GridFunction, differentiate, integrate

BOUNDARY_KINDS = ("zero-ends", "equal-ends", "half-line")


@dataclass(frozen=True)
class MinimizerL1:
    """Minimizer of ∫(u'')² - 2∫(u')² + k²∫u² on (-a, a) with u(±a) = 1."""

    k: float
    a: float
    lam: float
    mu: float
    A: float
    B: float
    M_a: float
    M_a_quadrature: float
    scale: float

    def derivative(self, x, n: int = 0):
        """n-th derivative of u = A cosh(λx)cos(μx) + B sinh(λx)sin(μx)."""
        r = complex(self.lam, self.mu)
        c = complex(self.A, -self.B)
        x = np.asarray(x, dtype=float)
        f = np.cosh(r * x) if n % 2 == 0 else np.sinh(r * x)
        return np.real(c * r**n * f)

    def profile(self, n: int = 2001) -> GridFunction:
        return GridFunction.sample(self.derivative, -self.a, self.a, n)


def minimizer_l1(k: float, a: float) -> MinimizerL1:
    """Closed-form minimizer with natural conditions u''(±a) = 0.

    The endpoint value -2u(a)(u'''(a) + 2u'(a)) is checked against adaptive
    quadrature of the three integrals. The tolerance is relative to the sum
    of their magnitudes, since M_a itself can be many orders smaller.
    """
    if not k > 1:
        raise InvalidArgument(f"k must exceed 1, got {k}")
    if not a > 0:
        raise InvalidArgument(f"a must be positive, got {a}")
    lam = math.sqrt((k - 1) / 2)
    mu = math.sqrt((k + 1) / 2)
    cc = math.cosh(lam * a) * math.cos(mu * a)
    ss = math.sinh(lam * a) * math.sin(mu * a)
    den = cc * cc + ss * ss
    if den < 1e-14:
        raise DegenerateDenominator(f"denominator {den:.3g} at k={k}, a={a}")
    q = (mu * mu - lam * lam) / (2 * lam * mu)
    A = (cc - q * ss) / den
    B = (ss + q * cc) / den
    m = MinimizerL1(k, a, lam, mu, A, B, 0.0, 0.0, 0.0)
    ua, u1, u3 = (float(m.derivative(a, n)) for n in (0, 1, 3))
    endpoint = -2 * ua * (u3 + 2 * u1)

    def integral(fn):
        # tiny a trips quad's roundoff warning; the agreement test below is the guard
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", IntegrationWarning)
            return quad(fn, -a, a, epsabs=0, epsrel=1e-13, limit=1000)[0]

    i2 = integral(lambda x: m.derivative(x, 2) ** 2)
    i1 = integral(lambda x: m.derivative(x, 1) ** 2)
    i0 = integral(lambda x: m.derivative(x, 0) ** 2)
    direct = i2 - 2 * i1 + k * k * i0
    scale = i2 + 2 * i1 + k * k * i0
    if abs(endpoint - direct) > 1e-8 * scale:
        raise NumericalFailure(
            f"endpoint formula {endpoint:.17g} and quadrature {direct:.17g} disagree"
        )
    return MinimizerL1(k, a, lam, mu, A, B, endpoint, direct, scale)


def l1_sign_formula(k: float, a: float) -> float:
    """(k² - k - 1 - √(k² - 1)) · (sinh(2λa)/λ - sin(2μa)/μ)."""
    lam = math.sqrt((k - 1) / 2)
    mu = math.sqrt((k + 1) / 2)
    return (k * k - k - 1 - math.sqrt(k * k - 1)) * (
        math.sinh(2 * lam * a) / lam - math.sin(2 * mu * a) / mu
    )


def _l2_parts(k):
    lam = math.sqrt((k - 1) / 2)
    mu = math.sqrt((k + 1) / 2)
    r = complex(-lam, mu)
    c = complex(1.0, 1.0 / math.sqrt(k * k - 1))  # A - iB with A = 1, B = -1/√(k²-1)
    return lam, r, c


def l2_profile(k: float, x) -> np.ndarray:
    """Half-line minimizer e^{-λx}(cos μx - sin μx/√(k²-1))."""
    _, r, c = _l2_parts(k)
    return np.real(c * np.exp(r * np.asarray(x, dtype=float)))


def minimizer_l2(k: float) -> float:
    """u'''(0) + 2u'(0) for the half-line minimizer with u(0) = 1, u''(0) = 0."""
    if not k > 1:
        raise InvalidArgument(f"k must exceed 1, got {k}")
    lam, r, c = _l2_parts(k)
    value = (c * r**3).real + 2 * (c * r).real
    # finite-difference cross-check on the reconstructed profile
    h = 1e-2 / max(1.0, abs(r))
    g = GridFunction.sample(lambda x: l2_profile(k, x), 0.0, 16 * h, 17)
    fd = differentiate(g, 3, 8).values[0] + 2 * differentiate(g, 1, 8).values[0]
    if abs(fd - value) > 1e-5 * (1 + abs(value)):
        raise NumericalFailure(f"closed form {value:.12g} vs finite differences {fd:.12g}")
    return float(value)


@dataclass(frozen=True)
class QuadFormReport:
    value: float
    interval: tuple
    k: float
    beta: float
    boundary_kind: str
    scale: float


def quad_form(
    u: GridFunction,
    beta: float,
    k: float,
    boundary_kind: str,
    accuracy: int = 6,
    rule: str = "trapezoid",
) -> QuadFormReport:
    """∫(u'')² - β²∫(u')² + (k²β⁴/4)∫u² over the mesh of ``u``."""
    if boundary_kind not in BOUNDARY_KINDS:
        raise InvalidArgument(f"boundary_kind must be one of {BOUNDARY_KINDS}")
    v = u.values
    tol = 1e-10 * max(1.0, float(np.abs(v).max()))
    if boundary_kind == "zero-ends":
        for name, val in (("left", v[0]), ("right", v[-1])):
            if abs(val) > tol:
                raise ConstraintViolation(f"u({name} end) = {val:.3g}, expected 0")
    elif boundary_kind == "equal-ends":
        if abs(v[0] - v[-1]) > tol:
            raise ConstraintViolation(f"u(left) = {v[0]:.6g} differs from u(right) = {v[-1]:.6g}")
    elif abs(v[-1]) > 1e-8 * max(1.0, float(np.abs(v).max())):
        raise ConstraintViolation(f"u(right end) = {v[-1]:.3g} has not decayed")
    d1 = differentiate(u, 1, accuracy)
    d2 = differentiate(u, 2, accuracy)
    i2 = integrate(d2 * d2, rule)
    i1 = integrate(d1 * d1, rule)
    i0 = integrate(u * u, rule)
    c = k * k * beta**4 / 4
    return QuadFormReport(
        i2 - beta**2 * i1 + c * i0,
        (u.x_left, u.x_right),
        k,
        beta,
        boundary_kind,
        i2 + beta**2 * i1 + c * i0,
    )


def random_zero_ends(rng: np.random.Generator, a: float, n: int = 1025) -> GridFunction:
    """Random smooth function on [-a, a] vanishing at both ends.

    Up to 8 sine and cosine modes with uniform [-1, 1] coefficients, then
    projected onto u(±a) = 0 by subtracting the linear interpolant of the
    end values.
    """
    x = np.linspace(-a, a, n)
    m = int(rng.integers(1, 9))
    u = np.zeros(n)
    for _ in range(m):
        j = int(rng.integers(1, 13))
        c = rng.uniform(-1, 1)
        if rng.random() < 0.5:
            u += c * np.sin(j * np.pi * (x + a) / (2 * a))
        else:
            u += c * np.cos(j * np.pi * x / (2 * a) + rng.uniform(0, np.pi))
    u -= u[0] + (u[-1] - u[0]) * (x + a) / (2 * a)
    u[0] = u[-1] = 0.0
    return GridFunction(-a, 2 * a / (n - 1), u)


def navier_first_eigen(a: float) -> float:
    """λ₁² = π²/(4a²) for u'''' + λ²u'' = 0 with u = u'' = 0 at ±a."""
    if not a > 0:
        raise InvalidArgument(f"a must be positive, got {a}")
    return math.pi**2 / (4 * a * a)


def _dirichlet_second_difference(n, h):
    return sp.diags([np.ones(n - 1), -2 * np.ones(n), np.ones(n - 1)], [-1, 0, 1]) / h**2


def navier_first_eigen_discrete(a: float, n: int = 1024) -> float:
    """Smallest eigenvalue of the pair (∫(u'')², ∫(u')²) with hinged ends."""
    if not a > 0:
        raise InvalidArgument(f"a must be positive, got {a}")
    h = 2 * a / (n + 1)
    D2 = _dirichlet_second_difference(n, h).toarray()
    K = D2.T @ D2
    M = -D2
    return float(sla.eigh(K, M, eigvals_only=True, subset_by_index=[0, 0])[0])


def beam_witness(a: float, n: int = 2001) -> GridFunction:
    return GridFunction.sample(
        lambda x: (x**4 - a**4) / 24 - a * a * (x * x - a * a) / 4, -a, a, n
    )


def beam_ratio(a: float, n: int = 2001) -> tuple[float, GridFunction]:
    """Extremal ratio 15/(4a⁵) of ∫(v'')²/(∫v)² and its witness."""
    if not a > 0:
        raise InvalidArgument(f"a must be positive, got {a}")
    w = beam_witness(a, n)
    target = 4 * a**5 / 15
    d2 = differentiate(w, 2)
    for name, val in (("∫u", integrate(w)), ("∫(u'')²", integrate(d2 * d2))):
        if abs(val - target) > 1e-6 * target:
            raise NumericalFailure(f"{name} = {val:.12g}, expected {target:.12g}")
    return 15 / (4 * a**5), w


def beam_ratio_discrete(a: float, n: int = 1024) -> float:
    """Exact minimum of the discretized ratio over functions with v(±a) = 0.

    With K the stiffness of ∫(v'')² and w the quadrature weights of ∫v, the
    minimum of vᵀKv/(wᵀv)² is 1/(wᵀK⁻¹w).
    """
    if not a > 0:
        raise InvalidArgument(f"a must be positive, got {a}")
    h = 2 * a / (n + 1)
    D2 = _dirichlet_second_difference(n, h).tocsc()
    K = (h * (D2.T @ D2)).tocsc()
    w = np.full(n, h)
    return float(1.0 / (w @ spla.spsolve(K, w)))


def clamped_even_check(beta: float, a: float | None = None, n: int = 2001) -> float:
    """Defect of φ = 1 + cos βx as a clamped solution of φ'''' + β²φ'' = 0.

    Returns sup|φ'''' + β²φ''| on a mesh of [-a, a] plus |φ(±a)| + |φ'(±a)|.
    The default a = π/β is where the clamped conditions hold.
    """
    if not beta > 0:
        raise InvalidArgument(f"beta must be positive, got {beta}")
    if a is None:
        a = math.pi / beta
    x = np.linspace(-a, a, n)
    c = np.cos(beta * x)
    eq = beta**4 * c - beta**2 * (beta**2 * c)
    ends = np.array([-a, a])
    bdry = np.abs(1 + np.cos(beta * ends)).sum() + np.abs(beta * np.sin(beta * ends)).sum()
    return float(np.abs(eq).max() + bdry)


def solve_mu_tan(mu1: float, mu2: float) -> float:
    """Root of μ₂ tan(μ₂a) = μ₁ tan(μ₁a) in (π/(2μ₂), 3π/(2μ₂))."""
    if mu1 < 0 or mu2 <= 0:
        raise InvalidArgument("need 0 <= mu1 and mu2 > 0")
    if mu1 == mu2:
        raise DegenerateProblem("mu1 = mu2: the identity holds for every a")
    if mu1 > mu2:
        raise InvalidArgument("need mu1 < mu2")
    if mu1 == 0:
        return math.pi / mu2

    def f(a):
        return mu2 * math.tan(mu2 * a) - mu1 * math.tan(mu1 * a)

    lo, hi = math.pi / (2 * mu2), 3 * math.pi / (2 * mu2)
    cuts = [lo]
    j = 0
    while True:
        pole = (j + 0.5) * math.pi / mu1
        if pole >= hi:
            break
        if pole > lo:
            cuts.append(pole)
        j += 1
    cuts.append(hi)
    eps = 1e-9
    for left, right in zip(cuts, cuts[1:]):
        l, r = left + eps, right - eps
        xs = np.linspace(l, r, 2001)
        vals = np.array([f(x) for x in xs])
        for i in range(xs.size - 1):
            if vals[i] < 0 <= vals[i + 1] and abs(vals[i + 1] - vals[i]) < 1e6:
                root = bisect(f, xs[i], xs[i + 1], xtol=1e-15, rtol=8.9e-16, maxiter=200)
                if abs(f(root)) < 1e-10:
                    return root
    raise NoRootError(f"no root of the tan equation for mu1={mu1}, mu2={mu2}")


def l1_sweep(ks, a_values):
    rows = []
    for k in ks:
        for a in a_values:
            m = minimizer_l1(k, a)
            rows.append((k, a, m.M_a, int(np.sign(m.M_a))))
    return rows


def l2_sweep(ks):
    return [(k, minimizer_l2(k)) for k in ks]
