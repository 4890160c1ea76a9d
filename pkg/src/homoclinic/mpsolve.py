"""Discrete energy, Euler-Lagrange residual, mountain-pass search, Newton
polish and Morse index for u'''' + β²u'' + V_u(u) = 0 on [-L, L].

The energy is a lattice sum

    E(u) = h [ ½ Σ (D2 u)² - β²/2 Σ (G u)² + Σ V(u) ]

with D2 the centered second difference and G the staggered first
difference, both of accuracy ``p``. In clamped mode the mesh values are
extended by zeros, so D2 and G are evaluated on a few ghost nodes beyond
±L as well. The residual is exactly the gradient of E divided by h, which
makes the energy and its gradient consistent to roundoff.
"""

from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass, field

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import (
    EndpointFailure,
    InsufficientTail,
    InvalidArgument,
    MountainCollapse,
    NonConvergence,
    NumericalFailure,
    SingularJacobian,
)
from .gridfn import (
    GridFunction,
    central_series,
    derivative_matrix,
    fornberg_weights,
    integrate,
    staggered_matrix,
    staggered_series,
)
from .potentials import Potential, get_potential

log = logging.getLogger(__name__)

BOUNDARIES = ("clamped", "natural")


@dataclass(frozen=True)
class SolverSettings:
    L: float = 40.0
    N: int = 2001
    P: int = 41
    coarse_tol: float = 1e-2
    newton_tol: float = 1e-8
    max_iter: int = 5000
    seed: int = 0
    accuracy: int = 6
    boundary: str = "clamped"
    respread_every: int = 50
    armijo: float = 1e-4
    newton_max_iter: int = 50

    def __post_init__(self):
        if not self.L > 0:
            raise InvalidArgument(f"L must be positive, got {self.L}")
        if self.N < 9:
            raise InvalidArgument(f"N must be at least 9, got {self.N}")
        if self.P < 3:
            raise InvalidArgument(f"P must be at least 3, got {self.P}")
        if not (self.coarse_tol > 0 and self.newton_tol > 0):
            raise InvalidArgument("tolerances must be positive")
        if self.max_iter < 1:
            raise InvalidArgument("max_iter must be positive")
        if self.accuracy not in (2, 4, 6, 8):
            raise InvalidArgument("accuracy must be 2, 4, 6 or 8")
        if self.boundary not in BOUNDARIES:
            raise InvalidArgument(f"boundary must be one of {BOUNDARIES}")

    def to_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class EnergyBreakdown:
    bending: float
    gradient_term: float
    potential_term: float
    total: float


def _lattice_matrices(n_nodes, h, p):
    """Zero-extended D2 (rows: lattice nodes) and G (rows: midpoints) acting
    on the interior mesh nodes 1..n_nodes-2."""
    r = p // 2
    pad = 2 * r
    m = n_nodes + 2 * pad
    w2 = fornberg_weights(2, np.arange(-r, r + 1))
    D2 = sp.diags(list(w2), list(range(-r, r + 1)), shape=(m, m)) / h**2
    w1 = fornberg_weights(1, np.arange(-r + 1, r + 1) - 0.5)
    # midpoint j sits between lattice nodes j and j + 1
    G = sp.diags(list(w1), list(range(-r + 1, r + 1)), shape=(m - 1, m)) / h
    cols = np.arange(pad + 1, pad + n_nodes - 1)
    return D2.tocsc()[:, cols].tocsr(), G.tocsc()[:, cols].tocsr()


class Discretization:
    """Discrete functional on the free nodes of the mesh.

    Clamped mode: unknowns are the interior nodes, u = 0 at ±L and beyond.
    Natural mode: all nodes are unknowns; one-sided stencils at the ends and
    trapezoid weights, so u'' = u''' = 0 emerge as natural conditions.
    """

    def __init__(self, beta, potential, L=40.0, N=2001, accuracy=6, boundary="clamped"):
        if not beta > 0:
            raise InvalidArgument(f"beta must be positive, got {beta}")
        if boundary not in BOUNDARIES:
            raise InvalidArgument(f"boundary must be one of {BOUNDARIES}")
        self.beta = float(beta)
        self.potential = get_potential(potential)
        self.L = float(L)
        self.N = int(N)
        self.p = int(accuracy)
        self.boundary = boundary
        self.h = 2 * self.L / (self.N - 1)
        self.x = np.linspace(-self.L, self.L, self.N)
        h, b2 = self.h, self.beta**2
        if boundary == "clamped":
            self.free = slice(1, self.N - 1)
            self.weights = np.ones(self.N - 2)
            D2, G = _lattice_matrices(self.N, h, self.p)
            self._D2 = self._G = None
            DtD = D2.T @ D2
        else:
            self.free = slice(0, self.N)
            w = np.ones(self.N)
            w[0] = w[-1] = 0.5
            self.weights = w
            D2 = derivative_matrix(self.N, h, 2, self.p)
            G = staggered_matrix(self.N, h, self.p)
            self._D2, self._G = D2, G
            DtD = D2.T @ sp.diags(w) @ D2
        GtG = G.T @ G
        self.K = (DtD - b2 * GtG).tocsc()
        W = sp.diags(self.weights)
        self.A = (DtD + GtG + W).tocsc()
        self._Alu = spla.splu(self.A)
        self.n = self.weights.size

    # mesh <-> unknowns
    def embed(self, v):
        u = np.zeros(self.N)
        u[self.free] = v
        return u

    def restrict(self, u):
        return np.array(u, dtype=float)[self.free]

    def grid(self, v) -> GridFunction:
        return GridFunction(-self.L, self.h, self.embed(v))

    def _clamped_terms(self, v):
        r = self.p // 2
        u = self.embed(v)
        b = central_series(np.pad(u, 2 * r), 2, self.p) / self.h**2
        g = staggered_series(np.pad(u, 2 * r - 1), self.p) / self.h
        return b, g

    def energy(self, v) -> float:
        V = self.potential.V(v)
        if self.boundary == "clamped":
            b, g = self._clamped_terms(v)
            return self.h * (0.5 * b @ b - 0.5 * self.beta**2 * (g @ g) + V.sum())
        b = self._D2 @ v
        g = self._G @ v
        w = self.weights
        return self.h * (0.5 * (w * b) @ b - 0.5 * self.beta**2 * (g @ g) + w @ V)

    def gradient(self, v) -> np.ndarray:
        """Gradient of the energy divided by h."""
        if self.boundary == "clamped":
            b, g = self._clamped_terms(v)
            bb = central_series(b, 2, self.p) / self.h**2
            gg = staggered_series(g, self.p) / self.h
            return (bb + self.beta**2 * gg)[1:-1] + self.potential.V_u(v)
        return self.K @ v + self.weights * self.potential.V_u(v)

    def residual(self, v) -> np.ndarray:
        """u'''' + β²u'' + V_u(u) at the free nodes."""
        return self.gradient(v) / self.weights

    def hessian(self, v):
        return (self.K + sp.diags(self.weights * self.potential.V_uu(v))).tocsc()

    def riesz(self, r):
        """H²-type Riesz representative A⁻¹r of a gradient."""
        return self._Alu.solve(r)

    def a_norm(self, v):
        return math.sqrt(max(v @ (self.A @ v), 0.0))

    def roundoff_floor(self, v) -> float:
        """Size of the residual that rounding alone produces at amplitude max|v|."""
        r = self.p // 2
        s = np.abs(fornberg_weights(2, np.arange(-r, r + 1))).sum()
        amp = max(float(np.abs(v).max()), 1.0)
        return np.finfo(float).eps * amp * s * s / self.h**4


def discretization(beta, p, settings: SolverSettings | None = None) -> Discretization:
    s = settings or SolverSettings()
    return Discretization(beta, p, s.L, s.N, s.accuracy, s.boundary)


def _disc_for(u: GridFunction, beta, p, accuracy, boundary="clamped"):
    L = 0.5 * (u.x_right - u.x_left)
    if abs(u.x_left + L) > 1e-9 * max(1.0, L):
        raise InvalidArgument("solver meshes must be symmetric about 0")
    return Discretization(beta, p, L, u.n, accuracy, boundary)


# public functionals on grid functions --------------------------------------

def energy_densities(u: GridFunction, beta: float, p, accuracy: int = 6):
    """Node densities (½(u'')², -β²/2 (u')², V(u)) with zero extension.

    The gradient density at a node averages the squared staggered
    differences at the two adjacent midpoints.
    """
    pot = get_potential(p)
    r = accuracy // 2
    b = central_series(np.pad(u.values, r), 2, accuracy) / u.dx**2
    g = staggered_series(np.pad(u.values, r), accuracy) / u.dx
    g2 = g * g
    bend = 0.5 * b * b
    grad = -0.25 * beta**2 * (g2[:-1] + g2[1:])
    return bend, grad, pot.V(u.values)


def energy(u: GridFunction, beta: float, p, accuracy: int = 6) -> EnergyBreakdown:
    """Trapezoid quadrature of the three energy densities."""
    parts = [integrate(u.with_values(d)) for d in energy_densities(u, beta, p, accuracy)]
    return EnergyBreakdown(parts[0], parts[1], parts[2], parts[0] + parts[1] + parts[2])


def residual(u: GridFunction, beta: float, p, accuracy: int = 6) -> GridFunction:
    """u'''' + β²u'' + V_u(u) on the interior nodes, with zero extension."""
    pot = get_potential(p)
    full = residual_full(u.values, u.dx, beta, pot, accuracy)
    return GridFunction(u.x_left + u.dx, u.dx, full[1:-1])


def residual_full(values, dx, beta, p, accuracy=6):
    pot = get_potential(p)
    r = accuracy // 2
    v = np.asarray(values, dtype=float)
    b = central_series(np.pad(v, 2 * r), 2, accuracy) / dx**2
    g = staggered_series(np.pad(v, 2 * r - 1), accuracy) / dx
    return central_series(b, 2, accuracy) / dx**2 + beta**2 * staggered_series(g, accuracy) / dx + pot.V_u(v)


# endpoint ------------------------------------------------------------------

def _bump(y):
    return np.where(np.abs(y) < 1, -((1 - y * y) ** 2), 0.0)


def construct_endpoint(beta: float, p, settings: SolverSettings | None = None) -> GridFunction:
    """A function with energy below the mountain pass level's base.

    A bump -(1 - x²)² is dilated until its quadratic part is negative and
    then scaled by doubling until the energy is negative. When V grows too
    fast for that (quartic potentials) and V has a second well, a relaxed
    plateau sitting in that well is returned instead: a strict local
    minimizer separated from 0 by an energy barrier.
    """
    d = discretization(beta, p, settings)
    return d.grid(_endpoint(d))


def _endpoint(d: Discretization):
    beta = d.beta
    xs = d.restrict(d.x)
    v = None
    for lam in (beta / 4, beta / 2, beta, 2 * beta):
        if 1 / lam >= 0.9 * d.L:
            continue
        cand = _bump(lam * xs)
        q = 0.5 * d.h * cand @ (d.K @ cand)
        if q < 0:
            v = cand
            break
    if v is None:
        raise EndpointFailure(f"no dilation gives a negative quadratic part at beta={beta}")
    t = 1.0
    for _ in range(40):
        with np.errstate(over="ignore", invalid="ignore"):
            e = d.energy(t * v)
        if e < 0:
            log.debug("endpoint: bump scale t=%g, energy %g", t, e)
            return t * v
        if not math.isfinite(e) or t > 1e6:
            break
        t *= 2
    well = d.potential.lower_well
    if well is None:
        raise EndpointFailure(f"scaled bump never reaches negative energy at beta={beta}")
    return _plateau(d, well)


def _plateau(d: Discretization, well, length=12.0, width=1.5, tol=1e-6, max_iter=5000):
    xs = d.restrict(d.x)
    v = 0.5 * well * (np.tanh((xs + length / 2) / width) - np.tanh((xs - length / 2) / width))
    E = d.energy(v)
    for _ in range(max_iter):
        r = d.gradient(v)
        if np.abs(d.residual(v)).max() < tol:
            break
        g = d.riesz(r)
        slope = d.h * (r @ g)
        s = 1.0
        while s > 1e-10:
            vn = v - s * g
            En = d.energy(vn)
            if En <= E - 1e-4 * s * slope:
                break
            s *= 0.5
        else:
            break
        v, E = vn, En
    if not v.min() < 0.5 * well:
        raise EndpointFailure(f"plateau in the well {well} collapsed at beta={d.beta}")
    log.debug("endpoint: relaxed plateau, energy %g, min %g", E, v.min())
    return v


# mountain pass -------------------------------------------------------------

@dataclass
class MountainPassResult:
    u: np.ndarray
    c: float
    straight_max: float
    endpoint_energy: float
    descent_iterations: int
    climb_iterations: int
    residual_sup: float
    path_energies: np.ndarray = field(repr=False, default=None)


def _respread(d, path):
    Z = np.array(path)
    dz = np.diff(Z, axis=0)
    seg = np.sqrt(np.maximum(np.einsum("ij,ij->i", dz, (d.A @ dz.T).T), 0.0))
    cs = np.concatenate([[0.0], np.cumsum(seg)])
    if cs[-1] == 0:
        return path
    out = []
    for t in np.linspace(0.0, cs[-1], len(path)):
        j = min(int(np.searchsorted(cs, t, side="right")) - 1, len(path) - 2)
        a = (t - cs[j]) / seg[j] if seg[j] > 0 else 0.0
        out.append((1 - a) * Z[j] + a * Z[j + 1])
    out[0], out[-1] = path[0], path[-1]
    return out


def _mountain_pass(d: Discretization, e: np.ndarray, s: SolverSettings) -> MountainPassResult:
    P = s.P
    path = [t * e for t in np.linspace(0.0, 1.0, P)]
    E = np.array([d.energy(z) for z in path])
    straight_max = float(E.max())
    k = int(np.argmax(E))
    barrier = 1e-10 * (1 + abs(straight_max))
    if k in (0, P - 1) or straight_max <= max(E[0], E[-1]) + barrier:
        raise MountainCollapse("no energy barrier along the straight path to the endpoint")

    # descent of the highest node, with periodic re-spreading
    it1 = 0
    last_check = E.max()
    for it1 in range(1, s.max_iter + 1):
        k = int(np.argmax(E))
        z = path[k]
        r = d.gradient(z)
        if np.abs(r / d.weights).max() < s.coarse_tol:
            break
        g = d.riesz(r)
        slope = d.h * (r @ g)
        step = 1.0
        while step > 1e-8:
            zn = z - step * g
            En = d.energy(zn)
            if En <= E[k] - s.armijo * step * slope:
                break
            step *= 0.5
        else:
            break
        path[k], E[k] = zn, En
        if it1 % s.respread_every == 0:
            path = _respread(d, path)
            E = np.array([d.energy(z) for z in path])
            m = E.max()
            if last_check - m < 1e-4 * abs(m):
                break
            last_check = m
    k = int(np.argmax(E))
    if k in (0, P - 1) or E[k] <= barrier:
        raise MountainCollapse("path maximum collapsed onto an endpoint")

    # climbing image: ascend along the path tangent, descend across it
    z = path[k]
    t = path[k + 1] - path[k - 1]
    tn = d.a_norm(t)
    if tn == 0:
        raise MountainCollapse("degenerate path tangent at the maximum")
    t = t / tn
    r = d.gradient(z)
    g = d.riesz(r)
    gn = math.sqrt(max(r @ g, 0.0))
    best, best_gn = z, gn
    it2 = 0
    while np.abs(r / d.weights).max() >= s.coarse_tol:
        it2 += 1
        if it2 > s.max_iter:
            raise NonConvergence(
                f"mountain pass did not reach residual {s.coarse_tol} in {s.max_iter} climbing steps",
                best=d.grid(best),
            )
        direction = -g + 2 * (r @ t) * t
        step = 1.0
        while True:
            zn = z + step * direction
            rn = d.gradient(zn)
            gnn = d.riesz(rn)
            nn = math.sqrt(max(rn @ gnn, 0.0))
            if nn < gn * (1 - 1e-4 * step) or step < 1 / 64:
                break
            step *= 0.5
        z, r, g, gn = zn, rn, gnn, nn
        if gn < best_gn:
            best, best_gn = z, gn
    c = d.energy(z)
    if not c > barrier:
        raise MountainCollapse(f"critical level {c:.3g} is not positive")
    return MountainPassResult(
        z, c, straight_max, float(E[-1]), it1, it2,
        float(np.abs(r / d.weights).max()), E.copy(),
    )


def mountain_pass(
    beta: float, p, cfg: SolverSettings | None = None, endpoint: GridFunction | None = None
) -> tuple[GridFunction, float]:
    """Approximate mountain-pass critical point and its level c_β."""
    s = cfg or SolverSettings()
    d = discretization(beta, p, s)
    e = _endpoint(d) if endpoint is None else d.restrict(endpoint.values)
    res = _mountain_pass(d, e, s)
    return d.grid(res.u), res.c


# Newton --------------------------------------------------------------------

@dataclass
class NewtonInfo:
    history: list
    iterations: int
    at_roundoff_floor: bool
    condition_estimate: float


def _phase_row(d, v):
    u = d.embed(v)
    du = np.zeros_like(u)
    du[1:-1] = (u[2:] - u[:-2]) / (2 * d.h)
    return d.restrict(du)


def _condition_estimate(B, lu):
    n = B.shape[0]
    inv = spla.LinearOperator(
        (n, n), matvec=lu.solve, rmatvec=lambda y: lu.solve(y, trans="T"), dtype=float
    )
    return spla.onenormest(B) * spla.onenormest(inv)


def _newton(d: Discretization, v0, tol, max_iter=50):
    """Damped Newton on the residual with a phase condition against the
    translation mode.

    Stops when the residual sup is below ``tol``, or when it sits below
    the rounding floor and a further step no longer halves it.
    """
    v = np.array(v0, dtype=float)
    hist = []
    cond = float("nan")
    for it in range(max_iter + 1):
        rs = float(np.abs(d.residual(v)).max())
        hist.append(rs)
        floor = d.roundoff_floor(v)
        if rs < tol:
            return v, NewtonInfo(hist, it, False, cond)
        if rs <= floor and len(hist) > 1 and rs > 0.5 * hist[-2]:
            return v, NewtonInfo(hist, it, True, cond)
        if it == max_iter:
            break
        H = d.hessian(v)
        ph = _phase_row(d, v)
        B = sp.bmat([[H, ph[:, None]], [ph[None, :], None]], format="csc")
        try:
            lu = spla.splu(B)
        except RuntimeError as exc:
            raise SingularJacobian(f"Jacobian factorization failed: {exc}") from exc
        cond = _condition_estimate(B, lu)
        if not cond < 1e14:
            raise SingularJacobian(f"Jacobian condition estimate {cond:.3g} exceeds 1e14")
        step = lu.solve(np.concatenate([-d.gradient(v), [0.0]]))[:-1]
        if not np.all(np.isfinite(step)):
            raise NonConvergence("Newton step is not finite", best=d.grid(v), history=hist)
        lam = 1.0
        while True:
            vn = v + lam * step
            with np.errstate(over="ignore", invalid="ignore"):
                rn = float(np.abs(d.residual(vn)).max())
            if rn < rs * (1 - 1e-4 * lam):
                break
            lam *= 0.5
            if lam < 2.0**-12:
                if rs <= floor:
                    return v, NewtonInfo(hist, it, True, cond)
                raise NonConvergence(
                    f"Newton damping failed at residual {rs:.3g}", best=d.grid(v), history=hist
                )
        v = vn
    raise NonConvergence(
        f"Newton did not reach {tol:.3g} in {max_iter} iterations (residual {hist[-1]:.3g})",
        best=d.grid(v), history=hist,
    )


def newton_solve(u0: GridFunction, beta, p, tol=1e-8, cfg: SolverSettings | None = None):
    """Newton polish returning the solution and its convergence record."""
    s = cfg or SolverSettings()
    d = _disc_for(u0, beta, p, s.accuracy, s.boundary)
    v, info = _newton(d, d.restrict(u0.values), tol, s.newton_max_iter)
    return d.grid(v), info


def newton_polish(u0: GridFunction, beta: float, p, tol: float = 1e-8,
                  cfg: SolverSettings | None = None) -> GridFunction:
    """Newton polish to residual sup below ``tol`` (or the rounding floor)."""
    return newton_solve(u0, beta, p, tol, cfg)[0]


# second variation ----------------------------------------------------------

def _banded_lower(H):
    H = sp.csr_matrix(H)
    coo = H.tocoo()
    kd = int(np.max(np.abs(coo.row - coo.col))) if coo.nnz else 0
    n = H.shape[0]
    ab = np.zeros((kd + 1, n))
    for k in range(kd + 1):
        ab[k, : n - k] = H.diagonal(-k)
    return ab


def hessian_eigenvalues(u: GridFunction, beta, p, count: int = 4,
                        cfg: SolverSettings | None = None) -> np.ndarray:
    """Lowest ``count`` eigenvalues of the discrete second variation."""
    s = cfg or SolverSettings()
    d = _disc_for(u, beta, p, s.accuracy, s.boundary)
    ab = _banded_lower(d.hessian(d.restrict(u.values)))
    try:
        return sla.eigvals_banded(ab, lower=True, select="i", select_range=(0, count - 1))
    except (sla.LinAlgError, ValueError) as exc:
        raise NumericalFailure(f"eigensolver failed: {exc}") from exc


def morse_index(u: GridFunction, beta: float, p, cfg: SolverSettings | None = None) -> int:
    """Number of eigenvalues of the second variation below -1e-8·(1 + max|V_uu|)."""
    s = cfg or SolverSettings()
    pot = get_potential(p)
    d = _disc_for(u, beta, pot, s.accuracy, s.boundary)
    v = d.restrict(u.values)
    ab = _banded_lower(d.hessian(v))
    thr = -1e-8 * (1 + float(np.abs(pot.V_uu(v)).max()))
    try:
        ev = sla.eigvals_banded(ab, lower=True, select="v", select_range=(-np.inf, thr))
    except (sla.LinAlgError, ValueError) as exc:
        raise NumericalFailure(f"eigensolver failed: {exc}") from exc
    return int(ev.size)


# decay ---------------------------------------------------------------------

def _tail_extrema(x, u, start_level):
    """Refined extrema (position, |value|) of an oscillating tail, ordered
    outward, from where |u| drops below ``start_level`` to the noise floor."""
    n = u.size
    edge = max(3, n // 50)
    noise = np.abs(u[n - edge:]).max()
    floor = max(10 * noise, 1e-300)
    a = np.abs(u)
    out = []
    started = False
    for i in range(1, n - edge):
        if not started:
            started = a[i] < start_level and i > int(np.argmax(a))
            if not started:
                continue
        if a[i] >= a[i - 1] and a[i] > a[i + 1]:
            if a[i] < floor:
                break
            y0, y1, y2 = u[i - 1], u[i], u[i + 1]
            den = y0 - 2 * y1 + y2
            off = 0.5 * (y0 - y2) / den if den != 0 else 0.0
            val = y1 - 0.25 * (y0 - y2) * off
            out.append((x[i] + off * (x[1] - x[0]), abs(val)))
    return out


def fit_decay(u: GridFunction, beta: float, p) -> tuple[float, float]:
    """Fit e^{-τ|x|}cos(δ|x| + d) to the tails of ``u``.

    Log-amplitudes of successive tail extrema are fitted linearly in |x|
    for τ; their spacing is π/δ. Both tails are used when available.
    """
    x = u.x
    v = u.values
    level = 1e-3 * min(1.0, float(np.abs(v).max()))
    tails = [_tail_extrema(x, v, level), _tail_extrema(-x[::-1], v[::-1], level)]
    tails = [t for t in tails if len(t) >= 3]
    if not tails:
        raise InsufficientTail("fewer than 3 tail extrema above the noise floor")
    X, Y, S = [], [], []
    for t in tails:
        pos = np.array([q[0] for q in t])
        X.append(pos)
        Y.append(np.log([q[1] for q in t]))
        S.append(np.diff(pos))
    # common slope with a separate intercept per tail
    cols = [np.concatenate(X)]
    for i, xi in enumerate(X):
        ind = np.zeros(sum(len(q) for q in X))
        off = sum(len(q) for q in X[:i])
        ind[off:off + len(xi)] = 1.0
        cols.append(ind)
    coef = np.linalg.lstsq(np.column_stack(cols), np.concatenate(Y), rcond=None)[0]
    tau = -coef[0]
    spacing = float(np.mean(np.concatenate(S)))
    return float(tau), float(math.pi / spacing)
