"""Uniform 1-D grid functions with finite-difference calculus and quadrature.

Centered derivatives are evaluated as truncated series in nested central
differences (``np.diff``) rather than as a single weighted sum. The two are
algebraically identical, but the nested form avoids the cancellation that
plagues high-order stencils when the sampled function is large compared
with its derivatives.
"""

from __future__ import annotations

import csv
import io
import math
import os
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .errors import BoundaryLeakWarning, InvalidArgument, MeshTooSmall

MIN_POINTS = 9
ACCURACIES = (2, 4, 6, 8)

# h^m D^m = delta^m * sum_k c_k delta^(2k) for even m, and
# mu delta^m * sum_k c_k delta^(2k) for odd m (mu = midpoint average).
_EVEN_SERIES = {
    2: (1.0, -1.0 / 12, 1.0 / 90, -1.0 / 560),
    4: (1.0, -1.0 / 6, 7.0 / 240, -41.0 / 7560),
}
_ODD_SERIES = {
    1: (1.0, -1.0 / 6, 1.0 / 30, -1.0 / 140),
    3: (1.0, -1.0 / 4, 7.0 / 120, -41.0 / 3024),
}
# h D at a midpoint in terms of the half-step difference delta.
_STAGGERED_SERIES = (1.0, -1.0 / 24, 3.0 / 640, -5.0 / 7168)


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Samples ``values[i]`` of a real function at ``x_left + i*dx``."""

    x_left: float
    dx: float
    values: np.ndarray

    def __post_init__(self):
        vals = np.array(self.values, dtype=float)
        if vals.ndim != 1:
            raise InvalidArgument("values must be one-dimensional")
        if not (math.isfinite(self.dx) and self.dx > 0):
            raise InvalidArgument(f"dx must be positive and finite, got {self.dx}")
        if not math.isfinite(self.x_left):
            raise InvalidArgument("x_left must be finite")
        if vals.size < MIN_POINTS:
            raise MeshTooSmall(f"need at least {MIN_POINTS} points, got {vals.size}")
        if not np.all(np.isfinite(vals)):
            raise InvalidArgument("values must be finite")
        vals.setflags(write=False)
        object.__setattr__(self, "x_left", float(self.x_left))
        object.__setattr__(self, "dx", float(self.dx))
        object.__setattr__(self, "values", vals)

    @classmethod
    def sample(cls, fn, x_left, x_right, n):
        """Sample ``fn`` on ``n`` equispaced nodes spanning [x_left, x_right]."""
        if n < 2 or not x_right > x_left:
            raise InvalidArgument("need x_right > x_left and n >= 2")
        x = np.linspace(x_left, x_right, n)
        return cls(x_left, (x_right - x_left) / (n - 1), fn(x))

    @property
    def n(self) -> int:
        return self.values.size

    @property
    def x(self) -> np.ndarray:
        return self.x_left + self.dx * np.arange(self.n)

    @property
    def x_right(self) -> float:
        return self.x_left + self.dx * (self.n - 1)

    def with_values(self, values) -> "GridFunction":
        return GridFunction(self.x_left, self.dx, values)

    def __add__(self, other):
        if isinstance(other, GridFunction):
            _check_same_mesh(self, other)
            other = other.values
        return self.with_values(self.values + other)

    def __sub__(self, other):
        if isinstance(other, GridFunction):
            _check_same_mesh(self, other)
            other = other.values
        return self.with_values(self.values - other)

    def __mul__(self, c):
        if isinstance(c, GridFunction):
            _check_same_mesh(self, c)
            c = c.values
        return self.with_values(self.values * c)

    __rmul__ = __mul__

    def __neg__(self):
        return self.with_values(-self.values)


@dataclass(frozen=True)
class DerivativeBundle:
    d1: GridFunction
    d2: GridFunction
    d3: GridFunction
    d4: GridFunction


def _check_same_mesh(f, g):
    if f.n != g.n or not np.isclose(f.dx, g.dx, rtol=1e-12) or not np.isclose(
        f.x_left, g.x_left, rtol=0, atol=1e-12 * max(1.0, abs(f.x_left))
    ):
        raise InvalidArgument("grid functions live on different meshes")


def _check_order(order, accuracy):
    if order not in (1, 2, 3, 4):
        raise InvalidArgument(f"derivative order must be in 1..4, got {order}")
    if accuracy not in ACCURACIES:
        raise InvalidArgument(f"accuracy must be one of {ACCURACIES}, got {accuracy}")


def stencil_radius(order: int, accuracy: int) -> int:
    """Half-width of the centered stencil for ``order`` at ``accuracy``."""
    return (order + 1) // 2 + accuracy // 2 - 1


def fornberg_weights(order: int, offsets) -> np.ndarray:
    """Finite-difference weights for the ``order``-th derivative at 0 from
    nodes at ``offsets`` (in units of the mesh spacing), by Fornberg's
    recursion."""
    z = np.asarray(offsets, dtype=float)
    n = z.size
    if order >= n:
        raise InvalidArgument("need more nodes than the derivative order")
    c = np.zeros((n, order + 1))
    c[0, 0] = 1.0
    c1 = 1.0
    c4 = z[0]
    for i in range(1, n):
        mn = min(i, order)
        c2 = 1.0
        c5 = c4
        c4 = z[i]
        for j in range(i):
            c3 = z[i] - z[j]
            c2 *= c3
            if j == i - 1:
                for k in range(mn, 0, -1):
                    c[i, k] = c1 * (k * c[i - 1, k - 1] - c5 * c[i - 1, k]) / c2
                c[i, 0] = -c1 * c5 * c[i - 1, 0] / c2
            for k in range(mn, 0, -1):
                c[j, k] = (c4 * c[j, k] - k * c[j, k - 1]) / c3
            c[j, 0] = c4 * c[j, 0] / c3
        c1 = c2
    return c[:, order]


def central_series(w: np.ndarray, order: int, accuracy: int) -> np.ndarray:
    """``h^order`` times the centered derivative of the samples ``w``.

    The result covers nodes ``R .. len(w)-1-R`` with ``R = stencil_radius``.
    """
    w = np.asarray(w, dtype=float)
    nterms = accuracy // 2
    R = stencil_radius(order, accuracy)
    m = w.size - 2 * R
    if m < 1:
        raise MeshTooSmall(f"need at least {2 * R + 1} points for this stencil")
    out = np.zeros(m)
    x = np.diff(w, order)
    if order % 2 == 0:
        coef = _EVEN_SERIES[order]
        for k in range(nterms):
            t = (x.size - m) // 2
            out += coef[k] * x[t : x.size - t]
            x = np.diff(x, 2)
    else:
        coef = _ODD_SERIES[order]
        for k in range(nterms):
            y = 0.5 * (x[1:] + x[:-1])
            t = (y.size - m) // 2
            out += coef[k] * y[t : y.size - t]
            x = np.diff(x, 2)
    return out


def staggered_series(w: np.ndarray, accuracy: int) -> np.ndarray:
    """``h`` times the first derivative at midpoints of ``w``.

    Midpoint ``j`` of the output sits between nodes ``j + R`` and
    ``j + R + 1`` of the input, with ``R = accuracy//2 - 1``.
    """
    w = np.asarray(w, dtype=float)
    nterms = accuracy // 2
    x = np.diff(w)
    m = x.size - 2 * (nterms - 1)
    if m < 1:
        raise MeshTooSmall("too few points for the staggered stencil")
    out = np.zeros(m)
    for k in range(nterms):
        t = (x.size - m) // 2
        out += _STAGGERED_SERIES[k] * x[t : x.size - t]
        x = np.diff(x, 2)
    return out


def _boundary_rows(n, order, accuracy):
    """(node index, node window start, weights) for one-sided boundary nodes."""
    R = stencil_radius(order, accuracy)
    S = order + accuracy
    if n < max(S, 2 * R + 1):
        raise MeshTooSmall(f"need at least {max(S, 2 * R + 1)} points")
    rows = []
    for i in range(R):
        rows.append((i, 0, fornberg_weights(order, np.arange(S) - i)))
        j = n - 1 - i
        rows.append((j, n - S, fornberg_weights(order, np.arange(n - S, n) - j)))
    return rows


def differentiate(
    f: GridFunction, order: int, accuracy: int = 6, boundary: str = "one-sided"
) -> GridFunction:
    """Derivative of ``f`` on the same mesh.

    ``boundary="one-sided"`` switches to one-sided stencils of matching
    accuracy near the ends; ``boundary="zero"`` treats ``f`` as extended by
    zeros beyond the mesh, which is exact for compactly supported data.
    """
    _check_order(order, accuracy)
    R = stencil_radius(order, accuracy)
    h = f.dx**order
    if boundary == "zero":
        w = np.pad(f.values, R)
        return f.with_values(central_series(w, order, accuracy) / h)
    if boundary != "one-sided":
        raise InvalidArgument(f"unknown boundary mode {boundary!r}")
    rows = _boundary_rows(f.n, order, accuracy)
    out = np.empty(f.n)
    out[R : f.n - R] = central_series(f.values, order, accuracy)
    for i, start, wts in rows:
        out[i] = wts @ f.values[start : start + wts.size]
    return f.with_values(out / h)


def derivatives(f: GridFunction, accuracy: int = 6, boundary: str = "one-sided") -> DerivativeBundle:
    return DerivativeBundle(*(differentiate(f, m, accuracy, boundary) for m in (1, 2, 3, 4)))


def derivative_matrix(n: int, dx: float, order: int, accuracy: int = 6) -> sp.csr_matrix:
    """Sparse matrix of ``differentiate(., order, accuracy, "one-sided")``."""
    _check_order(order, accuracy)
    R = stencil_radius(order, accuracy)
    rows = _boundary_rows(n, order, accuracy)
    w = fornberg_weights(order, np.arange(-R, R + 1))
    M = sp.diags(
        [np.full(n - abs(k), w[k + R]) for k in range(-R, R + 1)],
        list(range(-R, R + 1)),
        shape=(n, n),
        format="lil",
    )
    for i, start, wts in rows:
        M[i, :] = 0
        M[i, start : start + wts.size] = wts
    return (M.tocsr() / dx**order).tocsr()


def staggered_matrix(n: int, dx: float, accuracy: int = 6) -> sp.csr_matrix:
    """First derivative at the ``n - 1`` midpoints, one-sided near the ends."""
    if accuracy not in ACCURACIES:
        raise InvalidArgument(f"accuracy must be one of {ACCURACIES}")
    r = accuracy // 2
    if n < 2 * r + 1:
        raise MeshTooSmall("too few points for the staggered stencil")
    M = sp.lil_matrix((n - 1, n))
    for j in range(n - 1):
        start = min(max(j - r + 1, 0), n - 2 * r)
        offs = np.arange(start, start + 2 * r) - (j + 0.5)
        M[j, start : start + 2 * r] = fornberg_weights(1, offs)
    return (M.tocsr() / dx).tocsr()


def integrate(f: GridFunction, rule: str = "trapezoid") -> float:
    """Integral over the mesh extent.

    ``rule="trapezoid"`` is the composite trapezoid rule. ``rule="gregory"``
    adds fourth-order end corrections and is meant for reference values.
    """
    v = f.values
    if rule == "trapezoid":
        return float(f.dx * (v.sum() - 0.5 * (v[0] + v[-1])))
    if rule == "gregory":
        w = np.ones(f.n)
        end = np.array([3.0 / 8, 7.0 / 6, 23.0 / 24])
        w[:3] = end
        w[-3:] = end[::-1]
        return float(f.dx * (w @ v))
    raise InvalidArgument(f"unknown quadrature rule {rule!r}")


def h2_norm_squared(f: GridFunction, accuracy: int = 6) -> float:
    """``∫(f'')² + ∫(f')² + ∫f²`` over the mesh.

    Emits ``BoundaryLeakWarning`` when ``f`` or ``f'`` is not negligible at
    the ends, since the truncated integral then misrepresents the norm on
    the whole line.
    """
    d1 = differentiate(f, 1, accuracy)
    d2 = differentiate(f, 2, accuracy)
    scale = np.abs(f.values).max()
    if scale > 0:
        ends = max(abs(f.values[0]), abs(f.values[-1]), abs(d1.values[0]), abs(d1.values[-1]))
        if ends >= 1e-8 * scale:
            warnings.warn(
                f"boundary values {ends:.3g} are not negligible (max |f| = {scale:.3g})",
                BoundaryLeakWarning,
                stacklevel=2,
            )
    return integrate(d2 * d2) + integrate(d1 * d1) + integrate(f * f)


def write_csv(f: GridFunction, dest) -> None:
    """Write ``x,value`` rows; floats round-trip exactly."""
    _write_columns(dest, ["x", "value"], [f.x, f.values])


def _write_columns(dest, header, columns):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in zip(*columns):
        w.writerow([repr(float(v)) for v in row])
    text = buf.getvalue()
    if isinstance(dest, (str, os.PathLike)):
        with open(dest, "w", newline="") as fh:
            fh.write(text)
    else:
        dest.write(text)


def read_csv(src, column: str | None = None) -> GridFunction:
    """Read a grid function from CSV with an ``x`` column.

    ``column`` names the value column; by default ``value`` or, failing
    that, ``u`` (profile files).
    """
    if isinstance(src, (str, os.PathLike)):
        with open(src, newline="") as fh:
            rows = list(csv.reader(fh))
    else:
        rows = list(csv.reader(src))
    if not rows:
        raise InvalidArgument("empty CSV")
    header = [h.strip() for h in rows[0]]
    if "x" not in header:
        raise InvalidArgument("CSV needs an 'x' column")
    if column is None:
        column = "value" if "value" in header else "u"
    if column not in header:
        raise InvalidArgument(f"CSV has no {column!r} column")
    data = np.array([[float(r[header.index("x")]), float(r[header.index(column)])] for r in rows[1:] if r])
    if data.shape[0] < MIN_POINTS:
        raise MeshTooSmall(f"need at least {MIN_POINTS} rows")
    x = data[:, 0]
    steps = np.diff(x)
    dx = (x[-1] - x[0]) / (x.size - 1)
    if not np.allclose(steps, dx, rtol=1e-8, atol=0):
        raise InvalidArgument("x column is not uniformly spaced")
    return GridFunction(x[0], dx, data[:, 1])
