import math

import numpy as np
import pytest
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from hypothesis import given, settings
from hypothesis import strategies as st

from homoclinic.constants import solve_k1_literal, solve_k2
from homoclinic.errors import ConstraintViolation, DegenerateProblem, InvalidArgument, NoRootError
from homoclinic.gridfn import GridFunction
from homoclinic.ineqlab import (
    beam_ratio,
    beam_ratio_discrete,
    clamped_even_check,
    l1_sign_formula,
    l1_sweep,
    l2_profile,
    minimizer_l1,
    minimizer_l2,
    navier_first_eigen,
    navier_first_eigen_discrete,
    quad_form,
    random_zero_ends,
    solve_mu_tan,
)

A_GRID = (0.1, 0.5, 1, 2, 5, 10, 20)


def half_line_minimum(k, h=0.005):
    """Minimum of ∫(u'')² - 2∫(u')² + k²∫u² over u(0) = 1 by plain
    second-order differences on [0, 60/λ] and a sparse solve."""
    lam = math.sqrt((k - 1) / 2)
    n = int(60 / lam / h) + 1
    D2 = sp.diags([1, -2, 1], [0, 1, 2], shape=(n - 2, n)) / h**2
    D1 = sp.diags([-1, 1], [0, 1], shape=(n - 1, n)) / h
    w = np.full(n, h)
    w[0] = h / 2
    Q = ((D2.T @ D2) * h - 2 * (D1.T @ D1) * h + k * k * sp.diags(w)).tocsr()
    idx = np.arange(1, n - 1)
    x = spla.spsolve(Q[idx][:, idx].tocsc(), -Q[idx][:, [0]].toarray().ravel())
    u = np.zeros(n)
    u[0] = 1
    u[idx] = x
    return u @ (Q @ u)


@pytest.mark.parametrize("k", [2.34, 2.5, 3.0])
@pytest.mark.parametrize("a", A_GRID)
def test_l1_nonnegative_above_k1(k, a):
    m = minimizer_l1(k, a)
    assert m.M_a >= -1e-8
    assert abs(m.M_a - m.M_a_quadrature) <= 1e-8 * m.scale


def test_l1_negative_at_k2():
    assert min(minimizer_l1(2.0, a).M_a for a in A_GRID) < -1e-6


def test_l1_boundary_conditions():
    m = minimizer_l1(2.5, 2.0)
    assert m.derivative(2.0) == pytest.approx(1.0, abs=1e-12)
    assert m.derivative(-2.0) == pytest.approx(1.0, abs=1e-12)
    assert abs(m.derivative(2.0, 2)) < 1e-10


def test_l1_solves_euler_lagrange():
    m = minimizer_l1(2.5, 3.0)
    x = np.linspace(-3, 3, 7)
    eq = m.derivative(x, 4) + 2 * m.derivative(x, 2) + 2.5**2 * m.derivative(x)
    assert np.abs(eq).max() < 1e-10 * (1 + np.abs(m.derivative(x, 4)).max())


def test_l1_small_a_formula_sign():
    k = 3.0
    assert np.sign(l1_sign_formula(k, 1e-3)) == np.sign(minimizer_l1(k, 1e-3).M_a)
    assert l1_sign_formula(solve_k1_literal(), 1.0) == pytest.approx(0, abs=1e-10)


def test_l1_sweep_rows():
    rows = l1_sweep([2.5], [1.0, 2.0])
    assert [r[:2] for r in rows] == [(2.5, 1.0), (2.5, 2.0)]
    assert all(r[3] == 1 for r in rows)


def test_l1_rejects_bad_input():
    with pytest.raises(InvalidArgument):
        minimizer_l1(1.0, 1.0)
    with pytest.raises(InvalidArgument):
        minimizer_l1(2.0, -1.0)


@pytest.mark.parametrize("k", [1.05, 1.5, 2.5])
def test_l2_matches_independent_minimization(k):
    assert minimizer_l2(k) == pytest.approx(half_line_minimum(k), abs=1e-4)


def test_l2_zero_crossing():
    vals = {k: minimizer_l2(k) for k in (1.5, 1.99, 2.0, 2.01)}
    assert vals[1.99] < 0 < vals[2.01]
    assert abs(vals[2.0]) < 1e-12
    k = solve_k2()
    lam, mu, s = math.sqrt((k - 1) / 2), math.sqrt((k + 1) / 2), math.sqrt(k * k - 1)
    assert minimizer_l2(k) == pytest.approx(-2 * lam + mu * (s * s - 1) / s, rel=1e-12)


def test_l2_profile_conditions():
    assert l2_profile(1.5, 0.0) == pytest.approx(1.0)
    x = np.array([40.0])
    assert abs(l2_profile(1.5, x)[0]) < 1e-3


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0.5, 5.0))
def test_quad_form_k1_nonnegative(seed, a):
    rng = np.random.default_rng(seed)
    q = quad_form(random_zero_ends(rng, a), math.sqrt(2), 1.0, "zero-ends")
    assert q.value >= -1e-8 * q.scale


def test_quad_form_constraints():
    f = GridFunction.sample(lambda x: 1 + 0 * x, -1, 1, 101)
    with pytest.raises(ConstraintViolation):
        quad_form(f, 1.0, 1.0, "zero-ends")
    with pytest.raises(InvalidArgument):
        quad_form(f, 1.0, 1.0, "periodic")


def test_quad_form_equal_ends_sign_change():
    f = GridFunction.sample(lambda x: 1 + 0 * x, -1, 1, 101)
    assert quad_form(f, 1.0, 1.0, "equal-ends").value == pytest.approx(0.5, rel=1e-12)


@pytest.mark.parametrize("a", [0.5, 1.0, math.pi / 2, 2.0])
def test_navier(a):
    assert navier_first_eigen_discrete(a) == pytest.approx(navier_first_eigen(a), rel=1e-4)
    assert math.sqrt(navier_first_eigen(a)) * a == pytest.approx(math.pi / 2)


def test_beam():
    ratio, w = beam_ratio(1.0)
    assert ratio == 3.75
    assert beam_ratio_discrete(1.0) == pytest.approx(3.75, rel=1e-2)
    assert w.values[0] == pytest.approx(0, abs=1e-14)


@pytest.mark.parametrize("beta", [0.5, 1.0])
def test_clamped(beta):
    assert clamped_even_check(beta) < 1e-8
    assert clamped_even_check(beta, a=1.05 * math.pi / beta) > 1e-3


def test_mu_tan():
    r = solve_mu_tan(0.1, 0.9)
    assert 0.9 * math.tan(0.9 * r) == pytest.approx(0.1 * math.tan(0.1 * r), abs=1e-9)
    assert solve_mu_tan(0.0, 0.5) == pytest.approx(2 * math.pi)
    with pytest.raises(DegenerateProblem):
        solve_mu_tan(0.5, 0.5)
    with pytest.raises(NoRootError):
        solve_mu_tan(0.5, 0.9)
