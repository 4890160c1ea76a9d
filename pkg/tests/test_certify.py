import math

import numpy as np
import pytest

from homoclinic.certify import (
    certificate_dict,
    interval_lower_bound,
    interval_lower_bound_check,
    nontriviality_check,
    partition,
    pohozaev_residual,
    sigma_bound,
)
from homoclinic.constants import thresholds
from homoclinic.gridfn import GridFunction
from homoclinic.mpsolve import energy


def test_pohozaev_vanishes_on_solution(bridge05, sh05):
    assert bridge05.pohozaev_sup < 1e-5
    assert sh05.pohozaev_sup < 1e-5


def test_pohozaev_detects_non_solution():
    g = GridFunction.sample(lambda x: -np.exp(-x * x), -15, 15, 1501)
    assert np.abs(pohozaev_residual(g, 0.5, "bridge").values).max() > 0.1


def test_nontriviality(bridge05):
    assert nontriviality_check(bridge05.profile, 0.5)
    flat = bridge05.profile.with_values(np.zeros(bridge05.profile.n))
    assert not nontriviality_check(flat, 0.5)


def test_partition_pieces_sum_to_total(bridge05):
    u = bridge05.profile
    cert = bridge05.certificate
    local = sum(iv.local_energy for iv in cert.subcritical_intervals)
    assert local + cert.supercritical_energy == pytest.approx(cert.total_energy, abs=1e-8 * cert.scale)
    assert cert.total_energy == pytest.approx(energy(u, 0.5, "bridge").total, rel=1e-12)


def test_bridge_certificate(bridge05):
    cert = bridge05.certificate
    assert len(cert.subcritical_intervals) == 1
    iv = cert.subcritical_intervals[0]
    assert iv.length == pytest.approx(10.98, abs=0.01)
    assert iv.length <= 2 * cert.a_star
    assert cert.negative_count == 0
    assert cert.four_pi_check and cert.a_star_check and cert.supercritical_check
    assert 0 < iv.sigma < 1


def test_crossings_interpolated(bridge05):
    u = bridge05.profile
    iv = bridge05.certificate.subcritical_intervals[0]
    ua = np.interp([iv.a, iv.b], u.x, u.values)
    assert np.allclose(ua, bridge05.certificate.u_star, atol=1e-9)


def test_empty_partition(sh05):
    cert = sh05.certificate
    assert cert.subcritical_intervals == ()
    assert cert.supercritical_energy == pytest.approx(sh05.c_beta, rel=1e-12)


def test_negative_interval_flagged():
    # oscillation at ξ = β/√2 makes the gradient term beat V on the long well
    x = np.linspace(-40, 40, 2001)
    th = thresholds(0.5, 1.62)
    wave = -400 + 340 * np.cos(0.5 / np.sqrt(2) * x)
    u = GridFunction(-40.0, x[1] - x[0], wave * np.exp(-((x / 30) ** 8)))
    cert = partition(u, 0.5, "bridge", th)
    assert cert.negative_count == 1
    assert not cert.four_pi_check


def test_lower_bound_helpers():
    assert interval_lower_bound(2.0) == pytest.approx(math.pi / 2 * math.sqrt(2))
    assert interval_lower_bound(0.0) == math.inf
    th = thresholds(0.5, 1.62)
    assert sigma_bound(th) > 1


def test_certificate_dict(bridge05):
    d = certificate_dict(bridge05.certificate, 1e-7, True, 1)
    assert set(d) >= {"u_star", "intervals", "supercritical_energy", "negative_count", "checks"}
    assert set(d["checks"]) == {"four_pi", "a_star", "pohozaev_sup", "nontrivial", "morse_index"}
    assert interval_lower_bound_check(bridge05.certificate, 0.5)
