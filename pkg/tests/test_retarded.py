import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from nullcharge.errors import NoIntersection, RadiusUnderflow, SingularRay
from nullcharge.minkowski import mdot
from nullcharge.radiation import curvilinear_to_cartesian
from nullcharge.retarded import (analytic_derivatives, field_tensor, frame_at, lw_potential,
                                 retarded_frame, retarded_time, singular_ray_distance,
                                 wave_operator_residual)
from nullcharge.worldline import HelicalWorldline, SampledWorldline, StraightWorldline, circular

ALONG_Z = StraightWorldline((0, 0, 1))


def catalog():
    ts = np.linspace(-30.0, 30.0, 3001)
    helix = HelicalWorldline(rho=1.5, drift=0.3, t_min=-30, t_max=30)
    return [
        StraightWorldline((1, -2, 0.5), origin=(0.3, 0, 0)),
        circular(1.0, t_min=-30, t_max=30),
        helix,
        SampledWorldline(ts, helix.position(ts)),
    ]


def test_retarded_time_examples():
    assert abs(retarded_time(ALONG_Z, [2, 1, 0, 0]) - 0.75) < 1e-12
    assert abs(retarded_time(ALONG_Z, [1, 0, 0, 0.5]) - 0.75) < 1e-12
    with pytest.raises(SingularRay):
        retarded_time(ALONG_Z, [2, 0, 0, 2])


def test_no_intersection():
    with pytest.raises(NoIntersection):
        retarded_time(ALONG_Z, [-500, 0, 0, 0])


def test_frame_example():
    fr = retarded_frame(ALONG_Z, [2, 1, 0, 0])
    assert abs(fr.r - 2) < 1e-12
    assert_allclose(fr.k, [5 / 8, 1 / 2, 0, -3 / 8], atol=1e-12)
    assert abs(mdot(fr.k, fr.u) + 1) < 1e-12
    assert_allclose(lw_potential(1.0, fr), [0.5, 0, 0, 0.5], atol=1e-12)
    assert not np.any(lw_potential(0.0, fr))
    assert_allclose(lw_potential(2.0, fr), 2 * lw_potential(1.0, fr), rtol=0)
    assert not np.any(field_tensor(1.0, fr).cov)


def test_singular_ray_distance():
    assert abs(singular_ray_distance(ALONG_Z, [2, 1, 0, 0]) - 2) < 1e-12
    d = [singular_ray_distance(ALONG_Z, [2, 0, 0, 2 - delta]) for delta in (1e-1, 1e-2, 1e-3)]
    assert d[0] > d[1] > d[2] and d[2] < 2e-3
    # directly behind the charge: theta = pi, r = 2 (t - s)
    assert abs(singular_ray_distance(ALONG_Z, [2, 0, 0, -1]) - 3.0) < 1e-12
    assert singular_ray_distance(ALONG_Z, [2, 0, 0, 2]) == 0.0


def test_radius_guard():
    fr = frame_at(ALONG_Z, 0.0, [2, 0, 0, 2])
    with pytest.raises(RadiusUnderflow):
        lw_potential(1.0, fr)


def _random_points(rng, w, n):
    """Observation points built from random emission events, kept away from the ray."""
    pts = []
    for _ in range(n):
        s = rng.uniform(-10, 10)
        t = s + rng.uniform(0.5, 8.0)
        th = math.acos(rng.uniform(-1, math.cos(0.3)))
        x, _ = curvilinear_to_cartesian(w, t, s, th, rng.uniform(0, 2 * math.pi))
        pts.append((x, s, t, th))
    return pts


def test_frame_invariants_across_catalog(rng):
    for w in catalog():
        for x, s, t, th in _random_points(rng, w, 60):
            fr = retarded_frame(w, x)
            assert abs(mdot(fr.k, fr.k)) < 1e-10
            assert abs(mdot(fr.k, fr.u) + 1) < 1e-10
            assert fr.r > 0
            assert abs(fr.s - s) < 1e-9
            assert abs(fr.r - (t - s) * (1 - math.cos(th))) < 1e-9 * (1 + fr.r)


def test_field_tensor_is_exterior_derivative_of_potential():
    w = circular(1.0)
    x = np.array([2.0, 2.0, 0.0, 0.0])
    F = field_tensor(1.0, retarded_frame(w, x)).cov

    def dA(h):
        out = np.zeros((4, 4))  # out[mu, nu] = d_mu A_nu
        for mu in range(4):
            e = np.zeros(4)
            e[mu] = h
            ap = lw_potential(1.0, retarded_frame(w, x + e)) * [-1, 1, 1, 1]
            am = lw_potential(1.0, retarded_frame(w, x - e)) * [-1, 1, 1, 1]
            out[mu] = (ap - am) / (2 * h)
        return out - out.T

    e1 = np.max(np.abs(dA(1e-3) - F))
    e2 = np.max(np.abs(dA(5e-4) - F))
    assert e1 < 1e-5
    assert 3.0 < e1 / e2 < 5.0


def test_differentiation_rules(rng):
    w = HelicalWorldline(rho=1.2, drift=0.4)
    for x, *_ in _random_points(rng, w, 5):
        ds, dr, dk = analytic_derivatives(retarded_frame(w, x))
        errs = []
        for h in (1e-3, 5e-4):
            num_s, num_r, num_k = np.zeros(4), np.zeros(4), np.zeros((4, 4))
            for b in range(4):
                e = np.zeros(4)
                e[b] = h
                fp, fm = retarded_frame(w, x + e), retarded_frame(w, x - e)
                num_s[b] = (fp.s - fm.s) / (2 * h)
                num_r[b] = (fp.r - fm.r) / (2 * h)
                num_k[:, b] = (fp.k - fm.k) * [-1, 1, 1, 1] / (2 * h)
            errs.append([np.max(np.abs(num_s - ds)), np.max(np.abs(num_r - dr)),
                         np.max(np.abs(num_k - dk))])
        errs = np.array(errs)
        assert np.all(errs[0] < 1e-4)
        ratio = errs[0] / np.maximum(errs[1], 1e-300)
        assert np.all((ratio > 3.0) | (errs[0] < 1e-9))


def test_wave_operator_straight_worldline():
    # r = x0 - x.v is linear in x here, so only rounding noise remains
    x = [2.0, 1.0, 0.0, 0.0]
    for h in (1e-3, 5e-4):
        assert np.max(np.abs(wave_operator_residual(1.0, ALONG_Z, x, h))) < 1e-12 / h**2
    assert not np.any(wave_operator_residual(0.0, ALONG_Z, x, 1e-3))


def test_wave_operator_second_order_on_circle():
    w = circular(1.0)
    x = [3.0, 0.4, -0.9, 0.5]
    r1 = np.max(np.abs(wave_operator_residual(1.0, w, x, 1e-3)))
    r2 = np.max(np.abs(wave_operator_residual(1.0, w, x, 5e-4)))
    assert r1 < 1e-4
    assert 3.5 < r1 / r2 < 4.5


def test_wave_operator_refuses_stencil_on_ray():
    with pytest.raises(SingularRay):
        wave_operator_residual(1.0, ALONG_Z, [2, 0, 0, 1.999], 1e-3)


def test_sampled_retarded_time_matches_analytic(rng):
    ref = HelicalWorldline(rho=1.5, drift=0.3, t_min=-30, t_max=30)
    ts = np.linspace(-30, 30, 6001)
    w = SampledWorldline(ts, ref.position(ts))
    for x, s, *_ in _random_points(rng, ref, 20):
        assert abs(retarded_time(w, x) - s) < 1e-6
