import math

import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy.integrate import quad

from nullcharge.errors import PreconditionError, QuadratureError
from nullcharge.minkowski import ETA, maxwell_stress_energy
from nullcharge.radiation import (adaptive_simpson, angular_flux_quadrature, cutoff_factors,
                                  cutoff_factors_quadrature, curvilinear_to_cartesian,
                                  radiated_angular_momentum, radiated_flux, radiated_momentum,
                                  stress_energy)
from nullcharge.retarded import field_tensor, frame_at, retarded_frame, retarded_time
from nullcharge.worldline import HelicalWorldline, StraightWorldline, circular

TWO_PI = 2 * math.pi
# frozen from the closed forms above: p0 = (1/2)(3/8)(2 pi), M^12 = M^01 = (1/2)(-1/8)(2 pi)
CIRCLE_P0 = 3 * math.pi / 8
CIRCLE_M12 = -math.pi / 8


def scipy_cutoff(eps):
    """Independent oracle: scipy adaptive quadrature of the angular integrands."""
    pts = np.geomspace(eps, math.pi, 12)
    f0 = lambda t: math.sin(t) / (1 - math.cos(t)) ** 3
    f1 = lambda t: math.sin(t) * math.cos(t) / (1 - math.cos(t)) ** 3
    out = []
    for f in (f0, f1):
        out.append(sum(quad(f, a, b, epsabs=0, epsrel=1e-13, limit=200)[0]
                       for a, b in zip(pts[:-1], pts[1:])))
    return out


@pytest.mark.parametrize("eps", [0.01, 0.1, 0.5, math.pi / 2, 2.5])
def test_cutoff_closed_form_vs_scipy(eps):
    cf = cutoff_factors(eps)
    I0, I1 = scipy_cutoff(eps)
    assert_allclose([cf.I0, cf.I1], [I0, I1], rtol=1e-10)


@pytest.mark.parametrize("eps, rtol", [(0.01, 1e-6), (0.1, 1e-8), (0.5, 1e-8),
                                       (math.pi / 2, 1e-8), (math.pi, 0)])
def test_cutoff_closed_form_vs_simpson(eps, rtol):
    a, b = cutoff_factors(eps), cutoff_factors_quadrature(eps)
    assert_allclose([b.I0, b.I1], [a.I0, a.I1], rtol=rtol, atol=1e-14)


def test_cutoff_examples():
    cf = cutoff_factors(math.pi)
    assert cf.I0 == 0.0 and cf.I1 == 0.0
    cf = cutoff_factors(math.pi / 2)
    assert abs(cf.I0 - 3 / 8) < 1e-15 and abs(cf.I1 + 1 / 8) < 1e-15
    assert 1.98 <= cutoff_factors(1e-3).I0 * 1e-12 <= 2.02


def test_divergence_rate():
    eps = 1e-3
    r0 = cutoff_factors(eps / 2).I0 / cutoff_factors(eps).I0
    r1 = cutoff_factors(eps / 2).I1 / cutoff_factors(eps).I1
    assert abs(r0 - 16) < 0.16 and abs(r1 - 16) < 0.16
    eps_grid = np.linspace(0.01, 3.0, 50)
    assert all(cutoff_factors(e).I0 > 0 for e in eps_grid)


@pytest.mark.parametrize("eps", [0.0, -0.1, 3.5, float("nan")])
def test_cutoff_rejects_bad_eps(eps):
    with pytest.raises(PreconditionError):
        cutoff_factors(eps)


def test_adaptive_simpson():
    val = adaptive_simpson(lambda s: np.stack([np.sin(s), s**2], axis=-1), 0.0, math.pi)
    assert_allclose(val, [2.0, math.pi**3 / 3], rtol=1e-10)
    with pytest.raises(QuadratureError):
        adaptive_simpson(lambda s: np.sin(1 / (s + 1e-9))[:, None], 0.0, 1.0, max_depth=4)


def test_stress_energy_properties(rng):
    w = HelicalWorldline(rho=0.8, drift=0.5)
    for _ in range(20):
        x, _ = curvilinear_to_cartesian(w, 3.0, rng.uniform(-2, 2), rng.uniform(0.3, 3.0),
                                        rng.uniform(0, TWO_PI))
        fr = retarded_frame(w, x)
        T = stress_energy(1.3, fr)
        scale = np.max(np.abs(T))
        assert abs(np.trace(ETA @ T)) <= 1e-13 * scale
        assert np.max(np.abs(T @ ETA @ fr.k)) <= 1e-12 * scale * np.max(np.abs(fr.k))
        assert_allclose(maxwell_stress_energy(field_tensor(1.3, fr)), T, rtol=1e-10,
                        atol=1e-10 * scale)
    fr = retarded_frame(StraightWorldline(), [2, 1, 0, 0])
    assert not np.any(stress_energy(1.0, fr))


def test_stress_energy_curvilinear_form():
    w = circular(1.0)
    t, s, th = 4.0, 1.0, 0.9
    x, sqrt_g = curvilinear_to_cartesian(w, t, s, th, 0.4)
    T = stress_energy(1.0, frame_at(w, s, x))
    assert_allclose(T[0, 0], 1.0 / (4 * math.pi * (t - s) ** 2 * (1 - math.cos(th)) ** 4),
                    rtol=1e-12)
    assert_allclose(sqrt_g, (t - s) ** 2 * math.sin(th) * (1 - math.cos(th)), rtol=1e-15)


def test_curvilinear_examples(rng):
    w = circular(1.0)
    _, sqrt_g = curvilinear_to_cartesian(w, 5.0, 2.0, math.pi / 2, 1.0)
    assert abs(sqrt_g - 9.0) < 1e-12
    x, _ = curvilinear_to_cartesian(w, 5.0, 2.0, 0.0, 1.0)
    assert abs(frame_at(w, 2.0, x).r) < 1e-14
    for _ in range(50):
        s = rng.uniform(-5, 5)
        t = s + rng.uniform(0.1, 5)
        x, _ = curvilinear_to_cartesian(w, t, s, rng.uniform(0.01, math.pi), rng.uniform(0, TWO_PI))
        assert abs(retarded_time(w, x) - s) <= 1e-9


def test_straight_worldline_radiates_nothing():
    res = radiated_flux(1.0, StraightWorldline(t_min=0, t_max=5), 5.0, 0.3)
    assert not np.any(res.p_em) and not np.any(res.M_em)


def test_circle_frozen_values():
    w = circular(1.0, t_min=0.0, t_max=TWO_PI)
    res = radiated_flux(1.0, w, TWO_PI, math.pi / 2)
    assert_allclose(res.p_em, [CIRCLE_P0, 0, 0, 0], atol=1e-9)
    assert_allclose(res.M_em[1, 2], CIRCLE_M12, rtol=1e-9)
    assert_allclose(res.M_em[0, 1], CIRCLE_M12, rtol=1e-9)
    assert np.array_equal(res.M_em, -res.M_em.T)
    assert_allclose(radiated_momentum(1.0, w, TWO_PI, math.pi / 2), res.p_em, rtol=0)
    assert_allclose(radiated_angular_momentum(1.0, w, TWO_PI, math.pi / 2), res.M_em, rtol=0)
    half = radiated_momentum(1.0, w, TWO_PI, math.pi / 4)
    assert_allclose(half[0] / res.p_em[0],
                    cutoff_factors(math.pi / 4).I0 / cutoff_factors(math.pi / 2).I0, rtol=1e-12)


def test_radiated_momentum_additive():
    full = radiated_momentum(0.7, HelicalWorldline(rho=1.1, drift=0.3, t_min=-2, t_max=6), 6.0, 0.4)
    a = radiated_momentum(0.7, HelicalWorldline(rho=1.1, drift=0.3, t_min=-2, t_max=6), 1.5, 0.4)
    b = radiated_momentum(0.7, HelicalWorldline(rho=1.1, drift=0.3, t_min=1.5, t_max=6), 6.0, 0.4)
    assert_allclose(a + b, full, rtol=1e-9, atol=1e-12)


def test_charge_scaling():
    w = HelicalWorldline(rho=1.1, drift=0.3, t_min=0, t_max=3)
    a, b = radiated_flux(1.0, w, 3.0, 0.5), radiated_flux(-2.0, w, 3.0, 0.5)
    assert_allclose(b.p_em, 4 * a.p_em, rtol=1e-15)
    assert_allclose(b.M_em, 4 * a.M_em, rtol=1e-15)


def test_angular_quadrature_agrees_with_factored_form_on_helix():
    w = HelicalWorldline(rho=1.2, drift=0.5, center=(0.3, -0.2, 0.1), t_min=0.0, t_max=3.0)
    fac = radiated_flux(1.0, w, 3.0, 0.6)
    brute = angular_flux_quadrature(1.0, w, 3.0, 0.6)
    scale = np.max(np.abs(fac.p_em))
    assert np.max(np.abs(brute.p_em - fac.p_em)) <= 1e-6 * scale
    assert np.max(np.abs(brute.M_em - fac.M_em)) <= 1e-6 * np.max(np.abs(fac.M_em))


def test_outside_domain():
    with pytest.raises(PreconditionError):
        radiated_momentum(1.0, circular(1.0, t_min=0, t_max=1), 2.0, 0.5)
