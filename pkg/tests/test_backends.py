import math
import os
import subprocess
import sys

import numpy as np
import pytest

from nullcharge import _backend, _pykernels
from nullcharge.worldline import HelicalWorldline, SampledWorldline

BACKENDS = _backend.available()


@pytest.fixture(params=sorted(BACKENDS))
def kernels(request):
    return BACKENDS[request.param]


def _fields(rng, n=2000):
    E = rng.normal(size=(n, 3))
    B = rng.normal(size=(n, 3))
    # sprinkle the degenerate branches in
    B[::7] = 0.0
    E[1::7] = 0.0
    E[2::7] = np.cross(B[2::7], rng.normal(size=(len(B[2::7]), 3)))
    E[3::7] = B[3::7]
    B[4::7] = np.cross(E[4::7], rng.normal(size=(len(E[4::7]), 3)))
    B[4::7] *= (np.linalg.norm(E[4::7], axis=1) / np.linalg.norm(B[4::7], axis=1))[:, None]
    return E, B


def test_eigen_batch_matches_scalar_reference(kernels, rng):
    E, B = _fields(rng)
    cls, cap, nvel, edot, vel = kernels.eigen_batch(E, B, 1.3, 1e-10)
    for i in range(0, len(E), 37):
        ref = _pykernels.solve_eigen(*E[i], *B[i], 1.3, 1e-10)
        assert (cls[i], cap[i], nvel[i]) == ref[:3]
        np.testing.assert_array_equal(edot[i], [ref[3], ref[7]])
        np.testing.assert_array_equal(vel[i], [ref[4:7], ref[8:11]])


def test_eigen_batch_identical_across_backends(rng):
    E, B = _fields(rng)
    outs = [k.eigen_batch(E, B, -0.7, 1e-10) for k in BACKENDS.values()]
    for a, b in zip(outs, outs[1:]):
        for x, y in zip(a, b):
            np.testing.assert_array_equal(x, y)


@pytest.mark.parametrize("which", [0, 1])
@pytest.mark.parametrize("eps", [1e-3, 0.01, 0.5, math.pi / 2])
def test_simpson_cutoff_identical(which, eps):
    outs = [k.simpson_cutoff(which, eps, math.pi, 1e-11, 60) for k in BACKENDS.values()]
    assert all(o == outs[0] for o in outs)
    assert outs[0][3]


def test_hermite_retarded_time_identical(rng):
    ref = HelicalWorldline(rho=1.2, drift=0.3, t_min=-10, t_max=10)
    ts = np.linspace(-10, 10, 401)
    w = SampledWorldline(ts, ref.position(ts))
    for _ in range(10):
        x = np.array([rng.uniform(0, 8), *rng.uniform(-2, 2, 3)])
        outs = [k.hermite_retarded_time(w.t, w.z, w.dz, x, 1e-12, 1024, 0.0)
                for k in BACKENDS.values()]
        assert all(o == outs[0] for o in outs)


def test_environment_forces_python_backend():
    env = dict(os.environ, NULLCHARGE_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "import nullcharge; print(nullcharge.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
