"""Retarded time, Lienard-Wiechert potential and far field of a null worldline."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _pykernels
from ._backend import kernels
from .errors import AmbiguousRoot, NoIntersection, RadiusUnderflow, SingularRay
from .minkowski import ETA, EmTensor, lower, mdot
from .worldline import NullWorldline, SampledWorldline

NSCAN = 1024
DEFAULT_TOL = 1e-12
R_MIN = 1e-9


@dataclass(frozen=True)
class RetardedFrame:
    s: float
    r: float
    R: np.ndarray
    k: np.ndarray
    u: np.ndarray
    a: np.ndarray
    a_k: float


def _solve(w: NullWorldline, x, tol: float):
    """Return ``(status, s, r)`` without applying the r_min guard."""
    x = np.asarray(x, dtype=float)
    if isinstance(w, SampledWorldline):
        return kernels.hermite_retarded_time(w.t, w.z, w.dz, x, tol, NSCAN, 0.0)

    x0, xs = float(x[0]), x[1:]

    def g_vec(ss):
        d = xs - w.position(ss)
        return (x0 - ss) - np.sqrt(np.sum(d * d, axis=-1))

    def g(s):
        d = xs - w.position(s)
        return (x0 - s) - float(np.sqrt(d @ d))

    def dg(s):
        d = xs - w.position(s)
        n = float(np.sqrt(d @ d))
        if n == 0.0:
            return 0.0
        return -1.0 + float(d @ w.velocity(s)) / n

    status, s = _pykernels.solve_retarded(g_vec, g, dg, x0, w.t_min, w.t_max, NSCAN, tol)
    if status == _pykernels.SINGULAR_RAY:
        return status, s, 0.0
    if status != _pykernels.OK:
        return status, s, float("nan")
    R = x - np.concatenate(([s], w.position(s)))
    r = float(R[0] - R[1:] @ w.velocity(s))
    return status, s, r


def _raise_for(status, x):
    if status == _pykernels.NO_INTERSECTION:
        raise NoIntersection(f"past light cone of {list(x)} misses the worldline domain")
    if status == _pykernels.SINGULAR_RAY:
        raise SingularRay(f"{list(x)} lies on the forward tangent ray of the worldline")
    if status == _pykernels.AMBIGUOUS:
        raise AmbiguousRoot(f"two retarded roots within one scan step for {list(x)}")


def retarded_time(w: NullWorldline, x, tol: float = DEFAULT_TOL, r_min: float = R_MIN) -> float:
    """Latest s < x0 with (x0 - s)^2 = |x - z(s)|^2.

    Raises SingularRay when the retarded distance falls below
    ``r_min * (x0 - s)``.
    """
    status, s, r = _solve(w, x, tol)
    _raise_for(status, x)
    if not r > r_min * (float(x[0]) - s):
        raise SingularRay(f"retarded distance {r:.3g} below r_min at {list(x)}")
    return s


def frame_at(w: NullWorldline, s: float, x) -> RetardedFrame:
    """Kinematic packet for a known emission time s (no root solve)."""
    x = np.asarray(x, dtype=float)
    R = x - np.concatenate(([s], w.position(s)))
    v = w.velocity(s)
    u = np.concatenate(([1.0], v))
    a = np.concatenate(([0.0], w.acceleration(s)))
    r = -mdot(R, u)
    with np.errstate(divide="ignore", invalid="ignore"):
        k = R / r
        a_k = mdot(a, k)
    return RetardedFrame(s=float(s), r=r, R=R, k=k, u=u, a=a, a_k=a_k)


def retarded_frame(w: NullWorldline, x, tol: float = DEFAULT_TOL, r_min: float = R_MIN) -> RetardedFrame:
    s = retarded_time(w, x, tol, r_min)
    return frame_at(w, s, x)


def singular_ray_distance(w: NullWorldline, x, tol: float = DEFAULT_TOL) -> float:
    """Retarded distance r; 0.0 when x sits on a degenerate tangent ray."""
    status, s, r = _solve(w, x, tol)
    if status == _pykernels.SINGULAR_RAY:
        return max(r, 0.0)
    _raise_for(status, x)
    return r


def _guard(fr: RetardedFrame, r_min: float):
    if not fr.r >= r_min * fr.R[0]:
        raise RadiusUnderflow(f"retarded distance {fr.r:.3g} below r_min")


def lw_potential(q: float, fr: RetardedFrame, r_min: float = R_MIN) -> np.ndarray:
    """Contravariant A^alpha = q u^alpha / r."""
    _guard(fr, r_min)
    return q * fr.u / fr.r


def field_tensor(q: float, fr: RetardedFrame, r_min: float = R_MIN) -> EmTensor:
    """f = q (a ^ k + a_k u ^ k) / r."""
    _guard(fr, r_min)
    return EmTensor.from_wedges([(q / fr.r, fr.a, fr.k), (q * fr.a_k / fr.r, fr.u, fr.k)])


def analytic_derivatives(fr: RetardedFrame):
    """Gradients of s, r and k_alpha with respect to x^beta.

    Returns ``(ds, dr, dk)`` with ``ds[b] = d s / d x^b``, ``dr[b]`` likewise
    and ``dk[a, b] = d k_a / d x^b`` (k with lowered index).
    """
    kl, ul = lower(fr.k), lower(fr.u)
    ds = -kl
    dr = -ul + fr.r * fr.a_k * kl
    dk = (np.outer(ul, kl) + np.outer(kl, ul) + ETA) / fr.r - fr.a_k * np.outer(kl, kl)
    return ds, dr, dk


def wave_operator_residual(q: float, w: NullWorldline, x, h: float, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Central-difference estimate of box A^alpha at x (vanishes as O(h^2))."""
    x = np.asarray(x, dtype=float)
    if q == 0:
        return np.zeros(4)
    r = singular_ray_distance(w, x, tol)
    if r < 10.0 * h:
        raise SingularRay(f"stencil of width {h} touches the singular ray (r = {r:.3g})")

    def A(p):
        return lw_potential(q, retarded_frame(w, p, tol))

    a0 = A(x)
    out = np.zeros(4)
    for mu in range(4):
        e = np.zeros(4)
        e[mu] = h
        out += ETA[mu, mu] * (A(x + e) - 2.0 * a0 + A(x - e))
    return out / (h * h)
