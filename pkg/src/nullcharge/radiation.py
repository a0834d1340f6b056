"""Radiated energy-momentum and angular momentum of a photon-like charge.

The angular integrals that multiply the worldline integrals diverge at the
forward direction theta -> 0.  Every flux here takes an explicit polar cutoff
``epsilon`` and reports the cutoff factors exactly, so the divergence rate is
visible instead of regularised away.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._backend import kernels
from .errors import PreconditionError, QuadratureError, RadiusUnderflow
from .minkowski import ETA, mdot, maxwell_stress_energy_batch, rotation_to_velocity
from .retarded import R_MIN, RetardedFrame
from .worldline import NullWorldline, SampledWorldline


@dataclass(frozen=True)
class CutoffFactors:
    epsilon: float
    I0: float
    I1: float


@dataclass(frozen=True)
class FluxResult:
    p_em: np.ndarray
    M_em: np.ndarray
    epsilon: float
    t: float


def stress_energy(q: float, fr: RetardedFrame, r_min: float = R_MIN) -> np.ndarray:
    """Radiative T^{ab} = q^2 a^2 k^a k^b / (4 pi r^2)."""
    if not fr.r >= r_min * fr.R[0]:
        raise RadiusUnderflow(f"retarded distance {fr.r:.3g} below r_min")
    a2 = mdot(fr.a, fr.a)
    return (q * q * a2 / (4.0 * np.pi * fr.r * fr.r)) * np.outer(fr.k, fr.k)


def curvilinear_to_cartesian(w: NullWorldline, t: float, s: float, theta: float, phi: float):
    """Point on the wavefront emitted at s, seen on the hyperplane x0 = t.

    Returns ``(x, sqrt_g)`` with ``sqrt_g = (t - s)^2 sin(theta) (1 - cos(theta))``.
    """
    if not s < t:
        raise PreconditionError("need s < t")
    rot = rotation_to_velocity(w.velocity(s))
    st = math.sin(theta)
    n = np.array([1.0, st * math.cos(phi), st * math.sin(phi), math.cos(theta)])
    x = np.concatenate(([s], w.position(s))) + (t - s) * (rot.Omega @ n)
    return x, (t - s) ** 2 * st * (1.0 - math.cos(theta))


def _one_minus_cos(eps):
    h = math.sin(0.5 * eps)
    return 2.0 * h * h


def _check_eps(epsilon):
    if not (0.0 < epsilon <= math.pi):
        raise PreconditionError(f"cutoff epsilon must lie in (0, pi], got {epsilon!r}")


def cutoff_factors(epsilon: float) -> CutoffFactors:
    """Closed-form I0, I1 on [epsilon, pi]."""
    _check_eps(epsilon)
    u = _one_minus_cos(epsilon)
    inv = 1.0 / u
    return CutoffFactors(
        epsilon=epsilon,
        I0=0.5 * inv * inv - 0.125,
        I1=0.375 - inv + 0.5 * inv * inv,
    )


def cutoff_factors_quadrature(epsilon: float, tol: float = 1e-10) -> CutoffFactors:
    """Adaptive Simpson of the two angular integrands; independent of the closed form."""
    _check_eps(epsilon)
    vals = []
    for which in (0, 1):
        v, _, _, ok = kernels.simpson_cutoff(which, float(epsilon), math.pi, float(tol), 60)
        if not ok:
            raise QuadratureError(f"cutoff quadrature did not reach tol={tol} at eps={epsilon}")
        vals.append(v)
    return CutoffFactors(epsilon=epsilon, I0=vals[0], I1=vals[1])


# ------------------------------------------------------------ worldline integrals

def adaptive_simpson(f, a: float, b: float, rel_tol: float = 1e-10, abs_tol: float = 1e-13,
                     max_depth: int = 50, max_panels: int = 200_000,
                     breakpoints=None) -> np.ndarray:
    """Vector-valued adaptive Simpson on [a, b].

    ``f`` maps an array of shape (m,) to shape (m, k).  A panel is accepted
    once the Richardson error estimate is below
    ``15 * max(abs_tol * width / (b - a), rel_tol * |panel integral of |f||)``
    componentwise.  QuadratureError is raised past ``max_depth`` bisections
    or ``max_panels`` panel evaluations.  Interior ``breakpoints`` (where
    ``f`` may be non-smooth) become edges of the initial panels.
    """
    if b == a:
        return np.zeros(np.asarray(f(np.array([a]))).shape[-1])
    span = b - a
    edges = np.array([a, b])
    if breakpoints is not None:
        bp = np.asarray(breakpoints, dtype=float)
        edges = np.concatenate(([a], bp[(bp > a) & (bp < b)], [b]))
    lo_e, hi_e = edges[:-1], edges[1:]
    fl = np.asarray(f(lo_e), dtype=float)
    fm = np.asarray(f(0.5 * (lo_e + hi_e)), dtype=float)
    # right ends are taken as left limits so each panel sees a single smooth piece
    fr = np.asarray(f(np.nextafter(hi_e, lo_e)), dtype=float) if breakpoints is not None else \
        np.asarray(f(hi_e), dtype=float)
    stack = [(lo_e[i], hi_e[i], fl[i], fm[i], fr[i],
              (hi_e[i] - lo_e[i]) / 6.0 * (fl[i] + 4.0 * fm[i] + fr[i]), 0)
             for i in range(len(lo_e) - 1, -1, -1)]
    total = np.zeros_like(fl[0])
    panels = 0
    while stack:
        panels += 1
        if panels > max_panels:
            raise QuadratureError(f"worldline quadrature exceeded {max_panels} panels")
        lo, hi, flo, fmid, fhi, whole, depth = stack.pop()
        m = 0.5 * (lo + hi)
        flm, frm = np.asarray(f(np.array([0.5 * (lo + m), 0.5 * (m + hi)])), dtype=float)
        wl, wr = (m - lo) / 6.0, (hi - m) / 6.0
        left = wl * (flo + 4.0 * flm + fmid)
        right = wr * (fmid + 4.0 * frm + fhi)
        err = left + right - whole
        absint = wl * (np.abs(flo) + 4 * np.abs(flm) + np.abs(fmid)) + wr * (
            np.abs(fmid) + 4 * np.abs(frm) + np.abs(fhi))
        bound = 15.0 * np.maximum(abs_tol * (hi - lo) / span, rel_tol * absint)
        if np.all(np.abs(err) <= bound):
            total += left + right + err / 15.0
        elif depth >= max_depth:
            raise QuadratureError(f"worldline quadrature not converged near s={float(m)!r}")
        else:
            stack.append((m, hi, fmid, frm, fhi, right, depth + 1))
            stack.append((lo, m, flo, flm, fmid, left, depth + 1))
    return total


def _moments(w: NullWorldline, t: float, quad_tol: float) -> np.ndarray:
    """Integrals over [t_min, t] of a^2 times (1, v, s v, z, z^i v^j - z^j v^i)."""
    if not w.t_min <= t <= w.t_max:
        raise PreconditionError(f"t={t} outside worldline domain [{w.t_min}, {w.t_max}]")

    def f(s):
        z, v, a = w.position(s), w.velocity(s), w.acceleration(s)
        a2 = np.sum(a * a, axis=-1)[:, None]
        ang = np.stack([z[:, 0] * v[:, 1] - z[:, 1] * v[:, 0],
                        z[:, 0] * v[:, 2] - z[:, 2] * v[:, 0],
                        z[:, 1] * v[:, 2] - z[:, 2] * v[:, 1]], axis=-1)
        return a2 * np.concatenate([np.ones_like(s)[:, None], v, s[:, None] * v, z, ang], axis=-1)

    # sampled worldlines are only C1 at their nodes, so integrate node to node
    nodes = w.t if isinstance(w, SampledWorldline) else None
    return adaptive_simpson(f, w.t_min, t, rel_tol=quad_tol, breakpoints=nodes)


def _assemble_M(cf: CutoffFactors, mom: np.ndarray, q: float) -> np.ndarray:
    c = 0.5 * q * q
    M = np.zeros((4, 4))
    M[0, 1:] = c * cf.I1 * mom[4:7] - c * cf.I0 * mom[7:10]
    M[1, 2], M[1, 3], M[2, 3] = c * cf.I1 * mom[10:13]
    return M - M.T


def radiated_momentum(q: float, w: NullWorldline, t: float, epsilon: float,
                      quad_tol: float = 1e-10) -> np.ndarray:
    cf = cutoff_factors(epsilon)
    mom = _moments(w, t, quad_tol)
    c = 0.5 * q * q
    return np.concatenate(([c * cf.I0 * mom[0]], c * cf.I1 * mom[1:4]))


def radiated_angular_momentum(q: float, w: NullWorldline, t: float, epsilon: float,
                              quad_tol: float = 1e-10) -> np.ndarray:
    cf = cutoff_factors(epsilon)
    return _assemble_M(cf, _moments(w, t, quad_tol), q)


def radiated_flux(q: float, w: NullWorldline, t: float, epsilon: float,
                  quad_tol: float = 1e-10) -> FluxResult:
    """Energy-momentum and angular momentum from one shared worldline quadrature."""
    cf = cutoff_factors(epsilon)
    mom = _moments(w, t, quad_tol)
    c = 0.5 * q * q
    p = np.concatenate(([c * cf.I0 * mom[0]], c * cf.I1 * mom[1:4]))
    return FluxResult(p_em=p, M_em=_assemble_M(cf, mom, q), epsilon=epsilon, t=t)


# ------------------------------------------------------------ full angular check

def _gauss_panels(edges, n):
    x, wt = np.polynomial.legendre.leggauss(n)
    nodes, weights = [], []
    for lo, hi in zip(edges[:-1], edges[1:]):
        nodes.append(0.5 * (hi - lo) * x + 0.5 * (hi + lo))
        weights.append(0.5 * (hi - lo) * wt)
    return np.concatenate(nodes), np.concatenate(weights)


def angular_flux_quadrature(q: float, w: NullWorldline, t: float, epsilon: float,
                            n_theta_panels: int = 6, n_phi: int = 32, gauss: int = 16,
                            s_panel: float = 0.5) -> FluxResult:
    """Brute-force flux through the hyperplane x0 = t.

    Integrates T^{0mu} sqrt(-g) and the angular-momentum density over
    (s, theta, phi) on the wavefront chart, with T built from the far field
    through the Maxwell stress tensor.  Shares no code with the factored
    ``I0``/``I1`` path.
    """
    _check_eps(epsilon)
    if epsilon < math.pi:
        th_edges = epsilon * (math.pi / epsilon) ** np.linspace(0.0, 1.0, n_theta_panels + 1)
        th, wth = _gauss_panels(th_edges, gauss)
    else:
        th, wth = np.array([math.pi]), np.array([0.0])
    ph = 2.0 * np.pi * np.arange(n_phi) / n_phi
    wph = np.full(n_phi, 2.0 * np.pi / n_phi)
    n_s = max(1, int(math.ceil((t - w.t_min) / s_panel)))
    ss, ws = _gauss_panels(np.linspace(w.t_min, t, n_s + 1), gauss)

    TH, PH = np.meshgrid(th, ph, indexing="ij")
    W2 = np.outer(wth, wph)
    st = np.sin(TH)
    nvec = np.stack([np.ones_like(TH), st * np.cos(PH), st * np.sin(PH), np.cos(TH)], axis=-1)
    sqrt_g_ang = st * (1.0 - np.cos(TH))

    p = np.zeros(4)
    M = np.zeros((4, 4))
    for s, wsi in zip(ss, ws):
        v = w.velocity(s)
        acc = w.acceleration(s)
        z = np.concatenate(([s], w.position(s)))
        Om = rotation_to_velocity(v).Omega
        R = (t - s) * nvec @ Om.T
        x = z + R
        u = np.concatenate(([1.0], v))
        a = np.concatenate(([0.0], acc))
        r = -(R @ (ETA @ u))
        k = R / r[..., None]
        ak = k @ (ETA @ a)
        kl = k * np.diag(ETA)
        al, ul = ETA @ a, ETA @ u
        c1 = (q / r)[..., None, None]
        c2 = (q * ak / r)[..., None, None]
        t1 = c1 * (al[None, None, :, None] * kl[..., None, :])
        t2 = c2 * (ul[None, None, :, None] * kl[..., None, :])
        fcov = (t1 - np.swapaxes(t1, -1, -2)) + (t2 - np.swapaxes(t2, -1, -2))
        T = maxwell_stress_energy_batch(fcov)
        T0 = T[..., 0, :]
        jac = (t - s) ** 2 * sqrt_g_ang
        wgt = (W2 * jac * wsi)[..., None]
        p += np.sum(wgt * T0, axis=(0, 1))
        dens = x[..., :, None] * T0[..., None, :]
        M += np.sum(wgt[..., None] * (dens - np.swapaxes(dens, -1, -2)), axis=(0, 1))
    return FluxResult(p_em=p, M_em=M, epsilon=epsilon, t=t)
