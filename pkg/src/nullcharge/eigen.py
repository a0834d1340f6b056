"""Admissible motion of a massless charge in an external field.

A photon-like charge can only stay in the field if its null velocity
``(1, v)`` is an eigenvector of ``F^mu_nu``:

    e_dot = q E.v,     e_dot v = q E + q v x B.

Anything else accelerates the charge, which radiates without bound.
"""
from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import _pykernels as _py
from ._backend import kernels
from .errors import MultiplierVanished, PreconditionError, RadiationDivergence
from .minkowski import FieldEB

DEG_TOL = 1e-10

MAP_HEADER = ("x,y,z,Ex,Ey,Ez,Bx,By,Bz,class,capture,"
              "edot_plus,vpx,vpy,vpz,edot_minus,vmx,vmy,vmz")


class FieldClass(str, enum.Enum):
    ZeroField = "ZeroField"
    NullField = "NullField"
    PureE = "PureE"
    PureB = "PureB"
    OrthogonalSubMagnetic = "OrthogonalSubMagnetic"
    OrthogonalSuperElectric = "OrthogonalSuperElectric"
    Generic = "Generic"


_CLASS_BY_CODE = {
    _py.ZERO: FieldClass.ZeroField,
    _py.NULL: FieldClass.NullField,
    _py.PURE_E: FieldClass.PureE,
    _py.PURE_B: FieldClass.PureB,
    _py.SUB_MAGNETIC: FieldClass.OrthogonalSubMagnetic,
    _py.SUPER_ELECTRIC: FieldClass.OrthogonalSuperElectric,
    _py.GENERIC: FieldClass.Generic,
}


class InadmissibleState(PreconditionError):
    """Initial velocity is not an eigenvector of the local field."""


@dataclass(frozen=True)
class EigenSolution:
    roots: list
    velocities: list
    field_class: FieldClass
    capture: bool = False

    @property
    def unconstrained(self) -> bool:
        return self.field_class is FieldClass.ZeroField


def _solve(q, f: FieldEB, deg_tol):
    E, B = f.E, f.B
    return _py.solve_eigen(float(E[0]), float(E[1]), float(E[2]),
                           float(B[0]), float(B[1]), float(B[2]), float(q), float(deg_tol))


def classify_field(f: FieldEB, deg_tol: float = DEG_TOL) -> FieldClass:
    return _CLASS_BY_CODE[_solve(1.0, f, deg_tol)[0]]


def capture_surface_test(f: FieldEB, deg_tol: float = DEG_TOL) -> bool:
    """E.B = 0 and |E| < |B|, both beyond the relative tolerance."""
    return bool(_solve(1.0, f, deg_tol)[1])


def eigenvalue_roots(q: float, f: FieldEB, deg_tol: float = DEG_TOL) -> list:
    """Real roots of e^4 + e^2 q^2 (B^2 - E^2) - q^4 (E.B)^2 with multiplicities."""
    res = _solve(q, f, deg_tol)
    cls = res[0]
    if q == 0 or cls in (_py.ZERO, _py.NULL):
        return [(0.0, 4)]
    if cls in (_py.PURE_B, _py.SUB_MAGNETIC):
        return [(0.0, 2)]
    ep, em = res[3], res[7]
    lo, hi = min(ep, em), max(ep, em)
    if cls in (_py.PURE_E, _py.SUPER_ELECTRIC):
        return [(lo, 1), (0.0, 2), (hi, 1)]
    return [(lo, 1), (hi, 1)]


def admissible_velocities(q: float, f: FieldEB, deg_tol: float = DEG_TOL) -> EigenSolution:
    res = _solve(q, f, deg_tol)
    cls, capture, nvel = res[0], res[1], res[2]
    vels = []
    if nvel >= 1:
        vels.append((res[3], np.array(res[4:7])))
    if nvel == 2:
        vels.append((res[7], np.array(res[8:11])))
    return EigenSolution(
        roots=eigenvalue_roots(q, f, deg_tol),
        velocities=vels,
        field_class=_CLASS_BY_CODE[cls],
        capture=bool(capture),
    )


def quartic_residual(q: float, f: FieldEB, edot: float) -> float:
    E, B = f.E, f.B
    e2 = edot * edot
    return e2 * e2 + e2 * q * q * float(B @ B - E @ E) - q**4 * float(E @ B) ** 2


def balance_residuals(q: float, f: FieldEB, edot: float, v) -> tuple[float, np.ndarray]:
    """Residuals of e_dot = q E.v and e_dot v = q E + q v x B."""
    v = np.asarray(v, dtype=float)
    E, B = f.E, f.B
    return edot - q * float(E @ v), edot * v - q * E - q * np.cross(v, B)


def is_admissible(q: float, f: FieldEB, v, admis_tol: float) -> tuple[bool, float]:
    """Whether v is an eigen-direction of the local field, with e_dot = q E.v."""
    v = np.asarray(v, dtype=float)
    edot = q * float(f.E @ v)
    _, sp = balance_residuals(q, f, edot, v)
    res = float(np.linalg.norm(sp))
    scale = abs(q) * (float(np.linalg.norm(f.E)) + float(np.linalg.norm(f.B)))
    if scale == 0.0:
        return res == 0.0, 0.0
    return res <= admis_tol * scale, res / scale


# ------------------------------------------------------------------ propagation

@dataclass(frozen=True)
class ParticleState:
    z: np.ndarray
    v: np.ndarray
    e: float

    def __post_init__(self):
        z = np.array(self.z, dtype=float).reshape(4)
        v = np.array(self.v, dtype=float).reshape(3)
        if abs(float(np.linalg.norm(v)) - 1.0) > 1e-10:
            raise PreconditionError("particle direction must be a unit vector")
        if self.e == 0:
            raise PreconditionError("the multiplier e must be non-zero")
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "v", v)
        object.__setattr__(self, "e", float(self.e))

    @property
    def t(self) -> float:
        return float(self.z[0])

    @property
    def p(self) -> np.ndarray:
        return self.e * np.concatenate(([1.0], self.v))


def propagate(state0: ParticleState, field, t0: float, t1: float, dt: float,
              q: float = 1.0, admis_tol: float = 1e-9) -> list[ParticleState]:
    """Straight null motion with e(t) = e0 + q int E(z).v dt.

    ``field`` maps ``(t, x, y, z)`` to :class:`FieldEB`.  The direction is
    never corrected: if it stops being an eigen-direction the charge would
    have to accelerate, and :class:`RadiationDivergence` is raised.
    """
    if not (t1 > t0 and dt > 0):
        raise PreconditionError("need t1 > t0 and dt > 0")
    if state0.t != t0:
        raise PreconditionError(f"state0 is at t={state0.t}, expected t0={t0}")
    v = state0.v
    u = np.concatenate(([1.0], v))
    z0 = state0.z

    def zat(t):
        return z0 + (t - t0) * u

    def rate(t):
        p = zat(t)
        return q * float(field(*p).E @ v)

    ok, res = is_admissible(q, field(*z0), v, admis_tol)
    if not ok:
        raise InadmissibleState(f"initial direction is not admissible (residual {res:.3g})")

    n = max(1, int(math.ceil((t1 - t0) / dt - 1e-9)))
    h = (t1 - t0) / n
    states = [state0]
    e, comp = state0.e, 0.0
    for i in range(n):
        ta = t0 + i * h
        tb = t0 + (i + 1) * h if i + 1 < n else t1
        hh = tb - ta
        k1, k2, k4 = rate(ta), rate(ta + 0.5 * hh), rate(tb)
        # RK4 with no e-dependence in the rate; Kahan-compensated accumulation
        inc = hh / 6.0 * (k1 + 4.0 * k2 + k4) - comp
        e_new = e + inc
        comp = (e_new - e) - inc
        zb = zat(tb)
        ok, res = is_admissible(q, field(*zb), v, admis_tol)
        if not ok:
            raise RadiationDivergence(
                f"direction stops being admissible at t={tb:.17g} (residual {res:.3g})",
                t=tb, states=states)
        if e_new == 0.0 or (e_new > 0.0) != (e > 0.0):
            raise MultiplierVanished(f"multiplier e crosses zero before t={tb:.17g}",
                                     t=tb, states=states)
        e = e_new
        states.append(ParticleState(zb, v, e))
    return states


# ------------------------------------------------------------------ grid maps

@dataclass(frozen=True)
class MapRecord:
    point: np.ndarray
    field: FieldEB
    field_class: FieldClass
    capture: bool
    edot: np.ndarray  # (plus, minus); NaN where absent
    vel: np.ndarray  # (2, 3); NaN where absent
    nvel: int = 0

    @property
    def unconstrained(self) -> bool:
        return self.field_class is FieldClass.ZeroField


def _threads(threads):
    import os

    if threads is None:
        env = os.environ.get("NULLCHARGE_THREADS", "0")
        try:
            threads = int(env)
        except ValueError:
            threads = 0
    if threads <= 0:
        threads = os.cpu_count() or 1
    return threads


def velocity_map(field, grid, t: float = 0.0, q: float = 1.0, deg_tol: float = DEG_TOL,
                 threads: int | None = None) -> list[MapRecord]:
    """Classify the field and solve for admissible velocities at every grid point.

    Points are processed in chunks that may run concurrently; the output
    order always equals the input order.
    """
    pts = np.asarray(grid, dtype=float).reshape(-1, 3)
    fields = [field(t, *p) for p in pts]
    E = np.array([f.E for f in fields]).reshape(-1, 3)
    B = np.array([f.B for f in fields]).reshape(-1, 3)
    nthreads = _threads(threads)
    n = len(pts)
    if nthreads > 1 and n >= 4096:
        bounds = np.linspace(0, n, nthreads + 1).astype(int)
        chunks = [(lo, hi) for lo, hi in zip(bounds[:-1], bounds[1:]) if hi > lo]
        with ThreadPoolExecutor(max_workers=nthreads) as ex:
            parts = list(ex.map(lambda c: kernels.eigen_batch(E[c[0]:c[1]], B[c[0]:c[1]],
                                                               q, deg_tol), chunks))
        cls, cap, nvel, edot, vel = (np.concatenate([p[j] for p in parts]) for j in range(5))
    else:
        cls, cap, nvel, edot, vel = kernels.eigen_batch(E, B, q, deg_tol)
    return [
        MapRecord(point=pts[i], field=fields[i], field_class=_CLASS_BY_CODE[int(cls[i])],
                  capture=bool(cap[i]), edot=edot[i], vel=vel[i], nvel=int(nvel[i]))
        for i in range(n)
    ]
