"""Fixed-size Lorentzian algebra with metric diag(-1, 1, 1, 1).

Four-vectors are float64 arrays of shape (4,), ordered (t, x, y, z).
The field tensor is kept in its fully covariant form ``F_{mu nu}`` with

    F_{i0} = E_i,   F_{ij} = eps_{ijk} B_k,

which is the layout that makes ``q F^mu_nu v^nu`` equal to
``(q E.v, qE + q v x B)`` for ``v = (1, v)``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import PreconditionError

ETA = np.diag([-1.0, 1.0, 1.0, 1.0])
ETA.setflags(write=False)


def four(t: float, x: float, y: float, z: float) -> np.ndarray:
    return np.array([t, x, y, z], dtype=float)


def mdot(a, b) -> float:
    """Minkowski product -a0 b0 + a1 b1 + a2 b2 + a3 b3."""
    return float(-a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3])


def lower(v) -> np.ndarray:
    """Lower (or raise) the index of a 4-vector; the metric is its own inverse."""
    v = np.asarray(v, dtype=float)
    out = v.copy()
    out[..., 0] = -out[..., 0]
    return out


def is_null(v, tol: float = 1e-12) -> bool:
    v = np.asarray(v, dtype=float)
    scale = float(np.max(np.abs(v)))
    return abs(mdot(v, v)) <= tol * scale * scale


def cross(a, b) -> np.ndarray:
    return np.array(
        [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]],
        dtype=float,
    )


@dataclass(frozen=True)
class FieldEB:
    """Electric and magnetic 3-vectors at one spacetime point."""

    E: np.ndarray
    B: np.ndarray

    def __post_init__(self):
        E = np.array(self.E, dtype=float)
        B = np.array(self.B, dtype=float)
        if E.shape != (3,) or B.shape != (3,):
            raise PreconditionError("E and B must be 3-vectors")
        if not (np.all(np.isfinite(E)) and np.all(np.isfinite(B))):
            raise PreconditionError("field components must be finite")
        E.setflags(write=False)
        B.setflags(write=False)
        object.__setattr__(self, "E", E)
        object.__setattr__(self, "B", B)

    def __eq__(self, other):
        if not isinstance(other, FieldEB):
            return NotImplemented
        return bool(np.array_equal(self.E, other.E) and np.array_equal(self.B, other.B))

    __hash__ = None


@dataclass(frozen=True)
class EmTensor:
    """Antisymmetric field tensor, stored covariantly."""

    cov: np.ndarray

    def __post_init__(self):
        c = np.array(self.cov, dtype=float).reshape(4, 4)
        c.setflags(write=False)
        object.__setattr__(self, "cov", c)

    @classmethod
    def from_wedges(cls, pairs) -> "EmTensor":
        """Sum of coefficient * (a ^ b) over ``(coef, a, b)`` with contravariant a, b.

        Each term is written as ``t - t.T`` so antisymmetry holds bit for bit.
        """
        c = np.zeros((4, 4))
        for coef, a, b in pairs:
            la, lb = lower(a), lower(b)
            t = coef * np.outer(la, lb)
            c += t - t.T
        return cls(c)

    @property
    def mixed(self) -> np.ndarray:
        """F^mu_nu (first index raised)."""
        return ETA @ self.cov

    @property
    def contra(self) -> np.ndarray:
        """F^{mu nu}."""
        return ETA @ self.cov @ ETA

    def to_eb(self) -> FieldEB:
        c = self.cov
        return FieldEB(E=[c[1, 0], c[2, 0], c[3, 0]], B=[c[2, 3], c[3, 1], c[1, 2]])

    def __add__(self, other):
        return EmTensor(self.cov + other.cov)

    def __mul__(self, k):
        return EmTensor(self.cov * k)

    __rmul__ = __mul__


def em_tensor_from_eb(f: FieldEB) -> EmTensor:
    E, B = f.E, f.B
    c = np.zeros((4, 4))
    c[1:, 0] = E
    c[0, 1:] = -E
    c[1, 2], c[2, 1] = B[2], -B[2]
    c[2, 3], c[3, 2] = B[0], -B[0]
    c[3, 1], c[1, 3] = B[1], -B[1]
    return EmTensor(c)


def em_invariants(f: FieldEB) -> tuple[float, float]:
    """Return (B^2 - E^2, E.B)."""
    E, B = f.E, f.B
    return float(B @ B - E @ E), float(E @ B)


def lorentz_force(q: float, F: EmTensor, v) -> np.ndarray:
    """q F^mu_nu v^nu."""
    return q * (F.mixed @ np.asarray(v, dtype=float))


def maxwell_stress_energy(F: EmTensor) -> np.ndarray:
    """Symmetric T^{mu nu} = (f^{mu l} f^nu_l - eta^{mu nu} f.f / 4) / (4 pi)."""
    fc = F.contra
    # f^{mu l} f^{nu}_l = f^{mu l} eta_{l k} f^{nu k}
    t = fc @ ETA @ fc.T
    inv = float(np.sum(F.cov * fc))
    return (t - 0.25 * ETA * inv) / (4.0 * np.pi)


def maxwell_stress_energy_batch(cov: np.ndarray) -> np.ndarray:
    """Vectorised :func:`maxwell_stress_energy` over covariant tensors of shape (..., 4, 4)."""
    fc = ETA @ cov @ ETA
    t = fc @ ETA @ np.swapaxes(fc, -1, -2)
    inv = np.sum(cov * fc, axis=(-2, -1))
    return (t - 0.25 * ETA * inv[..., None, None]) / (4.0 * np.pi)


@dataclass(frozen=True)
class RotationToVelocity:
    omega: np.ndarray
    Omega: np.ndarray


def rotation_to_velocity(v, tol: float = 1e-9) -> RotationToVelocity:
    """Rotation Rz(phi_v) Ry(theta_v) taking the z axis onto the unit vector v.

    At the poles phi_v is taken as 0.
    """
    v = np.asarray(v, dtype=float)
    n = float(np.sqrt(v @ v))
    if abs(n - 1.0) > tol:
        raise PreconditionError(f"velocity must be a unit vector, |v| = {n!r}")
    rho = np.hypot(v[0], v[1])
    theta = np.arctan2(rho, v[2])
    phi = 0.0 if rho < 1e-12 else np.arctan2(v[1], v[0])
    ct, st = np.cos(theta), np.sin(theta)
    cp, sp = np.cos(phi), np.sin(phi)
    rz = np.array([[cp, -sp, 0.0], [sp, cp, 0.0], [0.0, 0.0, 1.0]])
    ry = np.array([[ct, 0.0, st], [0.0, 1.0, 0.0], [-st, 0.0, ct]])
    omega = rz @ ry
    Omega = np.eye(4)
    Omega[1:, 1:] = omega
    return RotationToVelocity(omega, Omega)
