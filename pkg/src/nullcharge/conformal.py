"""Dilatations and special conformal transformations.

The special conformal map is

    x' = (x - b (x.x)) / D,     D = 1 - 2 (x.b) + (x.x)(b.b),

with Jacobian ``Omega = D^-1 lam(x'') lam(x)``, ``x'' = x/(x.x) - b`` and
``lam(y) = I - 2 y y_lower^T / (y.y)``.  Fields transform as covariant
2-tensors, velocities with ``Omega`` and the multiplier with ``D^2``.

A combined transformation applies the special conformal map first and then
the dilatation, so its Jacobian is ``e^theta Omega`` with effective factor
``D_eff = D e^-theta``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .eigen import DEG_TOL, admissible_velocities, is_admissible
from .errors import DegenerateD, LightConePoint, PreconditionError
from .minkowski import ETA, EmTensor, FieldEB, em_tensor_from_eb, mdot

D_MIN = 1e-14
CONE_TOL = 1e-12


@dataclass(frozen=True)
class ConformalParams:
    theta_dil: float = 0.0
    b: np.ndarray = None

    def __post_init__(self):
        b = np.zeros(4) if self.b is None else np.array(self.b, dtype=float).reshape(4)
        if not (np.all(np.isfinite(b)) and math.isfinite(self.theta_dil)):
            raise PreconditionError("conformal parameters must be finite")
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "theta_dil", float(self.theta_dil))

    @property
    def is_identity(self) -> bool:
        return self.theta_dil == 0.0 and not np.any(self.b)


@dataclass(frozen=True)
class ConformalJacobian:
    Omega: np.ndarray
    D: float

    def inverse(self) -> np.ndarray:
        """Omega^-1 = D^2 eta Omega^T eta, from the metric identity."""
        return self.D**2 * (ETA @ self.Omega.T @ ETA)

    def metric_defect(self) -> float:
        """Frobenius norm of Omega^T eta Omega - D^-2 eta."""
        return float(np.linalg.norm(self.Omega.T @ ETA @ self.Omega - ETA / self.D**2))


def dilate(x, theta: float) -> np.ndarray:
    return math.exp(theta) * np.asarray(x, dtype=float)


def _conformal_factor(x, b):
    D = 1.0 - 2.0 * mdot(x, b) + mdot(x, x) * mdot(b, b)
    if abs(D) < D_MIN:
        raise DegenerateD(f"conformal factor D={D:.3g} vanishes")
    return D


def special_conformal(x, b) -> tuple[np.ndarray, float]:
    x = np.asarray(x, dtype=float)
    b = np.asarray(b, dtype=float)
    D = _conformal_factor(x, b)
    return (x - b * mdot(x, x)) / D, D


def _reflection(y):
    yy = mdot(y, y)
    if not abs(yy) > CONE_TOL * float(y @ y):
        raise LightConePoint(f"{list(y)} lies on the light cone")
    return np.eye(4) - 2.0 * np.outer(y, ETA @ y) / yy


def conformal_jacobian(x, b) -> ConformalJacobian:
    """Omega^mu_alpha = d x'^mu / d x^alpha in factored form."""
    x = np.asarray(x, dtype=float)
    b = np.asarray(b, dtype=float)
    D = _conformal_factor(x, b)
    lam_x = _reflection(x)
    xpp = x / mdot(x, x) - b
    lam_xpp = _reflection(xpp)
    return ConformalJacobian(Omega=(lam_xpp @ lam_x) / D, D=D)


def combined_jacobian(x, params: ConformalParams) -> ConformalJacobian:
    """Special conformal map followed by a dilatation."""
    if not np.any(params.b):
        jac = ConformalJacobian(Omega=np.eye(4), D=1.0)
    else:
        jac = conformal_jacobian(x, params.b)
    if params.theta_dil == 0.0:
        return jac
    g = math.exp(params.theta_dil)
    return ConformalJacobian(Omega=g * jac.Omega, D=jac.D / g)


def transform_point(x, params: ConformalParams) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if np.any(params.b):
        x, _ = special_conformal(x, params.b)
    return dilate(x, params.theta_dil)


def transform_field(F: EmTensor, j) -> EmTensor:
    """F' with F_ab = F'_mn Omega^m_a Omega^n_b.

    ``j`` is a :class:`ConformalJacobian` or a dilatation parameter theta,
    for which ``F' = e^-2theta F``.
    """
    if not isinstance(j, ConformalJacobian):
        return EmTensor(math.exp(-2.0 * float(j)) * F.cov)
    inv = j.inverse()
    return _antisym(inv.T @ F.cov @ inv)


def pullback_field(Fp: EmTensor, j: ConformalJacobian) -> EmTensor:
    """Inverse of :func:`transform_field`: F_ab = F'_mn Omega^m_a Omega^n_b."""
    return _antisym(j.Omega.T @ Fp.cov @ j.Omega)


def _antisym(m):
    return EmTensor(0.5 * (m - m.T))


# ------------------------------------------------------------------ equation of motion

def _admissible_pair(q, f: FieldEB, deg_tol):
    sol = admissible_velocities(q, f, deg_tol)
    if sol.velocities:
        return sol.velocities[0]
    return 0.0, np.array([0.0, 0.0, 1.0])


def _lorentz_residual(q, F: EmTensor, edot, zdot):
    return edot * zdot - q * (F.mixed @ zdot)


@dataclass(frozen=True)
class InvarianceReport:
    covariance: float
    transformed: float
    original: float


def eom_invariance_report(q: float, f: FieldEB, x, params: ConformalParams,
                          deg_tol: float = DEG_TOL, admis_tol: float = 1e-9) -> InvarianceReport:
    """Residuals of the Lorentz eigen-equation before and after the transformation.

    With ``R = e_dot z_dot - q F z_dot`` the transformed data satisfy
    ``R' = D^2 Omega R``.  ``covariance`` is ``|R' - D^2 Omega R| / scale``;
    ``transformed`` is ``|R'| / scale`` and ``original`` is ``|R| / scale``.
    """
    edot, v = _admissible_pair(q, f, deg_tol)
    ok, res = is_admissible(q, f, v, admis_tol)
    if not ok:
        raise PreconditionError(f"velocity is not admissible (residual {res:.3g})")
    F = em_tensor_from_eb(f)
    zdot = np.concatenate(([1.0], v))
    R = _lorentz_residual(q, F, edot, zdot)
    base = abs(edot) + abs(q) * (float(np.linalg.norm(f.E)) + float(np.linalg.norm(f.B)))
    if params.is_identity:
        scale = math.sqrt(2.0) * base or 1.0
        return InvarianceReport(0.0, float(np.linalg.norm(R)) / scale,
                                float(np.linalg.norm(R)) / scale)
    j = combined_jacobian(x, params)
    Fp = transform_field(F, j)
    d2 = j.D**2
    zdot_p = j.Omega @ zdot
    edot_p = d2 * edot
    Rp = _lorentz_residual(q, Fp, edot_p, zdot_p)
    TR = d2 * (j.Omega @ R)
    scale = d2 * float(np.linalg.norm(j.Omega, 2)) * math.sqrt(2.0) * base or 1.0
    return InvarianceReport(
        covariance=float(np.linalg.norm(Rp - TR)) / scale,
        transformed=float(np.linalg.norm(Rp)) / scale,
        original=float(np.linalg.norm(R)) / scale,
    )


def eom_invariance_residual(q: float, f: FieldEB, x, params: ConformalParams,
                            deg_tol: float = DEG_TOL) -> float:
    """Relative covariance defect of the equation of motion; 0 for the identity."""
    return eom_invariance_report(q, f, x, params, deg_tol).covariance


def multiplier_transform(e: float, j: ConformalJacobian) -> float:
    """e' = D^2 e (e' = e^-2theta e for a pure dilatation)."""
    return j.D**2 * e
