"""Lightlike worldlines parametrised by lab time.

A worldline supplies position, unit velocity and acceleration as functions of
lab time t on ``[t_min, t_max]``.  All evaluators accept scalars or arrays
and return arrays with a trailing axis of length 3.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import PreconditionError

DEFAULT_SPAN = (-100.0, 100.0)


class NullWorldline:
    kind = "analytic"
    t_min: float
    t_max: float

    def position(self, t):
        raise NotImplementedError

    def velocity(self, t):
        raise NotImplementedError

    def acceleration(self, t):
        raise NotImplementedError

    def check(self, n: int = 257, tol: float = 1e-9) -> None:
        """Raise if |v| != 1 or a.v != 0 at ``n`` sample times."""
        ts = np.linspace(self.t_min, self.t_max, n)
        v = self.velocity(ts)
        a = self.acceleration(ts)
        if np.max(np.abs(np.linalg.norm(v, axis=-1) - 1.0)) > tol:
            raise PreconditionError("worldline velocity is not unit length")
        if np.max(np.abs(np.sum(a * v, axis=-1))) > tol:
            raise PreconditionError("worldline acceleration not orthogonal to velocity")


def _col(t, *comps):
    return np.stack(np.broadcast_arrays(*comps), axis=-1)


@dataclass
class StraightWorldline(NullWorldline):
    """z(t) = origin + direction * t."""

    direction: tuple = (0.0, 0.0, 1.0)
    origin: tuple = (0.0, 0.0, 0.0)
    t_min: float = DEFAULT_SPAN[0]
    t_max: float = DEFAULT_SPAN[1]

    def __post_init__(self):
        d = np.asarray(self.direction, dtype=float)
        n = np.linalg.norm(d)
        if n == 0.0:
            raise PreconditionError("direction must be non-zero")
        self._v = d / n
        self._z0 = np.asarray(self.origin, dtype=float)

    def position(self, t):
        t = np.asarray(t, dtype=float)
        return self._z0 + t[..., None] * self._v

    def velocity(self, t):
        t = np.asarray(t, dtype=float)
        return np.broadcast_to(self._v, t.shape + (3,)).copy()

    def acceleration(self, t):
        t = np.asarray(t, dtype=float)
        return np.zeros(t.shape + (3,))


@dataclass
class HelicalWorldline(NullWorldline):
    """Unit-speed helix about the z axis.

    ``z(t) = center + (rho cos(w t + phase), rho sin(w t + phase), drift t)``
    with ``rho w = sqrt(1 - drift^2)``.  ``drift = 0`` is the circular orbit.
    """

    rho: float = 1.0
    drift: float = 0.0
    center: tuple = (0.0, 0.0, 0.0)
    phase: float = 0.0
    t_min: float = DEFAULT_SPAN[0]
    t_max: float = DEFAULT_SPAN[1]

    def __post_init__(self):
        if not (self.rho > 0 and abs(self.drift) < 1):
            raise PreconditionError("need rho > 0 and |drift| < 1")
        self.omega = math.sqrt(1.0 - self.drift**2) / self.rho
        self._c = np.asarray(self.center, dtype=float)

    def position(self, t):
        t = np.asarray(t, dtype=float)
        ph = self.omega * t + self.phase
        return self._c + _col(t, self.rho * np.cos(ph), self.rho * np.sin(ph), self.drift * t)

    def velocity(self, t):
        t = np.asarray(t, dtype=float)
        ph = self.omega * t + self.phase
        rw = self.rho * self.omega
        return _col(t, -rw * np.sin(ph), rw * np.cos(ph), np.full_like(t, self.drift))

    def acceleration(self, t):
        t = np.asarray(t, dtype=float)
        ph = self.omega * t + self.phase
        rw2 = self.rho * self.omega**2
        return _col(t, -rw2 * np.cos(ph), -rw2 * np.sin(ph), np.zeros_like(t))


def circular(rho: float = 1.0, **kw) -> HelicalWorldline:
    return HelicalWorldline(rho=rho, drift=0.0, **kw)


@dataclass
class SampledWorldline(NullWorldline):
    """Cubic Hermite interpolation of tabulated positions.

    Node derivatives come from second-order finite differences, rescaled to
    unit length; the velocity is the normalised derivative of the
    interpolant, so |v| = 1 holds exactly and a.v = 0 by construction.
    """

    t: np.ndarray
    z: np.ndarray
    kind: str = field(default="sampled", init=False)

    def __post_init__(self):
        t = np.ascontiguousarray(self.t, dtype=float)
        z = np.ascontiguousarray(self.z, dtype=float)
        if t.ndim != 1 or z.shape != (t.size, 3):
            raise PreconditionError("need t of shape (n,) and z of shape (n, 3)")
        if t.size < 4:
            raise PreconditionError("a sampled worldline needs at least 4 rows")
        if not np.all(np.diff(t) > 0):
            raise PreconditionError("sample times must be strictly increasing")
        if not (np.all(np.isfinite(t)) and np.all(np.isfinite(z))):
            raise PreconditionError("samples must be finite")
        dz = np.gradient(z, t, axis=0, edge_order=2)
        n = np.linalg.norm(dz, axis=1)
        if np.any(n == 0):
            raise PreconditionError("worldline samples contain a stationary point")
        self.t, self.z = t, z
        self.dz = np.ascontiguousarray(dz / n[:, None])
        self.t_min, self.t_max = float(t[0]), float(t[-1])

    def _raw(self, t):
        t = np.asarray(t, dtype=float)
        tn = self.t
        k = np.clip(np.searchsorted(tn, t, side="right") - 1, 0, tn.size - 2)
        dt = tn[k + 1] - tn[k]
        tau = (t - tn[k]) / dt
        t2, t3 = tau * tau, tau * tau * tau
        dt_, tau_ = dt[..., None], tau[..., None]
        t2_, t3_ = t2[..., None], t3[..., None]
        a, b = self.z[k], self.z[k + 1]
        da, db = self.dz[k], self.dz[k + 1]
        z = ((2 * t3_ - 3 * t2_ + 1) * a + (t3_ - 2 * t2_ + tau_) * dt_ * da
             + (3 * t2_ - 2 * t3_) * b + (t3_ - t2_) * dt_ * db)
        d1 = ((6 * t2_ - 6 * tau_) / dt_ * a + (3 * t2_ - 4 * tau_ + 1) * da
              + (6 * tau_ - 6 * t2_) / dt_ * b + (3 * t2_ - 2 * tau_) * db)
        d2 = ((12 * tau_ - 6) / dt_**2 * a + (6 * tau_ - 4) / dt_ * da
              + (6 - 12 * tau_) / dt_**2 * b + (6 * tau_ - 2) / dt_ * db)
        return z, d1, d2

    def position(self, t):
        return self._raw(t)[0]

    def velocity(self, t):
        _, d1, _ = self._raw(t)
        return d1 / np.linalg.norm(d1, axis=-1, keepdims=True)

    def acceleration(self, t):
        _, d1, d2 = self._raw(t)
        n = np.linalg.norm(d1, axis=-1, keepdims=True)
        v = d1 / n
        return (d2 - v * np.sum(v * d2, axis=-1, keepdims=True)) / n


def load_csv(path) -> SampledWorldline:
    """Read a ``t,zx,zy,zz`` CSV file."""
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["t", "zx", "zy", "zz"]:
            raise PreconditionError(f"{path}: header must be t,zx,zy,zz")
        rows = []
        for line in reader:
            if not line or not "".join(line).strip():
                continue
            if len(line) != 4:
                raise PreconditionError(f"{path}: expected 4 columns, got {len(line)}")
            try:
                rows.append([float(c) for c in line])
            except ValueError as exc:
                raise PreconditionError(f"{path}: {exc}") from None
    data = np.array(rows, dtype=float).reshape(-1, 4)
    return SampledWorldline(data[:, 0], data[:, 1:])


def from_config(cfg: dict, base_dir=None) -> NullWorldline:
    """Build a worldline from ``{"kind": ..., ...}`` or ``{"csv": path}``."""
    if "csv" in cfg:
        p = Path(cfg["csv"])
        if base_dir is not None and not p.is_absolute():
            p = Path(base_dir) / p
        return load_csv(p)
    kind = cfg.get("kind")
    span = {k: float(cfg[k]) for k in ("t_min", "t_max") if k in cfg}
    if kind == "straight":
        return StraightWorldline(
            direction=tuple(cfg.get("direction", (0.0, 0.0, 1.0))),
            origin=tuple(cfg.get("origin", (0.0, 0.0, 0.0))), **span,
        )
    if kind in ("circular", "helix"):
        return HelicalWorldline(
            rho=float(cfg.get("rho", 1.0)),
            drift=float(cfg.get("drift", 0.0)) if kind == "helix" else 0.0,
            center=tuple(cfg.get("center", (0.0, 0.0, 0.0))),
            phase=float(cfg.get("phase", 0.0)), **span,
        )
    raise PreconditionError(f"unknown worldline kind {kind!r}")
