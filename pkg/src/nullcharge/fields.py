"""External field configurations.

Each constructor returns a pure function ``field(t, x, y, z) -> FieldEB``.

JSON form: ``{"kind": <kind>, "params": {...}}`` with

==============  ==========================================================
kind            params (defaults)
==============  ==========================================================
Zero            none
UniformE        E: [Ex, Ey, Ez]
UniformB        B: [Bx, By, Bz]
CrossedEB       E, B (constant vectors, normally orthogonal)
PlaneWave       E0 (1), omega (1), phase (0), pol (0, polarisation angle
                in the xy plane); or modes: a list of such dicts, all
                travelling along +z
RotatingDipole  m (1), inclination (0), Omega (0.1), t_snap (0),
                R_star (1), r_core (0.05 R_star)
==============  ==========================================================

The rotating dipole is a toy stand-in for a pulsar: a static snapshot of a
point dipole whose moment is taken at ``t_snap``, with the rigid-corotation
electric field ``E = -(Omega x r) x B``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DipoleCoreViolation, PreconditionError
from .minkowski import FieldEB


class FieldKind(str, enum.Enum):
    PlaneWave = "PlaneWave"
    UniformE = "UniformE"
    UniformB = "UniformB"
    CrossedEB = "CrossedEB"
    RotatingDipole = "RotatingDipole"
    Zero = "Zero"


@dataclass(frozen=True)
class FieldSpec:
    kind: FieldKind
    params: dict = field(default_factory=dict)

    @classmethod
    def from_json(cls, obj) -> "FieldSpec":
        if not isinstance(obj, dict) or "kind" not in obj:
            raise PreconditionError("field spec must be an object with a 'kind' key")
        try:
            kind = FieldKind(obj["kind"])
        except ValueError:
            raise PreconditionError(f"unknown field kind {obj['kind']!r}") from None
        params = obj.get("params", {})
        if not isinstance(params, dict):
            raise PreconditionError("'params' must be an object")
        return cls(kind, dict(params))


def _vec(params, key, default=None):
    val = params.get(key, default)
    if val is None:
        raise PreconditionError(f"missing parameter {key!r}")
    arr = np.asarray(val, dtype=float)
    if arr.shape != (3,) or not np.all(np.isfinite(arr)):
        raise PreconditionError(f"parameter {key!r} must be a finite 3-vector")
    return arr


def _num(params, key, default):
    try:
        val = float(params.get(key, default))
    except (TypeError, ValueError):
        raise PreconditionError(f"parameter {key!r} must be a number") from None
    if not math.isfinite(val):
        raise PreconditionError(f"parameter {key!r} must be finite")
    return val


def _constant(E, B):
    f = FieldEB(E, B)

    def field(t, x, y, z):
        return f

    return field


def plane_wave(modes):
    """Superposition of linearly polarised waves moving along +z."""
    modes = [(m["E0"], m["omega"], m["phase"], math.cos(m["pol"]), math.sin(m["pol"]))
             for m in modes]

    def field(t, x, y, z):
        ex = ey = 0.0
        for E0, w, ph, c, s in modes:
            amp = E0 * math.cos(w * (t - z) + ph)
            ex += amp * c
            ey += amp * s
        return FieldEB((ex, ey, 0.0), (-ey, ex, 0.0))

    return field


def rotating_dipole(m=1.0, inclination=0.0, Omega=0.1, t_snap=0.0, R_star=1.0, r_core=None):
    if r_core is None:
        r_core = 0.05 * R_star
    ph = Omega * t_snap
    mvec = m * np.array([math.sin(inclination) * math.cos(ph),
                         math.sin(inclination) * math.sin(ph),
                         math.cos(inclination)])
    wvec = np.array([0.0, 0.0, Omega])

    def field(t, x, y, z):
        p = np.array([x, y, z], dtype=float)
        r = math.sqrt(p @ p)
        if r < r_core:
            raise DipoleCoreViolation(f"point at radius {r:.3g} is inside r_core={r_core:.3g}")
        n = p / r
        B = (3.0 * n * (n @ mvec) - mvec) / (4.0 * math.pi * r**3)
        E = -np.cross(np.cross(wvec, p), B)
        return FieldEB(E, B)

    return field


def make_field(spec: FieldSpec):
    p = spec.params
    kind = FieldKind(spec.kind)
    if kind is FieldKind.Zero:
        return _constant((0.0, 0.0, 0.0), (0.0, 0.0, 0.0))
    if kind is FieldKind.UniformE:
        return _constant(_vec(p, "E"), (0.0, 0.0, 0.0))
    if kind is FieldKind.UniformB:
        return _constant((0.0, 0.0, 0.0), _vec(p, "B"))
    if kind is FieldKind.CrossedEB:
        return _constant(_vec(p, "E"), _vec(p, "B"))
    if kind is FieldKind.PlaneWave:
        raw = p.get("modes", [p])
        if not isinstance(raw, list) or not raw:
            raise PreconditionError("'modes' must be a non-empty list")
        modes = [{"E0": _num(m, "E0", 1.0), "omega": _num(m, "omega", 1.0),
                  "phase": _num(m, "phase", 0.0), "pol": _num(m, "pol", 0.0)} for m in raw]
        return plane_wave(modes)
    if kind is FieldKind.RotatingDipole:
        R_star = _num(p, "R_star", 1.0)
        r_core = _num(p, "r_core", 0.05 * R_star)
        if not (R_star > 0 and r_core > 0):
            raise PreconditionError("R_star and r_core must be positive")
        return rotating_dipole(
            m=_num(p, "m", 1.0), inclination=_num(p, "inclination", 0.0),
            Omega=_num(p, "Omega", 0.1), t_snap=_num(p, "t_snap", 0.0),
            R_star=R_star, r_core=r_core,
        )
    raise PreconditionError(f"unsupported field kind {kind!r}")
