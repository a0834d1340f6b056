"""Command-line front end.

    nullcharge eigen            --config cfg.json [--out result.json]
    nullcharge flux             --config cfg.json [--eps 0.5]
    nullcharge propagate        --config cfg.json --out traj.csv
    nullcharge map              --config cfg.json --out grid.csv
    nullcharge conformal-check  [--config cfg.json] [--seed 42]

Every command validates its whole configuration before computing and
writes nothing on a validation failure.  Floats are printed with ``%.17g``
so repeated runs give identical bytes.

Exit codes: 0 ok, 2 bad input, 3 quadrature failure, 4 inadmissible initial
state, 5 divergence during propagation, 6 property check failed.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import conformal, eigen, fields, radiation
from . import worldline as wl
from .errors import (DegenerateD, LightConePoint, MultiplierVanished, NullChargeError,
                     PreconditionError, QuadratureError, RadiationDivergence)
from .minkowski import FieldEB, em_invariants, em_tensor_from_eb

EXIT_OK, EXIT_INPUT, EXIT_QUAD, EXIT_INADMISSIBLE, EXIT_DIVERGENCE, EXIT_PROPERTY = 0, 2, 3, 4, 5, 6

PROPAGATE_HEADER = "t,zx,zy,zz,e,px,py,pz"


class InputError(Exception):
    pass


# ------------------------------------------------------------------ formatting

def fmt(x: float) -> str:
    x = float(x)
    if not math.isfinite(x):
        return "null"
    return "%.17g" % (x + 0.0)


def dumps(obj, indent: int = 0) -> str:
    """JSON with every float printed to 17 significant digits."""
    pad, inner = "  " * indent, "  " * (indent + 1)
    if isinstance(obj, (bool, np.bool_)) or obj is None:
        return json.dumps(None if obj is None else bool(obj))
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return fmt(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, (list, tuple)):
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in obj):
            return "[" + ", ".join(dumps(v) for v in obj) + "]"
        return "[\n" + ",\n".join(inner + dumps(v, indent + 1) for v in obj) + "\n" + pad + "]"
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = (inner + json.dumps(str(k)) + ": " + dumps(v, indent + 1) for k, v in obj.items())
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def _csv_cell(x) -> str:
    return "" if not math.isfinite(float(x)) else fmt(x)


# ------------------------------------------------------------------ config helpers

def _load_config(path):
    if path is None:
        return {}
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read config: {exc}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed JSON in {path}: {exc}") from None
    if not isinstance(cfg, dict):
        raise InputError("config must be a JSON object")
    return cfg


def _num(cfg, key, default=None, positive=False):
    if key not in cfg:
        if default is None:
            raise InputError(f"missing required number {key!r}")
        return float(default)
    val = cfg[key]
    if isinstance(val, bool) or not isinstance(val, (int, float)) or not math.isfinite(val):
        raise InputError(f"{key!r} must be a finite number")
    if positive and not val > 0:
        raise InputError(f"{key!r} must be positive")
    return float(val)


def _vec(cfg, key, n=3, default=None):
    val = cfg.get(key, default)
    if val is None:
        raise InputError(f"missing required vector {key!r}")
    if not isinstance(val, list) or len(val) != n or not all(
            isinstance(c, (int, float)) and not isinstance(c, bool) and math.isfinite(c)
            for c in val):
        raise InputError(f"{key!r} must be a list of {n} finite numbers")
    return np.array(val, dtype=float)


def _field(cfg):
    if "field" not in cfg:
        raise InputError("missing 'field' specification")
    try:
        return fields.make_field(fields.FieldSpec.from_json(cfg["field"]))
    except PreconditionError as exc:
        raise InputError(str(exc)) from None


def _check_eps(eps):
    if not (0.0 < eps <= math.pi):
        raise InputError(f"epsilon must lie in (0, pi], got {eps!r}")
    return eps


# ------------------------------------------------------------------ commands

def cmd_eigen(cfg, args):
    E, B = _vec(cfg, "E"), _vec(cfg, "B")
    q = _num(cfg, "q", 1.0)
    deg_tol = _num(cfg, "deg_tol", eigen.DEG_TOL, positive=True)
    f = FieldEB(E, B)
    sol = eigen.admissible_velocities(q, f, deg_tol)
    inv = em_invariants(f)
    if sol.unconstrained:
        vels = "unconstrained"
    else:
        vels = [{"edot": ed, "v": v} for ed, v in sol.velocities]
    doc = {
        "class": sol.field_class.value,
        "capture": sol.capture,
        "invariants": {"B2_minus_E2": inv[0], "E_dot_B": inv[1]},
        "roots": [[r, m] for r, m in sol.roots],
        "velocities": vels,
    }
    return EXIT_OK, dumps(doc) + "\n"


def cmd_flux(cfg, args):
    if "worldline" not in cfg or not isinstance(cfg["worldline"], dict):
        raise InputError("missing 'worldline' object")
    base = Path(args.config).parent if args.config else None
    try:
        w = wl.from_config(cfg["worldline"], base)
    except (PreconditionError, OSError) as exc:
        raise InputError(str(exc)) from None
    q = _num(cfg, "q", 1.0)
    eps = _check_eps(args.eps if args.eps is not None else _num(cfg, "epsilon", math.pi / 2))
    t = _num(cfg, "t", w.t_max)
    if not w.t_min <= t <= w.t_max:
        raise InputError(f"t={t} outside the worldline domain")
    quad_tol = _num(cfg, "quad_tol", 1e-10, positive=True)
    sweep = cfg.get("eps_sweep", [])
    if not isinstance(sweep, list):
        raise InputError("'eps_sweep' must be a list")
    sweep = [_check_eps(_num({"e": e}, "e")) for e in sweep]

    res = radiation.radiated_flux(q, w, t, eps, quad_tol)
    cf = radiation.cutoff_factors(eps)
    doc = {
        "q": q, "t": t, "epsilon": eps,
        "cutoff": {"I0": cf.I0, "I1": cf.I1, "I0_eps4": cf.I0 * eps**4},
        "p_em": res.p_em,
        "M_em": res.M_em,
    }
    if sweep:
        rows, prev = [], None
        for e in sweep:
            c = radiation.cutoff_factors(e)
            rows.append({"epsilon": e, "I0": c.I0, "I1": c.I1, "I0_eps4": c.I0 * e**4,
                         "I0_ratio": None if prev is None else c.I0 / prev})
            prev = c.I0
        doc["eps_sweep"] = rows
    return EXIT_OK, dumps(doc) + "\n"


def _state_row(s: eigen.ParticleState) -> str:
    p = s.p
    return ",".join(fmt(x) for x in (*s.z, s.e, *p[1:]))


def cmd_propagate(cfg, args):
    field = _field(cfg)
    z0 = _vec(cfg, "z0", 4)
    v = _vec(cfg, "v")
    e0 = _num(cfg, "e0", 1.0)
    q = _num(cfg, "q", 1.0)
    t1 = _num(cfg, "t1")
    dt = _num(cfg, "dt", positive=True)
    admis_tol = _num(cfg, "admis_tol", 1e-9, positive=True)
    if not t1 > z0[0]:
        raise InputError("t1 must exceed the initial time z0[0]")
    try:
        state = eigen.ParticleState(z0, v, e0)
    except PreconditionError as exc:
        raise InputError(str(exc)) from None

    out = [PROPAGATE_HEADER]
    try:
        states = eigen.propagate(state, field, z0[0], t1, dt, q=q, admis_tol=admis_tol)
    except (RadiationDivergence, MultiplierVanished) as exc:
        out.extend(_state_row(s) for s in exc.states)
        out.append(f"# error: {type(exc).__name__} at t={fmt(exc.t)}")
        return EXIT_DIVERGENCE, "\n".join(out) + "\n"
    out.extend(_state_row(s) for s in states)
    return EXIT_OK, "\n".join(out) + "\n"


def _axis(grid, key):
    spec = grid.get(key)
    if not (isinstance(spec, list) and len(spec) == 3):
        raise InputError(f"grid axis {key!r} must be [lo, hi, n]")
    lo = _num({"v": spec[0]}, "v")
    hi = _num({"v": spec[1]}, "v")
    n = spec[2]
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise InputError(f"grid axis {key!r}: n must be a positive integer")
    if n > 1 and not hi > lo:
        raise InputError(f"grid axis {key!r}: need hi > lo")
    return np.linspace(lo, hi, n) if n > 1 else np.array([lo])


def cmd_map(cfg, args):
    field = _field(cfg)
    grid = cfg.get("grid")
    if not isinstance(grid, dict):
        raise InputError("missing 'grid' object")
    xs, ys, zs = (_axis(grid, k) for k in ("x", "y", "z"))
    t = _num(cfg, "t", 0.0)
    q = _num(cfg, "q", 1.0)
    deg_tol = _num(cfg, "deg_tol", eigen.DEG_TOL, positive=True)
    X, Y, Z = np.meshgrid(xs, ys, zs, indexing="ij")
    pts = np.stack([X.ravel(), Y.ravel(), Z.ravel()], axis=-1)
    try:
        recs = eigen.velocity_map(field, pts, t=t, q=q, deg_tol=deg_tol)
    except PreconditionError as exc:
        raise InputError(str(exc)) from None
    lines = [eigen.MAP_HEADER]
    for r in recs:
        cells = [fmt(c) for c in (*r.point, *r.field.E, *r.field.B)]
        cells += [r.field_class.value, "true" if r.capture else "false"]
        for i in range(2):
            cells += [_csv_cell(r.edot[i])] + [_csv_cell(c) for c in r.vel[i]]
        lines.append(",".join(cells))
    return EXIT_OK, "\n".join(lines) + "\n"


_SUBGROUPS = ("full", "dilatation", "special", "identity")


def _sample_conformal(rng, subgroup):
    while True:
        x = rng.uniform(-1.0, 1.0, 4)
        xx = -x[0] ** 2 + x[1:] @ x[1:]
        if abs(xx) < 0.05 * (x @ x):
            continue
        b = np.zeros(4)
        if subgroup in ("full", "special"):
            d = rng.normal(size=4)
            b = d / np.linalg.norm(d) * rng.uniform(0.0, 0.1)
        theta = rng.uniform(-0.5, 0.5) if subgroup in ("full", "dilatation") else 0.0
        params = conformal.ConformalParams(theta, b)
        try:
            jac = conformal.combined_jacobian(x, params)
            if np.any(b):
                conformal.conformal_jacobian(x, b)
        except (LightConePoint, DegenerateD):
            continue
        f = FieldEB(rng.normal(size=3), rng.normal(size=3))
        q = float(rng.choice([-1.0, 1.0]) * rng.uniform(0.5, 2.0))
        return x, params, jac, f, q


def cmd_conformal_check(cfg, args):
    n = cfg.get("samples", 100)
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise InputError("'samples' must be a positive integer")
    subgroup = cfg.get("subgroup", "full")
    if subgroup not in _SUBGROUPS:
        raise InputError(f"'subgroup' must be one of {', '.join(_SUBGROUPS)}")
    tols = cfg.get("tolerances", {})
    if not isinstance(tols, dict):
        raise InputError("'tolerances' must be an object")
    tol = {
        "omega_identity": _num(tols, "omega_identity", 1e-10, positive=True),
        "field_roundtrip": _num(tols, "field_roundtrip", 1e-10, positive=True),
        "eom_invariance": _num(tols, "eom_invariance",
                               1e-12 if subgroup in ("dilatation", "identity") else 1e-9,
                               positive=True),
    }
    seed = args.seed if args.seed is not None else cfg.get("seed", 42)
    if isinstance(seed, bool) or not isinstance(seed, int):
        raise InputError("seed must be an integer")

    rng = np.random.default_rng(seed)
    worst = {"omega_identity": 0.0, "field_roundtrip": 0.0, "eom_invariance": 0.0,
             "eom_transformed": 0.0}
    for _ in range(n):
        x, params, jac, f, q = _sample_conformal(rng, subgroup)
        F = em_tensor_from_eb(f)
        back = conformal.pullback_field(conformal.transform_field(F, jac), jac)
        rep = conformal.eom_invariance_report(q, f, x, params)
        worst["omega_identity"] = max(worst["omega_identity"], jac.metric_defect())
        worst["field_roundtrip"] = max(worst["field_roundtrip"], float(
            np.linalg.norm(back.cov - F.cov) / np.linalg.norm(F.cov)))
        worst["eom_invariance"] = max(worst["eom_invariance"], rep.covariance)
        worst["eom_transformed"] = max(worst["eom_transformed"], rep.transformed)
    passed = {k: worst[k] <= tol[k] for k in tol}
    doc = {
        "seed": seed, "samples": n, "subgroup": subgroup,
        "max_residuals": worst,
        "tolerances": tol,
        "pass": passed,
        "all_pass": all(passed.values()),
    }
    return (EXIT_OK if doc["all_pass"] else EXIT_PROPERTY), dumps(doc) + "\n"


COMMANDS = {
    "eigen": cmd_eigen,
    "flux": cmd_flux,
    "propagate": cmd_propagate,
    "map": cmd_map,
    "conformal-check": cmd_conformal_check,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="nullcharge",
                                 description="Electrodynamics of massless point charges.")
    ap.add_argument("command", choices=sorted(COMMANDS))
    ap.add_argument("--config", help="JSON configuration file")
    ap.add_argument("--out", help="output path (default: stdout)")
    ap.add_argument("--seed", type=int, help="seed for randomised property commands")
    ap.add_argument("--eps", type=float, help="polar cutoff for flux (overrides the config)")
    ap.add_argument("--quiet", action="store_true", help="suppress diagnostics on stderr")
    return ap


def _write(text: str, out):
    if out is None:
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        with open(out, "w", newline="") as fh:
            fh.write(text)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)

    def say(msg):
        if not args.quiet:
            print(f"nullcharge {args.command}: {msg}", file=sys.stderr)

    if args.command != "conformal-check" and args.config is None:
        say("--config is required")
        return EXIT_INPUT
    try:
        cfg = _load_config(args.config)
        code, text = COMMANDS[args.command](cfg, args)
    except InputError as exc:
        say(f"invalid input: {exc}")
        return EXIT_INPUT
    except eigen.InadmissibleState as exc:
        say(str(exc))
        return EXIT_INADMISSIBLE
    except QuadratureError as exc:
        say(f"quadrature failed: {exc}")
        return EXIT_QUAD
    except (PreconditionError, NullChargeError) as exc:
        say(f"invalid input: {exc}")
        return EXIT_INPUT
    try:
        _write(text, args.out)
    except OSError as exc:
        say(f"cannot write output: {exc}")
        return EXIT_INPUT
    if code == EXIT_DIVERGENCE:
        say("propagation stopped early; see the final record")
    elif code == EXIT_PROPERTY:
        say("property check failed")
    return code


if __name__ == "__main__":
    sys.exit(main())
