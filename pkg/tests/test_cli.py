import csv
import json
import math
import os
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from nullcharge import cli
from nullcharge.eigen import MAP_HEADER, admissible_velocities
from nullcharge.errors import QuadratureError
from nullcharge.fields import FieldSpec, make_field

GOLDEN = Path(__file__).parent / "golden"
COMMANDS = ["eigen", "flux", "propagate", "map", "conformal-check"]


def _ext(cmd):
    return "csv" if cmd in ("propagate", "map") else "json"


def run(tmp_path, cmd, cfg=None, *extra, name="out"):
    out = tmp_path / name
    argv = [cmd, "--out", str(out), "--quiet", *extra]
    if cfg is not None:
        if isinstance(cfg, dict):
            path = tmp_path / f"{name}.cfg.json"
            path.write_text(json.dumps(cfg))
            cfg = path
        argv += ["--config", str(cfg)]
    code = cli.main(argv)
    return code, (out.read_bytes() if out.exists() else None)


@pytest.mark.parametrize("cmd", COMMANDS)
def test_golden_files(tmp_path, cmd):
    cfg = GOLDEN / f"{cmd}.json"
    expected = (GOLDEN / f"{cmd}.expected.{_ext(cmd)}").read_bytes()
    code1, first = run(tmp_path, cmd, cfg, "--seed", "42", name="a")
    code2, second = run(tmp_path, cmd, cfg, "--seed", "42", name="b")
    assert code1 == code2 == 0
    assert first == second == expected


def test_map_golden_under_python_backend(tmp_path):
    env = dict(os.environ, NULLCHARGE_PURE_PYTHON="1")
    out = tmp_path / "map.csv"
    subprocess.run([sys.executable, "-m", "nullcharge.cli", "map", "--config",
                    str(GOLDEN / "map.json"), "--out", str(out)], env=env, check=True)
    assert out.read_bytes() == (GOLDEN / "map.expected.csv").read_bytes()


def test_eigen_examples(tmp_path):
    _, out = run(tmp_path, "eigen", {"E": [0.6, 0, 0], "B": [0, 0, 1], "q": 1})
    doc = json.loads(out)
    assert doc["class"] == "OrthogonalSubMagnetic" and doc["capture"] is True
    np.testing.assert_allclose([v["v"] for v in doc["velocities"]],
                               [[0, -0.6, 0.8], [0, -0.6, -0.8]], atol=1e-15)
    _, out = run(tmp_path, "eigen", {"E": [0, 0, 0], "B": [0, 0, 0]})
    doc = json.loads(out)
    assert doc["class"] == "ZeroField" and doc["velocities"] == "unconstrained"
    _, out = run(tmp_path, "eigen", {"E": [1, 0, 0], "B": [0, 1, 0]})
    assert json.loads(out)["roots"] == [[0, 4]]


def test_flux_examples(tmp_path):
    doc = json.loads((GOLDEN / "flux.expected.json").read_text())
    assert abs(doc["p_em"][0] - 3 * math.pi / 8) <= 1e-6 * 3 * math.pi / 8
    ratios = [row["I0_ratio"] for row in doc["eps_sweep"][1:]]
    assert all(abs(r - 16) < 0.1 for r in ratios)
    _, out = run(tmp_path, "flux", {"worldline": {"kind": "straight", "t_min": 0, "t_max": 4}},
                 "--eps", "0.2")
    doc = json.loads(out)
    assert doc["epsilon"] == 0.2
    assert not any(doc["p_em"]) and not any(any(r) for r in doc["M_em"])


def test_flux_from_csv_worldline(tmp_path):
    t = np.linspace(0, 2 * math.pi, 2001)
    rows = "\n".join(f"{a!r},{math.cos(a)!r},{math.sin(a)!r},0.0" for a in map(float, t))
    (tmp_path / "circle.csv").write_text("t,zx,zy,zz\n" + rows + "\n")
    code, out = run(tmp_path, "flux", {"worldline": {"csv": "circle.csv"}, "epsilon": math.pi / 2})
    assert code == 0
    assert abs(json.loads(out)["p_em"][0] - 3 * math.pi / 8) < 1e-5


def _rows(data):
    return list(csv.reader(data.decode().splitlines()))


def test_propagate_examples(tmp_path):
    rows = _rows((GOLDEN / "propagate.expected.csv").read_bytes())
    assert ",".join(rows[0]) == "t,zx,zy,zz,e,px,py,pz"
    assert float(rows[-1][0]) == 2.0 and abs(float(rows[-1][4]) - 2.0) < 1e-12
    base = {"z0": [0, 0, 0, 0], "v": [0, 0.6, 0.8], "e0": 3, "t1": 5, "dt": 0.5}
    _, out = run(tmp_path, "propagate",
                 dict(base, field={"kind": "UniformB", "params": {"B": [0, 3, 4]}}))
    assert {r[4] for r in _rows(out)[1:]} == {"3"}
    _, out = run(tmp_path, "propagate", dict(base, field={"kind": "Zero"}), name="zero")
    assert len({tuple(r[4:]) for r in _rows(out)[1:]}) == 1


def test_propagate_exit_codes(tmp_path):
    base = {"z0": [0, 0, 0, 0], "e0": 1, "t1": 5, "dt": 0.5}
    code, out = run(tmp_path, "propagate",
                    dict(base, v=[0, 1, 0], field={"kind": "UniformE", "params": {"E": [1, 0, 0]}}))
    assert code == 4 and out is None
    dip = {"kind": "RotatingDipole", "params": {"inclination": 0.0, "Omega": 0.5}}
    f = make_field(FieldSpec.from_json(dip))(0, 1.0, 0.3, 0.2)
    v = admissible_velocities(1.0, f).velocities[0][1]
    code, out = run(tmp_path, "propagate", dict(base, z0=[0, 1.0, 0.3, 0.2], v=list(v), field=dip),
                    name="div")
    assert code == 5
    last = out.decode().splitlines()[-1]
    assert last.startswith("# error: RadiationDivergence at t=")


def test_map_examples(tmp_path):
    grid = {"x": [-1, 1, 3], "y": [-1, 1, 3], "z": [-1, 1, 3]}
    _, out = run(tmp_path, "map", {"field": {"kind": "UniformB", "params": {"B": [0, 0, 1]}},
                                   "grid": grid})
    rows = _rows(out)
    assert ",".join(rows[0]) == MAP_HEADER
    assert len(rows) == 28 and {r[9] for r in rows[1:]} == {"PureB"}
    pts = [tuple(map(float, r[:3])) for r in rows[1:]]
    assert pts == sorted(pts)
    _, out = run(tmp_path, "map", {"field": {"kind": "Zero"}, "grid": grid}, name="zero")
    assert all(r[11:] == [""] * 8 for r in _rows(out)[1:])


def test_map_matches_library(tmp_path):
    cfg = json.loads((GOLDEN / "map.json").read_text())
    field = make_field(FieldSpec.from_json(cfg["field"]))
    rows = _rows((GOLDEN / "map.expected.csv").read_bytes())[1:]
    for r in rows:
        p = [float(c) for c in r[:3]]
        f = field(0.0, *p)
        sol = admissible_velocities(1.0, f)
        assert r[9] == sol.field_class.value
        assert r[3:9] == [cli.fmt(c) for c in (*f.E, *f.B)]
        for i, (ed, v) in enumerate(sol.velocities):
            assert r[11 + 4 * i: 15 + 4 * i] == [cli.fmt(c) for c in (ed, *v)]
        norm_e, norm_b = np.linalg.norm(f.E), np.linalg.norm(f.B)
        assert (r[10] == "true") == (norm_e < norm_b)  # corotation fields have E.B = 0


def test_conformal_check_subgroups(tmp_path):
    code, out = run(tmp_path, "conformal-check", {"subgroup": "dilatation"}, "--seed", "7")
    doc = json.loads(out)
    assert code == 0 and doc["max_residuals"]["eom_invariance"] <= 1e-12
    code, out = run(tmp_path, "conformal-check", {"subgroup": "identity"}, name="id")
    assert code == 0 and json.loads(out)["max_residuals"]["eom_invariance"] == 0
    code, out = run(tmp_path, "conformal-check",
                    {"tolerances": {"eom_invariance": 1e-30, "omega_identity": 1e-30}}, name="f")
    assert code == 6 and json.loads(out)["all_pass"] is False


@pytest.mark.parametrize("cmd, cfg", [
    ("eigen", {"E": [1, 0], "B": [0, 0, 1]}),
    ("eigen", {"E": [1, 0, 0]}),
    ("flux", {"worldline": {"kind": "circular"}, "epsilon": 4.0}),
    ("flux", {"worldline": {"kind": "wobbly"}}),
    ("propagate", {"field": {"kind": "Zero"}, "z0": [0, 0, 0, 0], "v": [1, 0, 0], "t1": 1, "dt": -1}),
    ("map", {"field": {"kind": "Zero"}, "grid": {"x": [0, 1, 2], "y": [0, 1, 2]}}),
    ("map", {"field": {"kind": "RotatingDipole"}, "grid": {"x": [-1, 1, 3], "y": [-1, 1, 3],
                                                           "z": [-1, 1, 3]}}),
    ("conformal-check", {"samples": 0}),
])
def test_bad_input_writes_nothing(tmp_path, cmd, cfg):
    code, out = run(tmp_path, cmd, cfg)
    assert code == 2 and out is None


def test_malformed_json(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    assert run(tmp_path, "eigen", p)[0] == 2
    assert cli.main(["eigen", "--quiet"]) == 2


def test_quadrature_failure_exit_code(tmp_path, monkeypatch):
    def fail(*args, **kwargs):
        raise QuadratureError("not converged")

    monkeypatch.setattr(cli.radiation, "radiated_flux", fail)
    code, out = run(tmp_path, "flux", {"worldline": {"kind": "circular", "t_min": 0, "t_max": 1}})
    assert code == 3 and out is None


def test_float_format():
    assert cli.fmt(0.1) == "0.10000000000000001"
    assert cli.fmt(-0.0) == "0"
    assert cli.dumps({"a": [1.5, float("nan")], "b": True}) == '{\n  "a": [1.5, null],\n  "b": true\n}'
