import json
import math
import os
import subprocess
import sys

import numpy as np
import pytest

from flatspin.errors import AtPole, ProjectionRequired
from flatspin.meshio import export_mesh, fmt, json_dumps, stereographic_project

TWO_PI = 2.0 * math.pi


def run_cli(args):
    return subprocess.run(
        [sys.executable, "-m", "flatspin", *args],
        capture_output=True,
        text=True,
    )


def write_config(tmp_path, doc, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(doc))
    return str(p)


def psi_dict():
    return {
        "psi1": {"period": TWO_PI, "mean": 3 * math.pi / 2, "harmonics": []},
        "psi2": {"period": TWO_PI, "mean": 0.0, "harmonics": []},
    }


def read_tree(root):
    out = {}
    for name in sorted(os.listdir(root)):
        with open(os.path.join(root, name), "rb") as f:
            out[name] = f.read()
    return out


# ------------------------------------------------------------ meshio units


def test_fmt_17_digits():
    assert fmt(math.pi) == format(math.pi, ".17g")
    assert fmt(True) == "true"
    assert fmt(3) == "3"


def test_json_dumps_sorted_and_stable():
    a = json_dumps({"b": 1.5, "a": [1, 2.0, None, True]})
    assert a == '{"a": [1, 2.0, null, true], "b": 1.5}'


def test_stereographic_examples():
    assert np.allclose(stereographic_project([0, 0, 1, 0], "+x0"), [0, 1, 0])
    assert np.allclose(stereographic_project([-1, 0, 0, 0], "+x0"), [0, 0, 0])
    with pytest.raises(AtPole):
        stereographic_project([1, 0, 0, 0], "+x0")


def test_export_counts_torus(tmp_path):
    from flatspin.angle import AngleFunction
    from flatspin.torus import TorusSpec, build_torus

    spec = TorusSpec(AngleFunction.constant(3 * math.pi / 2, 0.0), ((1, 0), (0, 1)))
    patch = build_torus(spec, 8, 8)
    meta = export_mesh(
        patch.F, str(tmp_path / "t.obj"), "obj", periodic=(True, True), spherical=True
    )
    assert meta["vertices"] == 64 and meta["faces"] == 128
    lines = (tmp_path / "t.obj").read_text().splitlines()
    assert sum(1 for l in lines if l.startswith("v ")) == 64
    assert sum(1 for l in lines if l.startswith("f ")) == 128

    meta = export_mesh(
        patch.F, str(tmp_path / "t.csv"), "csv4d", periodic=(True, True)
    )
    assert meta["vertices"] == 81
    assert len((tmp_path / "t.csv").read_text().splitlines()) == 82


def test_export_requires_projection(tmp_path):
    with pytest.raises(ProjectionRequired):
        export_mesh(np.zeros((5, 5, 4)), str(tmp_path / "x.obj"), "obj")


def test_export_explicit_pole_at_vertex_raises(tmp_path):
    from flatspin.angle import AngleFunction
    from flatspin.torus import TorusSpec, build_torus

    spec = TorusSpec(AngleFunction.constant(3 * math.pi / 2, 0.0), ((1, 0), (0, 1)))
    patch = build_torus(spec, 64, 64)  # hits (1,0,0,0) at the origin node
    with pytest.raises(AtPole):
        export_mesh(
            patch.F,
            str(tmp_path / "x.obj"),
            "obj",
            periodic=(True, True),
            spherical=True,
            projection={"type": "stereographic", "pole": "+x0"},
        )


# ------------------------------------------------------------ CLI runs


def test_cli_torus_determinism_and_exit_code(tmp_path):
    cfg = write_config(
        tmp_path,
        {
            "command": "torus",
            "psi": psi_dict(),
            "lattice": [[1, 0], [0, 1]],
            "resolution": 64,
            "export": {"format": "obj"},
        },
    )
    r1 = run_cli(["torus", "--config", cfg, "--out", str(tmp_path / "a")])
    assert r1.returncode == 0, r1.stderr
    r2 = run_cli(["torus", "--config", cfg, "--out", str(tmp_path / "b")])
    assert r2.returncode == 0
    assert read_tree(tmp_path / "a") == read_tree(tmp_path / "b")
    diag = json.loads((tmp_path / "a" / "diagnostics.json").read_text())
    assert diag["pass"] is True
    assert diag["checks"]["torus_metric"]["pass"] is True


def test_cli_exit_codes_reflect_checks(tmp_path):
    # impossible tolerance -> checks fail -> exit 1
    cfg = write_config(
        tmp_path,
        {
            "command": "torus",
            "psi": psi_dict(),
            "lattice": [[1, 0], [0, 1]],
            "resolution": 64,
            "tolerances": {"torus_metric": 1e-30},
        },
    )
    r = run_cli(["torus", "--config", cfg, "--out", str(tmp_path / "o")])
    assert r.returncode == 1
    diag = json.loads((tmp_path / "o" / "diagnostics.json").read_text())
    assert diag["pass"] is False


def test_cli_validation_error_exit_2(tmp_path):
    doc = {
        "command": "torus",
        "psi": {
            "psi1": {"period": TWO_PI, "mean": 0.0, "harmonics": []},
            "psi2": {"period": TWO_PI, "mean": 0.0, "harmonics": []},
        },
        "lattice": [[1, 0], [0, 1]],
        "resolution": 32,
    }
    cfg = write_config(tmp_path, doc)
    r = run_cli(["torus", "--config", cfg, "--out", str(tmp_path / "o")])
    assert r.returncode == 2
    diag = json.loads((tmp_path / "o" / "diagnostics.json").read_text())
    assert diag["error"]["type"] == "NotImmersed"


def test_cli_schema_error_exit_2(tmp_path):
    cfg = write_config(
        tmp_path,
        {"command": "torus", "psi": psi_dict(), "lattice": [[1, 0], [0, 1]],
         "resolution": 100},
    )
    r = run_cli(["torus", "--config", cfg, "--out", str(tmp_path / "o")])
    assert r.returncode == 2
    assert "resolution" in r.stderr


def test_cli_command_mismatch(tmp_path):
    cfg = write_config(
        tmp_path,
        {"command": "torus", "psi": psi_dict(), "lattice": [[1, 0], [0, 1]]},
    )
    r = run_cli(["lift", "--config", cfg, "--out", str(tmp_path / "o")])
    assert r.returncode == 2


def test_cli_lift(tmp_path):
    cfg = write_config(
        tmp_path,
        {"command": "lift", "psi": psi_dict(), "resolution": 128},
    )
    out = tmp_path / "o"
    r = run_cli(["lift", "--config", cfg, "--out", str(out)])
    assert r.returncode == 0, r.stderr
    diag = json.loads((out / "diagnostics.json").read_text())
    assert diag["results"]["closure"] == "periodic"
    lines = (out / "lift_factor1.csv").read_text().splitlines()
    assert lines[0] == "index,param,q0,q1,q2,q3"
    assert len(lines) == 130  # header + 129 samples


def test_cli_selftest_small(tmp_path):
    cfg = write_config(tmp_path, {"command": "selftest", "samples": 200})
    out = tmp_path / "o"
    r = run_cli(["selftest", "--config", cfg, "--out", str(out)])
    assert r.returncode == 0, r.stderr
    diag = json.loads((out / "diagnostics.json").read_text())
    assert diag["results"]["norm_multiplicativity"]["failures"] == 0


def test_cli_patch_small(tmp_path):
    doc = {
        "command": "patch",
        "psi": {
            "psi1": {"period": TWO_PI, "mean": 3 * math.pi / 2,
                     "harmonics": [[0.0, 0.3]]},
            "psi2": {"period": TWO_PI, "mean": 0.0, "harmonics": [[0.0, 0.2]]},
        },
        "resolution": 64,
    }
    cfg = write_config(tmp_path, doc)
    out = tmp_path / "o"
    r = run_cli(["patch", "--config", cfg, "--out", str(out)])
    assert r.returncode == 0, r.stderr
    diag = json.loads((out / "diagnostics.json").read_text())
    assert diag["checks"]["flatness_K"]["pass"]
    lines = (out / "patch.csv").read_text().splitlines()
    assert lines[0] == "x,y,F0,F1,F2,F3"
    assert len(lines) == 65 * 65 + 1


def test_cli_kitagawa(tmp_path):
    cfg = write_config(
        tmp_path,
        {
            "command": "kitagawa",
            "psi": psi_dict(),
            "lattice": [[1, 0], [0, 1]],
            "resolution": 512,
        },
    )
    out = tmp_path / "o"
    r = run_cli(["kitagawa", "--config", cfg, "--out", str(out)])
    assert r.returncode == 0, r.stderr
    diag = json.loads((out / "diagnostics.json").read_text())
    assert diag["checks"]["disjoint_ranges"]["pass"]
    assert abs(diag["results"]["alpha"] - 5 * math.pi / 4) < 1e-9
