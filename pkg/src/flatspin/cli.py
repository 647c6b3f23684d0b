"""Command-line driver: selftest, lift, patch, torus, kitagawa.

Usage: flatspin <command> --config <path> [--out <dir>] [--resolution N]
[--strict/--no-strict].  Each command writes a machine-readable
diagnostics.json plus its CSV/mesh artifacts into the output directory;
the exit code is 0 iff every enabled check passed its tolerance, 1 when a
check failed, 2 on configuration or domain errors.  Outputs are
byte-deterministic for a fixed config.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import meshio
from .config import ExperimentConfig, parse_config
from .errors import FlatspinError, SchemaError
from .grid import GridXY
from .quaternions import qconj, qmul

__all__ = ["main"]


def _apply_thread_cap():
    cap = os.environ.get("FLATSPIN_THREADS")
    if cap is None:
        return None
    try:
        value = int(cap)
        if value < 1:
            raise ValueError
    except ValueError:
        raise SchemaError("FLATSPIN_THREADS", "must be a positive integer")
    for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
        os.environ.setdefault(var, str(value))
    return value


def _checks_from(pairs):
    """pairs: name -> (value, tol, ok_when_below) or (bool,)"""
    checks = {}
    ok = True
    for name, spec in pairs.items():
        if len(spec) == 1:
            passed = bool(spec[0])
            checks[name] = {"pass": passed}
        else:
            value, tol = spec
            passed = value <= tol
            checks[name] = {"value": value, "tolerance": tol, "pass": passed}
        ok = ok and passed
    return checks, ok


def _write_diagnostics(out_dir, payload):
    path = os.path.join(out_dir, "diagnostics.json")
    with open(path, "w", newline="\n") as f:
        f.write(meshio.json_dumps(payload) + "\n")
    return path


def _export_lift_csv(out_dir, path_obj):
    for idx, factor in ((1, path_obj.factor1), (2, path_obj.factor2)):
        meshio.write_csv(
            os.path.join(out_dir, f"lift_factor{idx}.csv"),
            ["index", "param", "q0", "q1", "q2", "q3"],
            [
                np.arange(len(factor.params)),
                factor.params,
                factor.samples[:, 0],
                factor.samples[:, 1],
                factor.samples[:, 2],
                factor.samples[:, 3],
            ],
        )


def _export_curve_csv(out_dir, name, curve):
    meshio.write_csv(
        os.path.join(out_dir, name),
        ["param", "p1", "p2", "p3"],
        [curve.params, curve.points[:, 0], curve.points[:, 1], curve.points[:, 2]],
    )


def _run_selftest(cfg: ExperimentConfig, out_dir: str):
    from .selftest import run_selftest

    report = run_selftest(samples=cfg.samples, seed=cfg.seed)
    pairs = {
        name: (report[name]["failures"] == 0,)
        for name in report
        if isinstance(report[name], dict)
    }
    checks, ok = _checks_from(pairs)
    return {"results": report, "checks": checks}, ok


def _run_lift(cfg: ExperimentConfig, out_dir: str):
    from .lift import extract_angle, horizontality_residual, integrate_lift, monodromy_class

    n = cfg.resolution
    path = integrate_lift(cfg.psi, n, n)
    closure = monodromy_class(path)
    unit_dev = max(path.factor1.unit_deviation(), path.factor2.unit_deviation())
    horiz = horizontality_residual(path, cfg.psi)
    _export_lift_csv(out_dir, path)
    results = {
        "unit_deviation": unit_dev,
        "horizontality_residual": horiz,
        "monodromy1": path.monodromy1.tolist(),
        "monodromy2": path.monodromy2.tolist(),
        "closure": closure.kind,
        "closure_defect": closure.defect,
    }
    checks, ok = _checks_from(
        {
            "unit_norm": (unit_dev, cfg.tolerance("unit_norm")),
            "horizontality": (horiz, cfg.tolerance("horizontality")),
        }
    )
    return {"results": results, "checks": checks}, ok


def _patch_grid(cfg: ExperimentConfig) -> GridXY:
    x_max, y_max = cfg.domain or (
        cfg.psi.period_s / 2.0,
        cfg.psi.period_t / 2.0,
    )
    return GridXY.square(x_max, y_max, cfg.resolution)


def _run_patch(cfg: ExperimentConfig, out_dir: str):
    from .hypsolve import pde_residual, solve_cauchy, torus_cauchy_data
    from .surface import (
        build_patch,
        check_second_form,
        estimate_fundamental_forms,
        gauss_conformality_residual,
        gauss_lift_agreement,
    )

    grid = _patch_grid(cfg)
    data = cfg.cauchy
    if data == "closed_form":
        data = torus_cauchy_data(cfg.psi, grid.h)
    fld = solve_cauchy(cfg.psi, data, grid)
    patch = build_patch(cfg.psi, fld)
    forms = estimate_fundamental_forms(patch)
    max_k, max_kn = forms.max_abs_k()
    second = check_second_form(patch, fld, cfg.psi)
    r1, r2 = pde_residual(fld, cfg.psi)
    d = patch.diagnostics

    meshio.write_csv(
        os.path.join(out_dir, "metric.csv"),
        ["x", "y", "lambda", "mu"],
        [
            np.repeat(grid.xs, grid.ny + 1),
            np.tile(grid.ys, grid.nx + 1),
            fld.lam.reshape(-1),
            fld.mu.reshape(-1),
        ],
    )
    meshio.write_csv(
        os.path.join(out_dir, "patch.csv"),
        ["x", "y", "F0", "F1", "F2", "F3"],
        [
            np.repeat(grid.xs, grid.ny + 1),
            np.tile(grid.ys, grid.nx + 1),
        ]
        + [patch.F[..., k].reshape(-1) for k in range(4)],
    )

    results = {
        "pde_residual": [r1, r2],
        "closedness_residual": d["closedness_residual"],
        "path_independence": d["path_independence"],
        "membership_residual": d["membership_residual"],
        "duality_residual": d["duality_residual"],
        "metric_residual": d["metric_residual"],
        "max_abs_K": max_k,
        "max_abs_KN": max_kn,
        "second_form_residuals": second,
        "gauss_conformality": gauss_conformality_residual(patch),
        "gauss_lift_agreement": gauss_lift_agreement(patch),
        "min_lambda_mu": fld.min_product(),
    }
    checks, ok = _checks_from(
        {
            "closedness": (d["closedness_residual"], cfg.tolerance("closedness")),
            "membership": (d["membership_residual"], cfg.tolerance("membership")),
            "duality": (d["duality_residual"], cfg.tolerance("duality")),
            "metric": (d["metric_residual"], cfg.tolerance("metric")),
            "flatness_K": (max_k, cfg.tolerance("flatness")),
            "flatness_KN": (max_kn, cfg.tolerance("flatness")),
            "second_form": (
                max(second.values()),
                cfg.tolerance("second_form"),
            ),
        }
    )
    return {"results": results, "checks": checks}, ok


def _run_torus(cfg: ExperimentConfig, out_dir: str):
    from .torus import (
        TorusSpec,
        build_torus,
        gauss_image,
        gauss_pointwise_residual,
        torus_fundamental_forms,
        torus_metric_residual,
    )

    spec = TorusSpec(cfg.psi, cfg.lattice)
    n = cfg.resolution
    patch = build_torus(spec, n, n)
    metric_res = torus_metric_residual(patch)
    forms = torus_fundamental_forms(patch)
    max_k, max_kn = forms.max_abs_k()
    gp_res = gauss_pointwise_residual(patch, n_sample=24)
    gimg = gauss_image(spec, n=max(n, 256), n_grid=min(n, 256))

    s_col = np.repeat(patch.s, len(patch.t))
    t_col = np.tile(patch.t, len(patch.s))
    meshio.write_csv(
        os.path.join(out_dir, "torus_grid.csv"),
        ["s", "t", "F0", "F1", "F2", "F3"],
        [s_col, t_col] + [patch.F[..., k].reshape(-1) for k in range(4)],
    )
    _export_curve_csv(out_dir, "gauss1.csv", gimg.curve1)
    _export_curve_csv(out_dir, "gauss2.csv", gimg.curve2)

    export_meta = None
    if cfg.export is not None:
        fmt_name = cfg.export["format"]
        mesh_path = os.path.join(out_dir, f"torus.{fmt_name}")
        export_meta = meshio.export_mesh(
            patch.F,
            mesh_path,
            fmt_name,
            periodic=(True, True),
            spherical=True,
            projection=cfg.export.get("projection"),
        )

    results = {
        "validation": patch.diagnostics.get("validation"),
        "unit_deviation": patch.unit_deviation(),
        "metric_residual": metric_res,
        "max_abs_K": max_k,
        "max_abs_KN": max_kn,
        "gauss_pointwise_residual": gp_res,
        "gauss_image": gimg.to_dict(),
        "export": export_meta,
    }
    checks, ok = _checks_from(
        {
            "unit_norm": (patch.unit_deviation(), cfg.tolerance("unit_norm")),
            "torus_metric": (metric_res, cfg.tolerance("torus_metric")),
            "flatness_K": (max_k, cfg.tolerance("flatness")),
            "flatness_KN": (max_kn, cfg.tolerance("flatness")),
            "gauss_pointwise": (gp_res, cfg.tolerance("gauss_pointwise")),
            "total_curvature": (
                max(abs(t) for t in gimg.total_curvatures),
                cfg.tolerance("total_curvature"),
            ),
        }
    )
    return {"results": results, "checks": checks}, ok


def _run_kitagawa(cfg: ExperimentConfig, out_dir: str):
    from .torus import TorusSpec, kitagawa_extract

    spec = TorusSpec(cfg.psi, cfg.lattice)
    kd = kitagawa_extract(spec, n=cfg.resolution, alpha=cfg.alpha)
    _export_curve_csv(out_dir, "curve1.csv", kd.curve1)
    _export_curve_csv(out_dir, "curve2.csv", kd.curve2)
    results = kd.to_dict()
    checks, ok = _checks_from(
        {
            "curvature_identity": (
                max(kd.curvature_residuals),
                cfg.tolerance("curvature_identity"),
            ),
            "asymptotic_lift": (
                max(kd.asymptotic_residuals),
                cfg.tolerance("asymptotic_lift"),
            ),
            "disjoint_ranges": (kd.disjoint,),
            "sin_margin": (min(kd.sin_margins) > cfg.tolerance("sign_margin"),),
        }
    )
    return {"results": results, "checks": checks}, ok


_RUNNERS = {
    "selftest": _run_selftest,
    "lift": _run_lift,
    "patch": _run_patch,
    "torus": _run_torus,
    "kitagawa": _run_kitagawa,
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="flatspin",
        description="Flat surfaces in R^4 and flat tori in S^3 from spinor data.",
    )
    parser.add_argument("command", choices=sorted(_RUNNERS))
    parser.add_argument("--config", required=True, help="JSON config path")
    parser.add_argument("--out", default=None, help="output directory")
    parser.add_argument(
        "--resolution", type=int, default=None, help="override the resolution"
    )
    parser.add_argument(
        "--strict",
        action=argparse.BooleanOptionalAction,
        default=True,
        help="unknown config keys are errors (default)",
    )
    args = parser.parse_args(argv)

    try:
        threads = _apply_thread_cap()
        with open(args.config, "r") as f:
            text = f.read()
        cfg = parse_config(text, strict=args.strict)
        if cfg.command != args.command:
            raise SchemaError(
                "$.command",
                f"config is for {cfg.command!r}, invoked as {args.command!r}",
            )
        if args.resolution is not None:
            from .config import _check_resolution

            cfg.resolution = _check_resolution(args.resolution, "--resolution")

        out_dir = args.out or cfg.out or "flatspin_out"
        os.makedirs(out_dir, exist_ok=True)

        payload, ok = _RUNNERS[cfg.command](cfg, out_dir)
        payload["command"] = cfg.command
        payload["resolution"] = cfg.resolution
        payload["pass"] = ok
        if threads is not None:
            payload["threads"] = threads
        path = _write_diagnostics(out_dir, payload)
        status = "PASS" if ok else "FAIL"
        print(f"flatspin {cfg.command}: {status} ({path})")
        return 0 if ok else 1
    except FlatspinError as e:
        out_dir = args.out or "flatspin_out"
        try:
            os.makedirs(out_dir, exist_ok=True)
            _write_diagnostics(
                out_dir,
                {
                    "command": args.command,
                    "pass": False,
                    "error": {"type": type(e).__name__, "message": str(e)},
                },
            )
        except OSError:
            pass
        print(f"flatspin {args.command}: ERROR {type(e).__name__}: {e}",
              file=sys.stderr)
        return 2
    except OSError as e:
        print(f"flatspin: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    main()
