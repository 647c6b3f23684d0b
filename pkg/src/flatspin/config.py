"""Experiment configuration: parsing, validation, and derived defaults.

Parsing is strict by default: unknown keys are errors, every violation
carries the JSON path of the offending value.  Resolutions are powers of
two between 16 and 4096.  Tolerances have h-aware defaults and can be
overridden per key in the config.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .angle import AngleFunction
from .errors import SchemaError, UnknownKey
from .hypsolve import CauchyData

__all__ = ["ExperimentConfig", "parse_config", "default_tolerances"]

COMMANDS = ("selftest", "lift", "patch", "torus", "kitagawa")

_COMMON_KEYS = {"command", "out", "tolerances"}
_KEYS = {
    "selftest": _COMMON_KEYS | {"samples", "seed"},
    "lift": _COMMON_KEYS | {"psi", "resolution"},
    "patch": _COMMON_KEYS | {"psi", "resolution", "domain", "cauchy"},
    "torus": _COMMON_KEYS | {"psi", "lattice", "resolution", "export"},
    "kitagawa": _COMMON_KEYS | {"psi", "lattice", "resolution", "alpha"},
}

_TOLERANCE_KEYS = {
    "unit_norm",
    "horizontality",
    "monodromy",
    "membership",
    "duality",
    "closedness",
    "metric",
    "flatness",
    "second_form",
    "torus_metric",
    "gauss_pointwise",
    "curvature_identity",
    "asymptotic_lift",
    "total_curvature",
    "sign_margin",
}


def default_tolerances(command: str, n: int) -> dict:
    """Resolution-aware defaults.

    O(h^2) diagnostics scale from their acceptance values at n = 256;
    lift-derived quantities scale cubically (RK4 samples differentiated).
    """
    q2 = max(1.0, (256.0 / n)) ** 2
    q3 = max(1.0, (256.0 / n)) ** 3
    tol = {
        "unit_norm": 1e-10,
        "horizontality": 1e-6 * q3,
        "monodromy": 1e-6,
        "membership": 1e-10,
        "duality": 1e-10,
        "closedness": 2e-4 * q2,
        "metric": 1e-3 * q2,
        "flatness": 1e-3 * q2,
        "second_form": 5e-3 * q2,
        "torus_metric": 1e-4 * q3,
        "gauss_pointwise": 1e-10,
        "curvature_identity": 1e-3,
        "asymptotic_lift": 1e-6,
        "total_curvature": 1e-6,
        "sign_margin": 0.0,
    }
    return tol


@dataclass
class ExperimentConfig:
    command: str
    psi: AngleFunction | None = None
    lattice: tuple[tuple[int, int], tuple[int, int]] | None = None
    resolution: int = 256
    samples: int = 10000
    seed: int = 20240901
    domain: tuple[float, float] | None = None
    cauchy: CauchyData | str = "closed_form"
    alpha: float | None = None
    out: str | None = None
    export: dict | None = None
    tolerances: dict = field(default_factory=dict)

    def tolerance(self, key: str) -> float:
        base = default_tolerances(self.command, self.resolution)
        base.update(self.tolerances)
        return base[key]


def _expect(cond, path, message):
    if not cond:
        raise SchemaError(path, message)


def _is_num(v):
    return isinstance(v, (int, float)) and not isinstance(v, bool)


def _check_resolution(n, path):
    _expect(isinstance(n, int) and not isinstance(n, bool), path,
            "expected an integer")
    _expect(16 <= n <= 4096, path, "resolution must lie in [16, 4096]")
    _expect(n & (n - 1) == 0, path, "resolution must be a power of two")
    return n


def _parse_lattice(raw, path):
    _expect(isinstance(raw, list) and len(raw) == 2, path,
            "expected [[m1, n1], [m2, n2]]")
    gens = []
    for i, g in enumerate(raw):
        _expect(
            isinstance(g, list) and len(g) == 2
            and all(isinstance(v, int) and not isinstance(v, bool) for v in g),
            f"{path}[{i}]",
            "expected a pair of integers",
        )
        gens.append((g[0], g[1]))
    return (gens[0], gens[1])


def _parse_cauchy(raw, path):
    if raw is None:
        return "closed_form"
    _expect(isinstance(raw, dict), path, "expected an object")
    kind = raw.get("type")
    if kind == "closed_form":
        extra = set(raw) - {"type"}
        if extra:
            raise UnknownKey(f"{path}.{sorted(extra)[0]}", "unknown key")
        return "closed_form"
    if kind == "samples":
        for key in ("t", "lambda0", "mu0"):
            _expect(key in raw, f"{path}.{key}", "missing required key")
            _expect(
                isinstance(raw[key], list) and all(_is_num(v) for v in raw[key]),
                f"{path}.{key}",
                "expected a list of numbers",
            )
        period = raw.get("period")
        if period is not None:
            _expect(_is_num(period) and period > 0, f"{path}.period",
                    "expected a positive number")
        extra = set(raw) - {"type", "t", "lambda0", "mu0", "period"}
        if extra:
            raise UnknownKey(f"{path}.{sorted(extra)[0]}", "unknown key")
        return CauchyData(
            np.asarray(raw["t"], dtype=float),
            np.asarray(raw["lambda0"], dtype=float),
            np.asarray(raw["mu0"], dtype=float),
            period=None if period is None else float(period),
        )
    raise SchemaError(f"{path}.type", "expected 'closed_form' or 'samples'")


def _parse_export(raw, path):
    _expect(isinstance(raw, dict), path, "expected an object")
    fmt_name = raw.get("format")
    _expect(fmt_name in ("csv4d", "obj", "ply"), f"{path}.format",
            "expected one of csv4d, obj, ply")
    projection = raw.get("projection")
    if projection is not None:
        _expect(isinstance(projection, dict), f"{path}.projection",
                "expected an object")
    extra = set(raw) - {"format", "projection"}
    if extra:
        raise UnknownKey(f"{path}.{sorted(extra)[0]}", "unknown key")
    return {"format": fmt_name, "projection": projection}


def parse_config(text: str, strict: bool = True) -> ExperimentConfig:
    """Validate a JSON document into an ExperimentConfig.

    Raises SchemaError (with a JSON path) on missing or mistyped values,
    and UnknownKey for stray keys when strict.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise SchemaError("$", f"invalid JSON: {e}") from e
    _expect(isinstance(doc, dict), "$", "top level must be an object")

    command = doc.get("command")
    _expect(command is not None, "$.command", "missing required key")
    _expect(command in COMMANDS, "$.command",
            f"expected one of {', '.join(COMMANDS)}")

    if strict:
        for key in sorted(set(doc) - _KEYS[command]):
            raise UnknownKey(f"$.{key}", f"unknown key for command {command!r}")

    cfg = ExperimentConfig(command=command)

    if command != "selftest":
        _expect("psi" in doc, "$.psi", "missing required key")
        _expect(isinstance(doc["psi"], dict), "$.psi", "expected an object")
        cfg.psi = AngleFunction.from_dict(doc["psi"], "$.psi")
        if "resolution" in doc:
            cfg.resolution = _check_resolution(doc["resolution"], "$.resolution")

    if command == "selftest":
        if "samples" in doc:
            _expect(
                isinstance(doc["samples"], int) and doc["samples"] >= 1,
                "$.samples", "expected a positive integer",
            )
            cfg.samples = doc["samples"]
        if "seed" in doc:
            _expect(isinstance(doc["seed"], int), "$.seed", "expected an integer")
            cfg.seed = doc["seed"]

    if command in ("torus", "kitagawa"):
        _expect("lattice" in doc, "$.lattice", "missing required key")
        cfg.lattice = _parse_lattice(doc["lattice"], "$.lattice")

    if command == "patch":
        if "domain" in doc:
            raw = doc["domain"]
            _expect(
                isinstance(raw, list) and len(raw) == 2
                and all(_is_num(v) and v > 0 for v in raw),
                "$.domain", "expected [x_max, y_max] with positive numbers",
            )
            cfg.domain = (float(raw[0]), float(raw[1]))
        cfg.cauchy = _parse_cauchy(doc.get("cauchy"), "$.cauchy")

    if command == "kitagawa" and "alpha" in doc:
        _expect(_is_num(doc["alpha"]), "$.alpha", "expected a number")
        cfg.alpha = float(doc["alpha"])

    if command == "torus" and "export" in doc:
        cfg.export = _parse_export(doc["export"], "$.export")

    if "out" in doc:
        _expect(isinstance(doc["out"], str), "$.out", "expected a string")
        cfg.out = doc["out"]

    if "tolerances" in doc:
        raw = doc["tolerances"]
        _expect(isinstance(raw, dict), "$.tolerances", "expected an object")
        for key, val in raw.items():
            if strict and key not in _TOLERANCE_KEYS:
                raise UnknownKey(f"$.tolerances.{key}", "unknown tolerance")
            _expect(_is_num(val), f"$.tolerances.{key}", "expected a number")
        cfg.tolerances = {k: float(v) for k, v in raw.items()}

    return cfg
