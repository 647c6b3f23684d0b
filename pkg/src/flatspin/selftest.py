"""Randomized verification suites for the algebra layer.

These are the machine-checkable identities behind the scalar types: norm
multiplicativity, the three equivalent invertibility characterizations,
square-root enumeration over the cone, the two bracket symmetries, and the
double-cover rotation angles.  Each suite runs a requested number of
random draws from a seeded generator and reports failures plus the worst
residual, so both the test suite and the CLI selftest command share one
implementation.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import NotInvertible
from .lorentz import Lorentz, lz_inverse, lz_sqrt_all
from .quaternions import (
    SplitQuat,
    Spinor,
    Vec4,
    rotate_r4,
    split_iso,
    sq_brack,
    sq_h,
    sq_inverse,
)

__all__ = ["run_selftest"]


def _rand_quat(rng, scale=1.0):
    return SplitQuat(*(Lorentz(*(scale * rng.normal(size=2))) for _ in range(4)))


def _norm_multiplicativity(rng, n):
    failures = 0
    worst = 0.0
    for _ in range(n):
        a = _rand_quat(rng)
        b = _rand_quat(rng)
        lhs = sq_h(a * b, a * b)
        rhs = sq_h(a, a) * sq_h(b, b)
        scale = max(1.0, rhs.magnitude())
        res = (lhs - rhs).magnitude() / scale
        worst = max(worst, res)
        if res > 1e-10:
            failures += 1
    return failures, worst


def _invertibility_agreement(rng, n):
    """H(xi,xi) invertible <=> an inverse exists <=> xi not in H_+ u H_-."""
    failures = 0
    worst = 0.0
    n_crafted = n // 10
    for i in range(n):
        if i < n_crafted:
            # crafted zero divisors (1 +- sigma) q
            q = rng.normal(size=4)
            sign = 1.0 if i % 2 == 0 else -1.0
            xi = SplitQuat(*(Lorentz(x, sign * x) for x in q))
        else:
            xi = _rand_quat(rng)
        h_ok = xi.h_norm().is_invertible()
        p, m = split_iso(xi)
        half_ok = not (np.allclose(p, 0.0, atol=1e-300) or
                       np.allclose(m, 0.0, atol=1e-300))
        try:
            inv = sq_inverse(xi)
            inv_ok = True
            res = (xi * inv - SplitQuat.from_reals(1, 0, 0, 0)).max_abs()
            worst = max(worst, res)
            if res > 1e-10 * max(1.0, xi.max_abs()):
                failures += 1
        except NotInvertible:
            inv_ok = False
        if not (h_ok == inv_ok == half_ok):
            failures += 1
    return failures, worst


def _sqrt_enumeration(rng, n):
    failures = 0
    worst = 0.0
    for _ in range(n):
        # strictly inside the cone: u > |v|
        v = rng.normal() * 2.0
        u = abs(v) + 10.0 ** rng.uniform(-3, 1)
        b = Lorentz(u, v)
        roots = lz_sqrt_all(b)
        if len(roots) != 4:
            failures += 1
            continue
        for r in roots:
            res = (r * r - b).magnitude()
            worst = max(worst, res)
            if res > 1e-12 * max(1.0, b.magnitude()):
                failures += 1
    return failures, worst


def _bracket_symmetries(rng, n):
    failures = 0
    worst = 0.0
    for _ in range(n):
        x = Vec4(*rng.normal(size=4)).embed()
        phi = _rand_quat(rng)
        psi = _rand_quat(rng)
        scale = max(1.0, x.max_abs() * phi.max_abs() * psi.max_abs())
        r1 = (
            sq_brack(x * phi.hat(), psi) + sq_brack(phi, x * psi.hat()).hat()
        ).max_abs() / scale
        r2 = (
            sq_brack(phi, psi) - sq_brack(psi, phi).bar()
        ).max_abs() / scale
        res = max(r1, r2)
        worst = max(worst, res)
        if res > 1e-12:
            failures += 1
    return failures, worst


def _double_cover_rotations(rng, n):
    """cos t1 + sin t1 I rotates the (x2, x3) plane by 2 t1 and fixes
    (x0, x1); the sigma factor does the same on (x0, x1)."""
    failures = 0
    worst = 0.0
    for _ in range(n):
        t = rng.uniform(-math.pi, math.pi)
        c2, s2 = math.cos(2 * t), math.sin(2 * t)
        v = Vec4(*rng.normal(size=4))

        q = Spinor(SplitQuat(Lorentz(math.cos(t)), Lorentz(math.sin(t))))
        out = rotate_r4(q, v).as_array()
        want = np.array(
            [v.x0, v.x1, c2 * v.x2 - s2 * v.x3, s2 * v.x2 + c2 * v.x3]
        )
        res = float(np.max(np.abs(out - want)))

        qs = Spinor(SplitQuat(Lorentz(math.cos(t)), Lorentz(0.0, math.sin(t))))
        outs = rotate_r4(qs, v).as_array()
        wants = np.array(
            [c2 * v.x0 - s2 * v.x1, s2 * v.x0 + c2 * v.x1, v.x2, v.x3]
        )
        res = max(res, float(np.max(np.abs(outs - wants))))
        worst = max(worst, res)
        if res > 1e-12 * max(1.0, v.norm()):
            failures += 1
    return failures, worst


_SUITES = {
    "norm_multiplicativity": _norm_multiplicativity,
    "invertibility_agreement": _invertibility_agreement,
    "sqrt_enumeration": _sqrt_enumeration,
    "bracket_symmetries": _bracket_symmetries,
    "double_cover_rotations": _double_cover_rotations,
}


def run_selftest(samples: int = 10000, seed: int = 20240901,
                 rotation_samples: int = 100) -> dict:
    """Run every randomized suite; returns a per-suite report."""
    report = {}
    for name, fn in _SUITES.items():
        rng = np.random.default_rng(seed)
        n = rotation_samples if name == "double_cover_rotations" else samples
        failures, worst = fn(rng, n)
        report[name] = {
            "samples": n,
            "failures": failures,
            "max_residual": worst,
        }
    report["pass"] = all(v["failures"] == 0 for v in report.values()
                         if isinstance(v, dict))
    return report
