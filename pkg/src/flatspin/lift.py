"""Horizontal lifts: integrate g' g^{-1} = cos(psi) J + sin(psi) K.

The lift splits into two curves on the unit quaternions, g1 driven by
psi1(s) and g2 by psi2(t), each solving the left-coefficient linear ODE
g' = (cos psi J + sin psi K) g.  Integration is classical RK4 with a
renormalization to the 3-sphere after every step; the constraint costs
nothing and the tests rely on exactly unit samples.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline

from .angle import AngleFunction, FourierSeries
from .errors import DegeneratePoint, NotImmersed, NotUnit
from .findiff import d1_fourth
from .grid import GridXY
from .quaternions import Spinor, qnorm

__all__ = [
    "LiftFactor",
    "LiftPath",
    "ClosureClass",
    "integrate_factor",
    "integrate_lift",
    "lift_for_grid",
    "monodromy_class",
    "horizontality_residual",
    "extract_angle",
    "AngleSamples",
    "arclength_chart",
    "ChartMap",
]

CLOSURE_TOL = 1e-6


@dataclass
class LiftFactor:
    """One factor of a lift: samples of a curve on S^3 at uniform parameters."""

    params: np.ndarray
    samples: np.ndarray  # (n+1, 4)

    @property
    def step(self) -> float:
        return float(self.params[1] - self.params[0])

    @property
    def n(self) -> int:
        return len(self.params) - 1

    def unit_deviation(self) -> float:
        return float(np.max(np.abs(qnorm(self.samples) - 1.0)))


@dataclass
class LiftPath:
    factor1: LiftFactor
    factor2: LiftFactor
    monodromy1: np.ndarray | None = None  # g(period) g(0)^{-1}
    monodromy2: np.ndarray | None = None

    def combined_at(self, k1: int, k2: int) -> Spinor:
        return Spinor.from_split(self.factor1.samples[k1], self.factor2.samples[k2])


@dataclass(frozen=True)
class ClosureClass:
    kind: str  # "periodic" | "antiperiodic" | "open"
    defect: float


def _rk4(psi: FourierSeries, start: float, stop: float, n: int, q0) -> np.ndarray:
    """RK4 samples of g' = (cos psi J + sin psi K) g, renormalized each step."""
    h = (stop - start) / n
    x = start + h * np.arange(n + 1)
    xm = x[:-1] + 0.5 * h
    c0, s0 = np.cos(psi(x)), np.sin(psi(x))
    cm, sm = np.cos(psi(xm)), np.sin(psi(xm))

    out = np.empty((n + 1, 4))
    q = (float(q0[0]), float(q0[1]), float(q0[2]), float(q0[3]))
    out[0] = q

    def ode(c, s, w, x_, y, z):
        # (c J + s K) * q
        return (
            -c * y - s * z,
            c * z - s * y,
            c * w + s * x_,
            s * w - c * x_,
        )

    for i in range(n):
        w, x_, y, z = q
        k1 = ode(c0[i], s0[i], w, x_, y, z)
        k2 = ode(cm[i], sm[i], w + 0.5 * h * k1[0], x_ + 0.5 * h * k1[1],
                 y + 0.5 * h * k1[2], z + 0.5 * h * k1[3])
        k3 = ode(cm[i], sm[i], w + 0.5 * h * k2[0], x_ + 0.5 * h * k2[1],
                 y + 0.5 * h * k2[2], z + 0.5 * h * k2[3])
        k4 = ode(c0[i + 1], s0[i + 1], w + h * k3[0], x_ + h * k3[1],
                 y + h * k3[2], z + h * k3[3])
        w += h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0])
        x_ += h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1])
        y += h / 6.0 * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2])
        z += h / 6.0 * (k1[3] + 2.0 * k2[3] + 2.0 * k3[3] + k4[3])
        r = math.sqrt(w * w + x_ * x_ + y * y + z * z)
        q = (w / r, x_ / r, y / r, z / r)
        out[i + 1] = q

    return x, out


def integrate_factor(psi: FourierSeries, start: float, stop: float, n: int,
                     q0=None) -> LiftFactor:
    """Integrate one factor over [start, stop] with n RK4 steps."""
    if q0 is None:
        q0 = np.array([1.0, 0.0, 0.0, 0.0])
    q0 = np.asarray(q0, dtype=float)
    if abs(qnorm(q0) - 1.0) > 1e-9:
        raise NotUnit("initial quaternion is not unit")
    params, samples = _rk4(psi, start, stop, n, q0)
    return LiftFactor(params, samples)


def integrate_lift(psi: AngleFunction, n1: int, n2: int,
                   g0: Spinor | None = None) -> LiftPath:
    """Lift over one period in each variable, with monodromies attached."""
    if n1 < 16 or n2 < 16:
        raise ValueError("sample counts must be at least 16")
    if g0 is None:
        g0 = Spinor.identity()
    p0, m0 = g0.split()
    f1 = integrate_factor(psi.psi1, 0.0, psi.period_s, n1, p0)
    f2 = integrate_factor(psi.psi2, 0.0, psi.period_t, n2, m0)
    from .quaternions import qconj, qmul

    mono1 = qmul(f1.samples[-1], qconj(f1.samples[0]))
    mono2 = qmul(f2.samples[-1], qconj(f2.samples[0]))
    return LiftPath(f1, f2, mono1, mono2)


def lift_for_grid(psi: AngleFunction, grid: GridXY,
                  g0: Spinor | None = None) -> LiftPath:
    """Lift factors sampled exactly on the characteristic values of a grid."""
    if g0 is None:
        g0 = Spinor.identity()
    p0, m0 = g0.split()
    n = grid.n_diag
    f1 = integrate_factor(psi.psi1, grid.s_min, grid.s_min + n * grid.h, n, p0)
    f2 = integrate_factor(psi.psi2, grid.t_min, grid.t_min + n * grid.h, n, m0)
    return LiftPath(f1, f2)


def _closure_distances(mono: np.ndarray) -> tuple[float, float]:
    one = np.array([1.0, 0.0, 0.0, 0.0])
    return float(np.linalg.norm(mono - one)), float(np.linalg.norm(mono + one))


def monodromy_class(path: LiftPath, tol: float = CLOSURE_TOL) -> ClosureClass:
    """Classify the closure of a one-period lift.

    Periodic / antiperiodic when both monodromies are within tol of +1 /
    of -1; otherwise open, with defect the largest distance to {+1, -1}.
    """
    if path.monodromy1 is None or path.monodromy2 is None:
        raise ValueError("path was not integrated over exactly one period")
    d1p, d1m = _closure_distances(path.monodromy1)
    d2p, d2m = _closure_distances(path.monodromy2)
    if d1p <= tol and d2p <= tol:
        return ClosureClass("periodic", max(d1p, d2p))
    if d1m <= tol and d2m <= tol:
        return ClosureClass("antiperiodic", max(d1m, d2m))
    defect = max(min(d1p, d1m), min(d2p, d2m))
    return ClosureClass("open", defect)


def _log_derivative(factor: LiftFactor) -> np.ndarray:
    """(finite-difference g') g^{-1} at every sample, shape (n+1, 4)."""
    from .quaternions import qconj, qmul

    dq = d1_fourth(factor.samples, factor.step, axis=0)
    return qmul(dq, qconj(factor.samples))


def horizontality_residual(path: LiftPath, psi: AngleFunction) -> float:
    """Deviation of (g') g^{-1} from cos(psi) J + sin(psi) K, both factors.

    The scalar and I components must vanish and the (J, K) pair must match
    the angle; the maximum over all samples and components is returned.
    """
    res = 0.0
    for factor, series in ((path.factor1, psi.psi1), (path.factor2, psi.psi2)):
        v = _log_derivative(factor)
        c = np.cos(series(factor.params))
        s = np.sin(series(factor.params))
        res = max(
            res,
            float(np.max(np.abs(v[:, 0]))),
            float(np.max(np.abs(v[:, 1]))),
            float(np.max(np.abs(v[:, 2] - c))),
            float(np.max(np.abs(v[:, 3] - s))),
        )
    return res


@dataclass
class AngleSamples:
    """Angle values recovered from a lift, one array per factor."""

    params1: np.ndarray
    psi1: np.ndarray
    params2: np.ndarray
    psi2: np.ndarray


def extract_angle(path: LiftPath) -> AngleSamples:
    """Recover psi from a horizontal lift as atan2 of the (K, J) components.

    The branch is unwrapped to a continuous function and anchored so the
    first sample lies in [0, 2 pi).  Raises DegeneratePoint where the
    derivative is too small to define an angle.
    """
    out = []
    for factor in (path.factor1, path.factor2):
        v = _log_derivative(factor)
        speed = np.linalg.norm(v, axis=1)
        if np.min(speed) < 1e-9:
            raise DegeneratePoint("zero derivative: lift is not an immersion")
        raw = np.arctan2(v[:, 3], v[:, 2])
        psi = np.unwrap(raw)
        psi -= 2.0 * np.pi * np.floor(psi[0] / (2.0 * np.pi))
        out.append(psi)
    return AngleSamples(path.factor1.params, out[0], path.factor2.params, out[1])


@dataclass
class ChartMap:
    """Monotone reparametrization a -> x sampled on a uniform a-grid."""

    new_params: np.ndarray
    old_params: np.ndarray

    def __call__(self, a):
        return np.interp(a, self.new_params, self.old_params)


def _arclength_factor(factor: LiftFactor) -> tuple[LiftFactor, ChartMap]:
    spline = CubicSpline(factor.params, factor.samples, axis=0)
    dense = np.linspace(factor.params[0], factor.params[-1],
                        8 * factor.n + 1)
    speed = np.linalg.norm(spline(dense, 1), axis=1)
    if np.min(speed) < 1e-7:
        raise NotImmersed("stationary point: speed is not invertible")
    # cumulative arc length on the dense grid, then invert monotonically
    seg = 0.5 * (speed[1:] + speed[:-1]) * np.diff(dense)
    arclen = np.concatenate([[0.0], np.cumsum(seg)])
    total = arclen[-1]
    a_grid = np.linspace(0.0, total, factor.n + 1)
    x_of_a = np.interp(a_grid, arclen, dense)
    resampled = spline(x_of_a)
    resampled /= np.linalg.norm(resampled, axis=1)[:, None]
    return LiftFactor(a_grid, resampled), ChartMap(a_grid, x_of_a)


def arclength_chart(raw: LiftPath) -> tuple[LiftPath, ChartMap, ChartMap]:
    """Reparametrize a conformal curve pair to unit speed.

    Returns the unit-speed path and the two chart maps mu_i (new parameter
    to old).  The principal, orientation-preserving square-root branch is
    taken: each factor is reparametrized by its own increasing arc length.
    """
    f1, chart1 = _arclength_factor(raw.factor1)
    f2, chart2 = _arclength_factor(raw.factor2)
    return LiftPath(f1, f2), chart1, chart2
