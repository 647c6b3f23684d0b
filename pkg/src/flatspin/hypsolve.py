"""Cauchy solver for the metric coefficients (lambda, mu).

In the characteristic coordinates s = x + y, t = x - y the system

    d_x mu = lambda d_x theta2,      d_y lambda = -mu d_y theta2

diagonalizes: lambda is transported along ds = -dt and mu along ds = dt,

    (d_s - d_t) lambda = -(psi1' + psi2')/2 * mu
    (d_s + d_t) mu     = -(psi2' - psi1')/2 * lambda.

With data on s = 0 and a grid whose spacing h is shared by s and t, the
characteristics pass exactly through grid nodes, so a midpoint update with
the coupled pair solved implicitly per node is second order and needs no
CFL tuning; the numerical domain of dependence equals the exact one.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .angle import AngleFunction
from .errors import DomainError, SignLoss
from .grid import GridXY

__all__ = [
    "CauchyData",
    "MetricField",
    "solve_cauchy",
    "pde_residual",
    "mean_curvature_coeffs",
    "torus_field",
    "torus_cauchy_data",
]


@dataclass
class CauchyData:
    """lambda, mu sampled on the line s = 0.

    Periodic data covers one period [0, T) without the duplicate endpoint;
    non-periodic data covers [0, t_max] inclusive.
    """

    t: np.ndarray
    lam0: np.ndarray
    mu0: np.ndarray
    period: float | None = None

    def __post_init__(self):
        self.t = np.asarray(self.t, dtype=float)
        self.lam0 = np.asarray(self.lam0, dtype=float)
        self.mu0 = np.asarray(self.mu0, dtype=float)
        if self.t.shape != self.lam0.shape or self.t.shape != self.mu0.shape:
            raise ValueError("t, lambda0, mu0 must have matching shapes")
        if np.any(self.lam0 * self.mu0 <= 0.0):
            raise SignLoss("Cauchy data violates lambda*mu > 0")

    @staticmethod
    def from_functions(f_lam, f_mu, t_max: float, n: int,
                       periodic: bool = True) -> "CauchyData":
        if periodic:
            t = t_max / n * np.arange(n)
            return CauchyData(t, f_lam(t), f_mu(t), period=t_max)
        t = np.linspace(0.0, t_max, n + 1)
        return CauchyData(t, f_lam(t), f_mu(t), period=None)

    def to_dict(self) -> dict:
        return {
            "t": self.t.tolist(),
            "lambda0": self.lam0.tolist(),
            "mu0": self.mu0.tolist(),
            "period": self.period,
        }


@dataclass
class MetricField:
    """lambda and mu on an (x, y) grid, one value per node."""

    grid: GridXY
    lam: np.ndarray  # (nx+1, ny+1)
    mu: np.ndarray

    def check_sign(self):
        if np.any(self.lam * self.mu <= 0.0):
            raise SignLoss("lambda*mu changed sign on the grid")

    def min_product(self) -> float:
        return float(np.min(self.lam * self.mu))


def _coefficients(psi: AngleFunction, s, t):
    """(a, b) with (d_s - d_t) lam = -a mu and (d_s + d_t) mu = -b lam."""
    a = 0.5 * (psi.psi1.derivative(s) + psi.psi2.derivative(t))
    b = 0.5 * (psi.psi2.derivative(t) - psi.psi1.derivative(s))
    return a, b


def _check_multiple(value: float, h: float, what: str) -> int:
    k = round(value / h)
    if abs(k * h - value) > 1e-9 * max(1.0, abs(value)):
        raise DomainError(f"{what} = {value} is not a multiple of the grid spacing")
    return int(k)


def solve_cauchy(psi: AngleFunction, data: CauchyData, grid: GridXY) -> MetricField:
    """March the characteristic scheme from s = 0 and sample the (x, y) grid.

    The grid must sit on the characteristic lattice of the data: x0 + y0
    and x0 - y0 must be multiples of h, the data spacing must equal h, and
    every node must be reachable from the data footprint (always true for
    periodic data with s >= 0).
    """
    h = grid.h
    dt = np.diff(data.t)
    if len(data.t) < 2 or np.max(np.abs(dt - h)) > 1e-9 * max(1.0, h):
        raise DomainError("data resolution does not match the grid spacing")

    periodic = data.period is not None
    if periodic:
        n_t = _check_multiple(data.period, h, "data period")
        if len(data.t) != n_t:
            raise DomainError("periodic data must hold exactly period/h samples")

    k0 = _check_multiple(grid.s_min, h, "x0 + y0")
    if k0 < 0:
        raise DomainError("domain extends below the Cauchy line s = 0")
    m0 = _check_multiple(grid.t_min - data.t[0], h, "t offset from the data origin")
    levels = k0 + grid.n_diag  # march this many steps from s = 0

    if not periodic:
        n_dom = len(data.t) - 1
        # level k holds indices [k, n_dom - k]; both constraints are monotone
        # in i or j alone, so the four corners cover the whole grid
        for i in (0, grid.nx):
            for j in (0, grid.ny):
                k = k0 + i + j
                m = m0 + (i - j + grid.ny)
                if m < k or m > n_dom - k:
                    raise DomainError(
                        "characteristics exit the data footprint at a corner node"
                    )

    lam = data.lam0.copy()
    mu = data.mu0.copy()
    t_cur = data.t
    lam_levels = [lam]
    mu_levels = [mu]

    for k in range(levels):
        s_mid = k * h + 0.5 * h
        if periodic:
            t_new = t_cur
            # lambda at (s+h, t) arrives from (s, t+h); mu from (s, t-h)
            lam_from, mu_at_lam = np.roll(lam, -1), np.roll(mu, -1)
            mu_from, lam_at_mu = np.roll(mu, 1), np.roll(lam, 1)
        else:
            t_new = t_cur[1:-1]
            lam_from, mu_at_lam = lam[2:], mu[2:]
            mu_from, lam_at_mu = mu[:-2], lam[:-2]
            t_cur = t_new
        a_mid = 0.5 * (psi.psi1.derivative(s_mid)
                       + psi.psi2.derivative(t_new + 0.5 * h))
        b_mid = 0.5 * (psi.psi2.derivative(t_new - 0.5 * h)
                       - psi.psi1.derivative(s_mid))
        rhs_l = lam_from - 0.5 * h * a_mid * mu_at_lam
        rhs_m = mu_from - 0.5 * h * b_mid * lam_at_mu
        det = 1.0 - 0.25 * h * h * a_mid * b_mid
        lam = (rhs_l - 0.5 * h * a_mid * rhs_m) / det
        mu = (rhs_m - 0.5 * h * b_mid * rhs_l) / det
        lam_levels.append(lam)
        mu_levels.append(mu)

    # sample the (x, y) nodes
    si = grid.s_index() + k0      # level index
    ti = grid.t_index() + m0      # absolute t index in the s = 0 numbering
    if periodic:
        lam_all = np.stack(lam_levels)
        mu_all = np.stack(mu_levels)
        cols = ti % n_t
    else:
        width = len(data.t)
        lam_all = np.zeros((levels + 1, width))
        mu_all = np.zeros_like(lam_all)
        for k in range(levels + 1):
            lam_all[k, k:width - k] = lam_levels[k]
            mu_all[k, k:width - k] = mu_levels[k]
        cols = ti
    lam_out = lam_all[si, cols]
    mu_out = mu_all[si, cols]

    field = MetricField(grid, lam_out, mu_out)
    field.check_sign()
    return field


def pde_residual(field: MetricField, psi: AngleFunction) -> tuple[float, float]:
    """Second-order central residuals of the two metric equations.

    r1 checks d_x mu = lambda d_x theta2, r2 checks
    d_y lambda = -mu d_y theta2, both on interior nodes with the theta2
    derivatives evaluated exactly from the Fourier data.
    """
    g = field.grid
    s = g.node_s()
    t = g.node_t()
    dth2_dx = 0.5 * (psi.psi1.derivative(s) - psi.psi2.derivative(t))
    dth2_dy = 0.5 * (psi.psi1.derivative(s) + psi.psi2.derivative(t))
    dmu_dx = (field.mu[2:, :] - field.mu[:-2, :]) / (2.0 * g.h)
    dlam_dy = (field.lam[:, 2:] - field.lam[:, :-2]) / (2.0 * g.h)
    r1 = np.abs(dmu_dx - field.lam[1:-1, :] * dth2_dx[1:-1, :])
    r2 = np.abs(dlam_dy + field.mu[:, 1:-1] * dth2_dy[:, 1:-1])
    return float(np.max(r1)), float(np.max(r2))


def mean_curvature_coeffs(field: MetricField, psi: AngleFunction):
    """(h0, h1) with (1/mu, 1/lambda)^t = R(theta2) (h0, h1)^t.

    These are the components of the mean curvature vector in the parallel
    normal frame.
    """
    field.check_sign()
    g = field.grid
    th2 = psi.theta2(g.node_s(), g.node_t())
    c, s = np.cos(th2), np.sin(th2)
    h0 = c / field.mu - s / field.lam
    h1 = s / field.mu + c / field.lam
    return h0, h1


def torus_field(psi: AngleFunction, grid: GridXY) -> MetricField:
    """Closed-form field lambda = -2 sin theta2, mu = 2 cos theta2."""
    th2 = psi.theta2(grid.node_s(), grid.node_t())
    field = MetricField(grid, -2.0 * np.sin(th2), 2.0 * np.cos(th2))
    field.check_sign()
    return field


def torus_cauchy_data(psi: AngleFunction, h: float) -> CauchyData:
    """The closed-form field restricted to s = 0, one period of t."""
    n = round(psi.period_t / h)
    if abs(n * h - psi.period_t) > 1e-9:
        raise DomainError("h must divide the t-period")
    t = h * np.arange(n)
    th2 = psi.theta2(0.0, t)
    return CauchyData(t, -2.0 * np.sin(th2), 2.0 * np.cos(th2), period=psi.period_t)
