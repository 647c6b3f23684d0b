import math

import numpy as np
import pytest

from flatspin.angle import AngleFunction, FourierSeries
from flatspin.errors import DomainError, SignLoss
from flatspin.grid import GridXY
from flatspin.hypsolve import (
    CauchyData,
    MetricField,
    mean_curvature_coeffs,
    pde_residual,
    solve_cauchy,
    torus_cauchy_data,
    torus_field,
)

TWO_PI = 2.0 * math.pi
FOURIER = AngleFunction(
    FourierSeries(TWO_PI, 3 * math.pi / 2, ((0.0, 0.3),)),
    FourierSeries(TWO_PI, 0.0, ((0.0, 0.2),)),
)
CONST = AngleFunction.constant(3 * math.pi / 2, 0.0)


def solve_on(n, psi=FOURIER, x_max=math.pi, y_max=math.pi):
    grid = GridXY.square(x_max, y_max, n)
    data = torus_cauchy_data(psi, grid.h)
    return solve_cauchy(psi, data, grid), grid


def test_constant_coefficients_give_constant_field():
    grid = GridXY.square(math.pi, math.pi, 32)
    n_t = round(TWO_PI / grid.h)
    t = grid.h * np.arange(n_t)
    data = CauchyData(t, np.full(n_t, -1.3), np.full(n_t, -0.7), period=TWO_PI)
    fld = solve_cauchy(CONST, data, grid)
    assert np.max(np.abs(fld.lam + 1.3)) <= 1e-13
    assert np.max(np.abs(fld.mu + 0.7)) <= 1e-13


def test_matches_closed_form_torus_field():
    fld, grid = solve_on(128)
    exact = torus_field(FOURIER, grid)
    err = max(
        np.max(np.abs(fld.lam - exact.lam)), np.max(np.abs(fld.mu - exact.mu))
    )
    assert err <= 5e-5


def test_second_order_convergence():
    errs = []
    for n in (64, 128, 256):
        fld, grid = solve_on(n)
        exact = torus_field(FOURIER, grid)
        errs.append(
            max(
                np.max(np.abs(fld.lam - exact.lam)),
                np.max(np.abs(fld.mu - exact.mu)),
            )
        )
    orders = [math.log2(errs[i] / errs[i + 1]) for i in range(2)]
    for o in orders:
        assert 1.7 <= o <= 2.3, (errs, orders)


def test_domain_of_dependence_exact():
    """Perturbing the data outside the backward cone of a probe node leaves
    its value bitwise unchanged (grid-aligned characteristics)."""
    n = 64
    grid = GridXY.square(math.pi / 2, math.pi / 2, n)
    data = torus_cauchy_data(FOURIER, grid.h)
    base = solve_cauchy(FOURIER, data, grid)

    # probe node (i, j) has s = (i + j) h, cone foot [t - s, t + s]
    i = j = n // 2
    s_probe = (i + j) * grid.h
    t_probe = (i - j) * grid.h
    # perturb at a data index far outside the cone (wrap distance > s)
    t_pert = t_probe + s_probe + math.pi / 2
    idx = round((t_pert % TWO_PI) / grid.h)
    lam0 = data.lam0.copy()
    lam0[idx] += 0.25
    pert = CauchyData(data.t, lam0, data.mu0, period=data.period)
    out = solve_cauchy(FOURIER, pert, grid)
    assert out.lam[i, j] == base.lam[i, j]
    assert out.mu[i, j] == base.mu[i, j]
    # and the perturbation does propagate somewhere
    assert np.max(np.abs(out.lam - base.lam)) >= 0.2


def test_nonperiodic_triangle_and_domain_error():
    h = math.pi / 32
    n_t = 64
    t = h * np.arange(n_t + 1)
    lam0 = np.full(n_t + 1, 1.0)
    mu0 = np.full(n_t + 1, 2.0)
    data = CauchyData(t, lam0, mu0, period=None)
    # a grid inside the triangle of determinacy works:
    # s in [8h, 24h], t in [16h, 32h], data feet within [0, 48h]
    grid = GridXY(16 * h, -8 * h, 8, 8, h)
    fld = solve_cauchy(CONST, data, grid)
    assert np.max(np.abs(fld.lam - 1.0)) <= 1e-13
    # a grid escaping the footprint raises
    big = GridXY(0.0, 0.0, 40, 40, h)
    with pytest.raises(DomainError):
        solve_cauchy(CONST, data, big)


def test_nonperiodic_agrees_with_periodic():
    n = 32
    h = math.pi / (2 * n)
    grid = GridXY(0.0, 0.0, n, n, h)
    per = torus_cauchy_data(FOURIER, h)
    # non-periodic data on [-pi, pi] covers the whole triangle of the grid
    t = h * np.arange(8 * n + 1) - math.pi
    th2 = FOURIER.theta2(0.0, t)
    nonper = CauchyData(t, -2 * np.sin(th2), 2 * np.cos(th2), period=None)
    a = solve_cauchy(FOURIER, per, grid)
    b = solve_cauchy(FOURIER, nonper, grid)
    assert np.max(np.abs(a.lam - b.lam)) <= 1e-13
    assert np.max(np.abs(a.mu - b.mu)) <= 1e-13


def test_misaligned_grid_raises():
    grid = GridXY(0.1, 0.0, 16, 16, math.pi / 16)
    data = torus_cauchy_data(FOURIER, grid.h)
    with pytest.raises(DomainError):
        solve_cauchy(FOURIER, data, grid)


def test_data_resolution_mismatch_raises():
    grid = GridXY.square(math.pi, math.pi, 32)
    data = torus_cauchy_data(FOURIER, math.pi / 64)
    with pytest.raises(DomainError):
        solve_cauchy(FOURIER, data, grid)


def test_cauchy_data_sign_check():
    t = np.linspace(0, 1, 8)
    with pytest.raises(SignLoss):
        CauchyData(t, np.ones(8), np.concatenate([np.ones(4), -np.ones(4)]))


def test_pde_residual_closed_form_second_order():
    vals = []
    for n in (64, 128):
        grid = GridXY.square(math.pi, math.pi, n)
        exact = torus_field(FOURIER, grid)
        vals.append(max(pde_residual(exact, FOURIER)))
    assert vals[0] / vals[1] > 3.0
    assert vals[1] <= 1e-4


def test_pde_residual_constant_zero():
    grid = GridXY.square(1.0, 1.0, 16)
    fld = MetricField(grid, np.full((17, 17), 2.0), np.full((17, 17), 0.5))
    assert max(pde_residual(fld, CONST)) <= 1e-14


def test_pde_residual_detects_node_perturbation():
    n = 32
    grid = GridXY.square(math.pi, math.pi, n)
    exact = torus_field(FOURIER, grid)
    base = pde_residual(exact, FOURIER)[1]
    lam = exact.lam.copy()
    lam[10, 10] += 0.01
    bumped = MetricField(grid, lam, exact.mu)
    r2 = pde_residual(bumped, FOURIER)[1]
    assert r2 >= 0.01 / (2 * grid.h) * 0.95


def test_the_two_formulations_agree():
    """Residuals of the theta2 system and the theta1 system coincide for
    conformal psi up to O(h^2) (they are the same equations)."""
    n = 64
    grid = GridXY.square(math.pi, math.pi, n)
    fld = torus_field(FOURIER, grid)
    s, t = grid.node_s(), grid.node_t()
    # theta1-form: d_x mu = lam d_y theta1 and d_y lam = -mu d_x theta1
    dth1_dy = 0.5 * (FOURIER.psi1.derivative(s) - FOURIER.psi2.derivative(t))
    dth1_dx = 0.5 * (FOURIER.psi1.derivative(s) + FOURIER.psi2.derivative(t))
    h = grid.h
    dmu_dx = (fld.mu[2:, :] - fld.mu[:-2, :]) / (2 * h)
    dlam_dy = (fld.lam[:, 2:] - fld.lam[:, :-2]) / (2 * h)
    r1b = np.max(np.abs(dmu_dx - fld.lam[1:-1, :] * dth1_dy[1:-1, :]))
    r2b = np.max(np.abs(dlam_dy + fld.mu[:, 1:-1] * dth1_dx[:, 1:-1]))
    r1, r2 = pde_residual(fld, FOURIER)
    assert abs(r1 - r1b) <= 1e-12 and abs(r2 - r2b) <= 1e-12


def test_mean_curvature_coeffs_rotation():
    grid = GridXY.square(1.0, 1.0, 8)
    th2 = 3 * math.pi / 4
    psi = AngleFunction.constant(th2 * 2, 0.0)  # theta2 = th2 everywhere
    lam = np.full((9, 9), -math.sqrt(2.0))
    fld = MetricField(grid, lam, lam.copy())
    h0, h1 = mean_curvature_coeffs(fld, psi)
    assert np.max(np.abs(h0 - 1.0)) <= 1e-12
    assert np.max(np.abs(h1)) <= 1e-12


def test_mean_curvature_coeffs_identity_rotation():
    grid = GridXY.square(1.0, 1.0, 8)
    psi = AngleFunction.constant(0.0, 0.0)
    lam = np.full((9, 9), 2.0)
    mu = np.full((9, 9), 4.0)
    fld = MetricField(grid, lam, mu)
    h0, h1 = mean_curvature_coeffs(fld, psi)
    assert np.max(np.abs(h0 - 0.25)) <= 1e-15
    assert np.max(np.abs(h1 - 0.5)) <= 1e-15


def test_mean_curvature_coeffs_roundtrip():
    rng = np.random.default_rng(0)
    grid = GridXY.square(1.0, 1.0, 8)
    lam = 1.0 + rng.random((9, 9))
    mu = 0.5 + rng.random((9, 9))
    fld = MetricField(grid, lam, mu)
    h0, h1 = mean_curvature_coeffs(fld, FOURIER)
    th2 = FOURIER.theta2(grid.node_s(), grid.node_t())
    c, s = np.cos(th2), np.sin(th2)
    assert np.max(np.abs(c * h0 + s * h1 - 1.0 / mu)) <= 1e-12
    assert np.max(np.abs(-s * h0 + c * h1 - 1.0 / lam)) <= 1e-12
