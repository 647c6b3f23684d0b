import math

import numpy as np
import pytest

from flatspin.angle import AngleFunction, FourierSeries
from flatspin.errors import DegenerateTangent, GridMismatch, SignLoss
from flatspin.grid import GridXY
from flatspin.hypsolve import MetricField, solve_cauchy, torus_cauchy_data, torus_field
from flatspin.lift import LiftFactor, LiftPath, lift_for_grid
from flatspin.surface import (
    SurfacePatch,
    XiField,
    assemble_xi,
    build_patch,
    check_second_form,
    dual_coframe,
    duality_residual,
    estimate_fundamental_forms,
    fund_forms_from_derivatives,
    gauss_conformality_residual,
    gauss_lift_agreement,
    integrate_xi,
    metric_residual,
)

TWO_PI = 2.0 * math.pi
CONST = AngleFunction.constant(3 * math.pi / 2, 0.0)
FOURIER = AngleFunction(
    FourierSeries(TWO_PI, 3 * math.pi / 2, ((0.0, 0.3),)),
    FourierSeries(TWO_PI, 0.0, ((0.0, 0.2),)),
)


def constant_field(grid, lam, mu):
    shape = (grid.nx + 1, grid.ny + 1)
    return MetricField(grid, np.full(shape, float(lam)), np.full(shape, float(mu)))


def trivial_lift(grid):
    """Constant g = 1 on the grid characteristics (not a lift of anything;
    assemble_xi treats the lift as data)."""
    n = grid.n_diag
    one = np.tile([1.0, 0.0, 0.0, 0.0], (n + 1, 1))
    return LiftPath(
        LiftFactor(grid.s_values(), one.copy()),
        LiftFactor(grid.t_values(), one.copy()),
    )


# ---------------------------------------------------------------- coframe


def test_dual_coframe_closed_form_example():
    grid = GridXY.square(1.0, 1.0, 8)
    psi = AngleFunction.constant(3 * math.pi / 2, 0.0)  # theta1 = 3pi/4
    fld = constant_field(grid, -math.sqrt(2), -math.sqrt(2))
    cof = dual_coframe(psi, fld)
    assert np.allclose(cof.w2x, -1.0) and np.allclose(cof.w2y, 1.0)
    assert np.allclose(cof.w3x, -1.0) and np.allclose(cof.w3y, -1.0)


def test_dual_coframe_identity_example():
    grid = GridXY.square(1.0, 1.0, 8)
    psi = AngleFunction.constant(0.0, 0.0)  # theta1 = 0
    fld = constant_field(grid, 1.0, 1.0)
    cof = dual_coframe(psi, fld)
    assert np.allclose(cof.w2x, 0.0) and np.allclose(cof.w2y, 1.0)
    assert np.allclose(cof.w3x, -1.0) and np.allclose(cof.w3y, 0.0)


def test_duality_invariant_generic():
    rng = np.random.default_rng(1)
    grid = GridXY.square(math.pi, math.pi, 16)
    fld = MetricField(
        grid,
        1.0 + rng.random((17, 17)),
        0.5 + rng.random((17, 17)),
    )
    cof = dual_coframe(FOURIER, fld)
    assert duality_residual(cof, FOURIER, fld) <= 1e-10


def test_dual_coframe_sign_loss():
    grid = GridXY.square(1.0, 1.0, 8)
    fld = constant_field(grid, 1.0, -1.0)
    with pytest.raises(SignLoss):
        dual_coframe(CONST, fld)


# ---------------------------------------------------------------- xi


def test_assemble_xi_trivial_spinor():
    grid = GridXY.square(1.0, 1.0, 8)
    shape = (9, 9)
    cofs = np.ones(shape)
    from flatspin.surface import CoframeField

    cof = CoframeField(grid, cofs, 0 * cofs, 0 * cofs, cofs)  # omega2=dx, omega3=dy
    xi = assemble_xi(trivial_lift(grid), cof)
    assert np.allclose(xi.xi_x, [0, 0, 1, 0], atol=1e-15)
    assert np.allclose(xi.xi_y, [0, 0, 0, 1], atol=1e-15)
    assert xi.membership_residual <= 1e-15


def test_assemble_xi_membership_random_lift():
    rng = np.random.default_rng(3)
    grid = GridXY.square(1.0, 1.0, 8)
    n = grid.n_diag
    q1 = rng.normal(size=(n + 1, 4))
    q1 /= np.linalg.norm(q1, axis=1)[:, None]
    q2 = rng.normal(size=(n + 1, 4))
    q2 /= np.linalg.norm(q2, axis=1)[:, None]
    lift = LiftPath(LiftFactor(grid.s_values(), q1), LiftFactor(grid.t_values(), q2))
    from flatspin.surface import CoframeField

    cof = CoframeField(
        grid,
        rng.normal(size=(9, 9)),
        rng.normal(size=(9, 9)),
        rng.normal(size=(9, 9)),
        rng.normal(size=(9, 9)),
    )
    xi = assemble_xi(lift, cof)
    assert xi.membership_residual <= 1e-12


def test_assemble_xi_grid_mismatch():
    grid = GridXY.square(1.0, 1.0, 8)
    other = GridXY.square(1.0, 1.0, 10)
    from flatspin.surface import CoframeField

    ones = np.ones((9, 9))
    cof = CoframeField(grid, ones, ones, ones, ones)
    with pytest.raises(GridMismatch):
        assemble_xi(trivial_lift(other), cof)


def test_integrate_xi_constant_form():
    grid = GridXY.square(1.0, 1.0, 8)
    xi_x = np.tile([0.0, 1.0, 0.0, 0.0], (9, 9, 1))
    xi_y = np.tile([0.0, 0.0, 2.0, 0.0], (9, 9, 1))
    patch = integrate_xi(XiField(grid, xi_x, xi_y, 0.0))
    xs, ys = np.meshgrid(grid.xs, grid.ys, indexing="ij")
    assert np.allclose(patch.F[..., 1], xs, atol=1e-14)
    assert np.allclose(patch.F[..., 2], 2 * ys, atol=1e-14)
    assert patch.diagnostics["closedness_residual"] <= 1e-14
    assert patch.diagnostics["path_independence"] <= 1e-14


def test_integrate_xi_detects_nonclosed():
    grid = GridXY.square(1.0, 1.0, 8)
    xs, ys = np.meshgrid(grid.xs, grid.ys, indexing="ij")
    xi_x = np.zeros((9, 9, 4))
    xi_y = np.zeros((9, 9, 4))
    eps = 1e-3
    xi_y[..., 1] = eps * xs  # d(eps x dy) = eps dx^dy != 0
    patch = integrate_xi(XiField(grid, xi_x, xi_y, 0.0))
    assert abs(patch.diagnostics["closedness_residual"] - eps) <= 1e-9


def test_closedness_residual_second_order_on_pipeline():
    vals = []
    for n in (32, 64):
        grid = GridXY.square(math.pi, math.pi, n)
        fld = torus_field(FOURIER, grid)
        patch = build_patch(FOURIER, fld)
        vals.append(patch.diagnostics["closedness_residual"])
    assert vals[0] / vals[1] > 3.0


# ------------------------------------------------- fundamental forms


def sphere_patch(n=128, half_width=math.pi / 3):
    """Unit sphere in R^3 x {0}; K = 1, K_N = 0."""
    h = 2 * math.pi / n
    grid = GridXY(0.0, -half_width, n // 2, int(2 * half_width / h), h)
    phi, th = np.meshgrid(grid.xs, grid.ys, indexing="ij")
    F = np.stack(
        [
            np.cos(th) * np.cos(phi),
            np.cos(th) * np.sin(phi),
            np.sin(th),
            np.zeros_like(th),
        ],
        axis=-1,
    )
    return SurfacePatch(grid, F, spherical=True)


def test_fund_forms_sphere_oracle():
    ff = estimate_fundamental_forms(sphere_patch())
    assert np.max(np.abs(ff.K - 1.0)) <= 5e-3
    assert np.max(np.abs(ff.KN)) <= 5e-3


def test_fund_forms_flat_plane():
    grid = GridXY.square(1.0, 1.0, 16)
    xs, ys = np.meshgrid(grid.xs, grid.ys, indexing="ij")
    F = np.stack([xs, ys, 0.3 * xs + 0.1 * ys, np.zeros_like(xs)], axis=-1)
    ff = estimate_fundamental_forms(SurfacePatch(grid, F))
    assert np.max(np.abs(ff.K)) <= 1e-12
    assert np.max(np.abs(ff.KN)) <= 1e-12


def test_fund_forms_complex_curve_oracle():
    """Graph of z -> z^2: at the origin K = -8 and |K_N| = 8 (shape
    operators [[2,0],[0,-2]] and [[0,2],[2,0]]); fourth-order stencils are
    exact on polynomials of this degree."""
    grid = GridXY(-0.5, -0.5, 10, 10, 0.1)
    xs, ys = np.meshgrid(grid.xs, grid.ys, indexing="ij")
    F = np.stack([xs, ys, xs**2 - ys**2, 2 * xs * ys], axis=-1)
    ff = estimate_fundamental_forms(SurfacePatch(grid, F))
    i = j = 3  # origin after trim=2: node (5,5) -> index 3
    assert abs(ff.K[i, j] + 8.0) <= 1e-9
    assert abs(abs(ff.KN[i, j]) - 8.0) <= 1e-9


def test_fund_forms_degenerate_tangent():
    grid = GridXY.square(1.0, 1.0, 8)
    xs, ys = np.meshgrid(grid.xs, grid.ys, indexing="ij")
    F = np.stack([xs + ys, xs + ys, np.zeros_like(xs), np.zeros_like(xs)], axis=-1)
    with pytest.raises(DegenerateTangent):
        estimate_fundamental_forms(SurfacePatch(grid, F))


def test_fund_forms_needs_five_by_five():
    grid = GridXY.square(1.0, 1.0, 3)
    F = np.zeros((4, 4, 4))
    with pytest.raises(ValueError):
        estimate_fundamental_forms(SurfacePatch(grid, F))


# ------------------------------------------------- synthesized patches


def solved_patch(n, psi=FOURIER):
    grid = GridXY.square(math.pi, math.pi, n)
    data = torus_cauchy_data(psi, grid.h)
    fld = solve_cauchy(psi, data, grid)
    return build_patch(psi, fld), fld


def test_patch_flatness_and_metric():
    patch, fld = solved_patch(128)
    ff = estimate_fundamental_forms(patch)
    k, kn = ff.max_abs_k()
    assert k <= 2e-4 and kn <= 2e-4
    assert patch.diagnostics["metric_residual"] <= 2e-3
    assert patch.diagnostics["membership_residual"] <= 1e-12
    assert patch.diagnostics["duality_residual"] <= 1e-10


def test_patch_flatness_converges():
    ks = []
    for n in (48, 96):
        patch, _ = solved_patch(n)
        ks.append(max(estimate_fundamental_forms(patch).max_abs_k()))
    assert ks[0] / ks[1] > 3.0


def test_second_form_closed_form():
    patch, fld = solved_patch(128)
    res = check_second_form(patch, fld, FOURIER)
    assert res["b22"] <= 5e-3
    assert res["b33"] <= 5e-3
    assert res["b23"] <= 5e-3


def test_second_form_detects_wrong_field():
    patch, fld = solved_patch(64)
    wrong = MetricField(fld.grid, 2.0 * fld.lam, fld.mu)
    res = check_second_form(patch, wrong, FOURIER)
    floor = 0.5 * np.min(np.abs(1.0 / fld.lam))
    assert res["b22"] >= floor * 0.9


def test_metric_residual_grid_check():
    patch, fld = solved_patch(32)
    other = GridXY.square(math.pi, math.pi, 16)
    bad = MetricField(other, np.ones((17, 17)), np.ones((17, 17)))
    with pytest.raises(GridMismatch):
        metric_residual(patch, bad)


def test_gauss_conformality_measured():
    vals = []
    for n in (64, 128):
        patch, _ = solved_patch(n)
        vals.append(gauss_conformality_residual(patch))
    assert vals[1] <= 1e-4
    assert vals[0] / vals[1] > 2.5


def test_gauss_measured_matches_hopf_lift():
    patch, _ = solved_patch(128)
    assert gauss_lift_agreement(patch) <= 1e-4


def test_path_independence_bound():
    patch, _ = solved_patch(64)
    d = patch.diagnostics
    area = math.pi * math.pi
    assert d["path_independence"] <= d["closedness_residual"] * area
