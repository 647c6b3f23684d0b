"""Assemble the closed R^4-valued 1-form xi and integrate it into a patch.

The chain is: dual coframe (omega2, omega3) from the angle and the metric
coefficients, xi = g^{-1}(omega2 J + omega3 K) hat(g) from the lift, then
F = integral of xi by trapezoidal path sums.  In split coordinates the
plus component of an embedded R^4 value *is* the real quaternion of the
identification used for tori, so every grid quantity is stored as a plain
(..., 4) array of those components:

    xi_+  = bar(g1) w g2            (w = omega2 J + omega3 K, real)
    nu0_+ = bar(g1) g2,  nu1_+ = bar(g1) I g2     (normal frame e0, e1)
    tau2_+ = bar(g1) J g2, tau3_+ = bar(g1) K g2  (tangent frame e2, e3)

Curvature diagnostics are recovered from F alone by finite differences so
they count as independent verification of flatness.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .angle import AngleFunction
from .errors import DegenerateTangent, GridMismatch, SignLoss
from .findiff import d1_fourth, d2_fourth
from .grid import GridXY
from .hypsolve import MetricField
from .lift import LiftPath, lift_for_grid
from .quaternions import qconj, qdot, qmul

__all__ = [
    "CoframeField",
    "XiField",
    "SurfacePatch",
    "FundForms",
    "dual_coframe",
    "duality_residual",
    "assemble_xi",
    "integrate_xi",
    "build_patch",
    "estimate_fundamental_forms",
    "fund_forms_from_derivatives",
    "check_second_form",
    "metric_residual",
    "gauss_from_frames",
    "measured_gauss",
    "gauss_conformality_residual",
]


@dataclass
class CoframeField:
    """Components of omega2 = w2x dx + w2y dy and omega3 likewise."""

    grid: GridXY
    w2x: np.ndarray
    w2y: np.ndarray
    w3x: np.ndarray
    w3y: np.ndarray


@dataclass
class XiField:
    """xi evaluated on (d_x, d_y); values as embedded-R^4 plus components."""

    grid: GridXY
    xi_x: np.ndarray  # (nx+1, ny+1, 4)
    xi_y: np.ndarray
    membership_residual: float


@dataclass
class SurfacePatch:
    grid: GridXY
    F: np.ndarray  # (nx+1, ny+1, 4)
    frames: dict | None = None  # nu0, nu1, tau2, tau3 grids
    spherical: bool = False
    diagnostics: dict = field(default_factory=dict)

    @property
    def nx(self):
        return self.grid.nx

    @property
    def ny(self):
        return self.grid.ny


def dual_coframe(psi: AngleFunction, fld: MetricField) -> CoframeField:
    """Duals of e2 = sin(t1)/lambda d_x + cos(t1)/mu d_y and
    e3 = -cos(t1)/lambda d_x + sin(t1)/mu d_y.

    The 2x2 frame matrix inverts in closed form to
    omega2 = lambda sin(t1) dx + mu cos(t1) dy,
    omega3 = -lambda cos(t1) dx + mu sin(t1) dy.
    """
    fld.check_sign()
    g = fld.grid
    t1 = psi.theta1(g.node_s(), g.node_t())
    c, s = np.cos(t1), np.sin(t1)
    return CoframeField(g, fld.lam * s, fld.mu * c, -fld.lam * c, fld.mu * s)


def duality_residual(cof: CoframeField, psi: AngleFunction,
                     fld: MetricField) -> float:
    """max |omega_i(e_j) - delta_ij| over the grid."""
    g = fld.grid
    t1 = psi.theta1(g.node_s(), g.node_t())
    c, s = np.cos(t1), np.sin(t1)
    e2 = (s / fld.lam, c / fld.mu)
    e3 = (-c / fld.lam, s / fld.mu)
    res = 0.0
    for (wx, wy), want in (
        ((cof.w2x, cof.w2y), (1.0, 0.0)),
        ((cof.w3x, cof.w3y), (0.0, 1.0)),
    ):
        res = max(res, float(np.max(np.abs(wx * e2[0] + wy * e2[1] - want[0]))))
        res = max(res, float(np.max(np.abs(wx * e3[0] + wy * e3[1] - want[1]))))
    return res


def _aligned_indices(lift: LiftPath, grid: GridXY):
    """Index arrays mapping grid nodes into the lift factor samples."""
    s_vals = grid.s_values()
    t_vals = grid.t_values()
    f1, f2 = lift.factor1, lift.factor2
    scale = max(1.0, float(np.max(np.abs(s_vals))), float(np.max(np.abs(t_vals))))
    if len(f1.params) != len(s_vals) or len(f2.params) != len(t_vals):
        raise GridMismatch("lift factors not sampled on the grid characteristics")
    if (np.max(np.abs(f1.params - s_vals)) > 1e-9 * scale
            or np.max(np.abs(f2.params - t_vals)) > 1e-9 * scale):
        raise GridMismatch("lift factor parameters do not match the grid")
    return grid.s_index(), grid.t_index()


def frame_grids(lift: LiftPath, grid: GridXY) -> dict:
    """Ambient images of the adapted frame (e0, e1, e2, e3) on the grid."""
    si, ti = _aligned_indices(lift, grid)
    g1c = qconj(lift.factor1.samples)[si]  # bar(g1) at every node
    g2 = lift.factor2.samples[ti]
    basis = {
        "nu0": np.array([1.0, 0, 0, 0]),
        "nu1": np.array([0, 1.0, 0, 0]),
        "tau2": np.array([0, 0, 1.0, 0]),
        "tau3": np.array([0, 0, 0, 1.0]),
    }
    return {k: qmul(g1c, qmul(v, g2)) for k, v in basis.items()}


def assemble_xi(lift: LiftPath, cof: CoframeField) -> XiField:
    """xi = g^{-1}(omega2 J + omega3 K) hat(g) on both coordinate directions.

    The membership residual reports max |hat(bar(xi)) + xi| over the grid,
    i.e. the distance of the values from the embedded R^4.
    """
    grid = cof.grid
    si, ti = _aligned_indices(lift, grid)
    g1 = lift.factor1.samples[si]
    g2 = lift.factor2.samples[ti]
    g1c = qconj(g1)
    g2c = qconj(g2)

    zero = np.zeros_like(cof.w2x)
    res = 0.0
    out = []
    for wa, wb in ((cof.w2x, cof.w3x), (cof.w2y, cof.w3y)):
        w = np.stack([zero, zero, wa, wb], axis=-1)
        plus = qmul(g1c, qmul(w, g2))
        minus = qmul(g2c, qmul(w, g1))
        res = max(res, float(np.max(np.abs(minus + qconj(plus)))))
        out.append(plus)
    return XiField(grid, out[0], out[1], res)


def integrate_xi(xi: XiField) -> SurfacePatch:
    """F = path integral of xi from the grid origin, trapezoidal rule.

    Row-then-column from F(0,0) = 0.  Diagnostics carry the plaquette
    closedness residual (max loop integral / cell area) and the largest
    disagreement with the column-then-row integration, which is bounded by
    residual * area when xi is closed.
    """
    g = xi.grid
    h = g.h
    seg_x = 0.5 * h * (xi.xi_x[:-1] + xi.xi_x[1:])        # (nx, ny+1, 4)
    seg_y = 0.5 * h * (xi.xi_y[:, :-1] + xi.xi_y[:, 1:])  # (nx+1, ny, 4)

    # row first (along x at y0), then columns
    F = np.zeros((g.nx + 1, g.ny + 1, 4))
    F[1:, 0] = np.cumsum(seg_x[:, 0], axis=0)
    F[:, 1:] = F[:, :1] + np.cumsum(seg_y, axis=1)

    # alternative order for the path-independence diagnostic
    Fc = np.zeros_like(F)
    Fc[0, 1:] = np.cumsum(seg_y[0], axis=0)
    Fc[1:, :] = Fc[:1, :] + np.cumsum(seg_x, axis=0)

    loops = seg_x[:, :-1] + seg_y[1:, :] - seg_x[:, 1:] - seg_y[:-1, :]
    closedness = float(np.max(np.linalg.norm(loops, axis=-1))) / (h * h)
    path_dev = float(np.max(np.abs(F - Fc)))

    return SurfacePatch(
        g,
        F,
        diagnostics={
            "closedness_residual": closedness,
            "path_independence": path_dev,
            "membership_residual": xi.membership_residual,
        },
    )


def build_patch(psi: AngleFunction, fld: MetricField,
                lift: LiftPath | None = None) -> SurfacePatch:
    """Full synthesis: coframe, xi, F, frames, basic diagnostics."""
    if lift is None:
        lift = lift_for_grid(psi, fld.grid)
    cof = dual_coframe(psi, fld)
    xi = assemble_xi(lift, cof)
    patch = integrate_xi(xi)
    patch.frames = frame_grids(lift, fld.grid)
    patch.diagnostics["duality_residual"] = duality_residual(cof, psi, fld)
    patch.diagnostics["metric_residual"] = metric_residual(patch, fld)
    return patch


# ----------------------------------------------------------------------
# independent curvature estimation
# ----------------------------------------------------------------------


@dataclass
class FundForms:
    """First/second fundamental data on the evaluation nodes."""

    E: np.ndarray
    F: np.ndarray
    G: np.ndarray
    K: np.ndarray
    KN: np.ndarray
    b1: np.ndarray  # second-form components on the first recovered normal
    b2: np.ndarray  # (..., 3) each: (xx, xy, yy)

    def max_abs_k(self) -> tuple[float, float]:
        return float(np.max(np.abs(self.K))), float(np.max(np.abs(self.KN)))


def fund_forms_from_derivatives(Fx, Fy, Fxx, Fxy, Fyy) -> FundForms:
    """Curvatures from sampled first/second derivatives of an immersion.

    The normal plane is recovered by orthonormalizing against the tangent
    (batch SVD); the recovered frame is re-oriented so (Fx, Fy, n1, n2) is
    positively oriented, which fixes the sign of K_N.  K comes from the
    Gauss equation with the normal-space inner product, K_N from the
    commutator of the two shape operators.
    """
    E = qdot(Fx, Fx)
    Fm = qdot(Fx, Fy)
    G = qdot(Fy, Fy)
    W = E * G - Fm * Fm
    if np.any(W <= 1e-12 * np.maximum(E * G, 1e-300)):
        raise DegenerateTangent("tangent vectors linearly dependent at a node")

    T = np.stack([Fx, Fy], axis=-1)  # (..., 4, 2)
    U, sv, _ = np.linalg.svd(T)
    n1 = U[..., 2]
    n2 = U[..., 3]
    if np.any(sv[..., 1] <= 1e-10 * sv[..., 0]):
        raise DegenerateTangent("tangent vectors linearly dependent at a node")
    # orient the normal frame with the tangent pair
    det = np.linalg.det(np.stack([Fx, Fy, n1, n2], axis=-1))
    n2 = np.where(det[..., None] >= 0.0, n2, -n2)

    def normal_comps(D2):
        return qdot(D2, n1), qdot(D2, n2)

    b1 = np.stack(
        [normal_comps(D)[0] for D in (Fxx, Fxy, Fyy)], axis=-1
    )
    b2 = np.stack(
        [normal_comps(D)[1] for D in (Fxx, Fxy, Fyy)], axis=-1
    )

    K = (
        b1[..., 0] * b1[..., 2] - b1[..., 1] ** 2
        + b2[..., 0] * b2[..., 2] - b2[..., 1] ** 2
    ) / W

    # shape operators S_k = I^{-1} II_k in the coordinate basis
    def shape(b):
        II = np.stack(
            [
                np.stack([b[..., 0], b[..., 1]], axis=-1),
                np.stack([b[..., 1], b[..., 2]], axis=-1),
            ],
            axis=-2,
        )
        Iinv = np.stack(
            [
                np.stack([G, -Fm], axis=-1),
                np.stack([-Fm, E], axis=-1),
            ],
            axis=-2,
        ) / W[..., None, None]
        return Iinv @ II

    S1 = shape(b1)
    S2 = shape(b2)
    C = S1 @ S2 - S2 @ S1
    I2 = np.stack(
        [np.stack([E, Fm], axis=-1), np.stack([Fm, G], axis=-1)], axis=-2
    )
    M = I2 @ C
    KN = (M[..., 1, 0] - (Fm / E) * M[..., 0, 0]) / np.sqrt(W)

    return FundForms(E, Fm, G, K, KN, b1, b2)


def _patch_derivatives(patch: SurfacePatch):
    h = patch.grid.h
    F = patch.F
    Fx = d1_fourth(F, h, axis=0)
    Fy = d1_fourth(F, h, axis=1)
    Fxx = d2_fourth(F, h, axis=0)
    Fyy = d2_fourth(F, h, axis=1)
    Fxy = d1_fourth(Fx, h, axis=1)
    return Fx, Fy, Fxx, Fxy, Fyy


def estimate_fundamental_forms(patch: SurfacePatch, trim: int = 2) -> FundForms:
    """Finite-difference fundamental forms of a patch, edges trimmed.

    Needs at least a 5x5 grid (aligned with the one-sided stencil width);
    trim=2 drops the one-sided rows where truncation constants are larger.
    """
    if patch.nx < 4 or patch.ny < 4:
        raise ValueError("patch grid must be at least 5x5")
    Fx, Fy, Fxx, Fxy, Fyy = _patch_derivatives(patch)
    sl = (slice(trim, patch.nx + 1 - trim), slice(trim, patch.ny + 1 - trim))
    return fund_forms_from_derivatives(
        Fx[sl], Fy[sl], Fxx[sl], Fxy[sl], Fyy[sl]
    )


def metric_residual(patch: SurfacePatch, fld: MetricField, trim: int = 2) -> float:
    """max deviation of (|F_x|^2, |F_y|^2, F_x.F_y) from (lambda^2, mu^2, 0)."""
    if not patch.grid.same_layout(fld.grid):
        raise GridMismatch("patch and field grids differ")
    h = patch.grid.h
    Fx = d1_fourth(patch.F, h, axis=0)
    Fy = d1_fourth(patch.F, h, axis=1)
    sl = (slice(trim, patch.nx + 1 - trim), slice(trim, patch.ny + 1 - trim))
    r = max(
        float(np.max(np.abs(qdot(Fx, Fx)[sl] - fld.lam[sl] ** 2))),
        float(np.max(np.abs(qdot(Fy, Fy)[sl] - fld.mu[sl] ** 2))),
        float(np.max(np.abs(qdot(Fx, Fy)[sl]))),
    )
    return r


def check_second_form(patch: SurfacePatch, fld: MetricField,
                      psi: AngleFunction, trim: int = 2) -> dict:
    """Measured second fundamental form against the closed form.

    In the frames u2 = d_x/lambda, u3 = d_y/mu and u0, u1 (normal frame
    rotated by theta2) the closed form is B(u2,u2) = (2/lambda) u1,
    B(u3,u3) = (2/mu) u0, B(u2,u3) = 0.  The measured side projects the
    coordinate second derivatives of F onto the measured normal space.
    """
    if patch.frames is None:
        raise ValueError("patch carries no frame grids")
    if not patch.grid.same_layout(fld.grid):
        raise GridMismatch("patch and field grids differ")
    g = patch.grid
    Fx, Fy, Fxx, Fxy, Fyy = _patch_derivatives(patch)
    sl = (slice(trim, g.nx + 1 - trim), slice(trim, g.ny + 1 - trim))
    Fx, Fy = Fx[sl], Fy[sl]
    Fxx, Fxy, Fyy = Fxx[sl], Fxy[sl], Fyy[sl]

    E = qdot(Fx, Fx)
    Fm = qdot(Fx, Fy)
    G = qdot(Fy, Fy)
    W = E * G - Fm * Fm

    def perp(D):
        # remove the tangential part: D - a Fx - b Fy with I^{-1} coefficients
        dx = qdot(D, Fx)
        dy = qdot(D, Fy)
        a = (G * dx - Fm * dy) / W
        b = (E * dy - Fm * dx) / W
        return D - a[..., None] * Fx - b[..., None] * Fy

    lam = fld.lam[sl]
    mu = fld.mu[sl]
    th2 = psi.theta2(g.node_s(), g.node_t())[sl]
    nu0 = patch.frames["nu0"][sl]
    nu1 = patch.frames["nu1"][sl]
    u0 = np.cos(th2)[..., None] * nu0 + np.sin(th2)[..., None] * nu1
    u1 = -np.sin(th2)[..., None] * nu0 + np.cos(th2)[..., None] * nu1

    b22 = perp(Fxx) / (lam ** 2)[..., None] - (2.0 / lam)[..., None] * u1
    b33 = perp(Fyy) / (mu ** 2)[..., None] - (2.0 / mu)[..., None] * u0
    b23 = perp(Fxy) / (lam * mu)[..., None]

    return {
        "b22": float(np.max(np.linalg.norm(b22, axis=-1))),
        "b33": float(np.max(np.linalg.norm(b33, axis=-1))),
        "b23": float(np.max(np.linalg.norm(b23, axis=-1))),
    }


# ----------------------------------------------------------------------
# Gauss map diagnostics
# ----------------------------------------------------------------------


def _wedge_bivector(u, v):
    """Oriented-plane bivector of two 4-vectors as split components.

    The wedge u ^ v maps to (w23 + sigma w01) I + (w31 + sigma w02) J +
    (w12 + sigma w03) K under the Clifford identification; returned as the
    (plus, minus) pair of real 3-vectors in (I, J, K) order.
    """
    w = lambda i, j: u[..., i] * v[..., j] - u[..., j] * v[..., i]
    a1, a2 = w(2, 3), w(0, 1)
    b1, b2 = w(3, 1), w(0, 2)
    c1, c2 = w(1, 2), w(0, 3)
    plus = np.stack([a1 + a2, b1 + b2, c1 + c2], axis=-1)
    minus = np.stack([a1 - a2, b1 - b2, c1 - c2], axis=-1)
    return plus, minus


def measured_gauss(Fx, Fy):
    """Unit bivector of the measured tangent planes, split components.

    Gram-Schmidt keeps the (d_x, d_y) orientation, so this is the oriented
    Gauss map of the immersion.
    """
    E = qdot(Fx, Fx)
    u = Fx / np.sqrt(E)[..., None]
    v = Fy - qdot(Fy, u)[..., None] * u
    v = v / np.linalg.norm(v, axis=-1)[..., None]
    return _wedge_bivector(u, v)


def gauss_from_frames(patch: SurfacePatch):
    """hopf(g) on the grid from the frame images: G = dF(e2) ^ dF(e3)."""
    if patch.frames is None:
        raise ValueError("patch carries no frame grids")
    return _wedge_bivector(patch.frames["tau2"], patch.frames["tau3"])


def gauss_conformality_residual(patch: SurfacePatch, trim: int = 3) -> float:
    """max |dG(d_y) - sigma dG(d_x)| for the measured Gauss map.

    sigma acts on the split pair by (plus, minus) -> (plus, -minus), so the
    residual is max(|d_y G+ - d_x G+|, |d_y G- + d_x G-|).
    """
    h = patch.grid.h
    Fx = d1_fourth(patch.F, h, axis=0)
    Fy = d1_fourth(patch.F, h, axis=1)
    gp, gm = measured_gauss(Fx, Fy)
    sl = (slice(trim, patch.nx + 1 - trim), slice(trim, patch.ny + 1 - trim))
    rp = d1_fourth(gp, h, axis=1) - d1_fourth(gp, h, axis=0)
    rm = d1_fourth(gm, h, axis=1) + d1_fourth(gm, h, axis=0)
    return max(float(np.max(np.abs(rp[sl]))), float(np.max(np.abs(rm[sl]))))


def gauss_lift_agreement(patch: SurfacePatch, trim: int = 2) -> float:
    """Distance between the measured Gauss map and hopf(g) from the lift."""
    h = patch.grid.h
    Fx = d1_fourth(patch.F, h, axis=0)
    Fy = d1_fourth(patch.F, h, axis=1)
    mp, mm = measured_gauss(Fx, Fy)
    hp, hm = gauss_from_frames(patch)
    sl = (slice(trim, patch.nx + 1 - trim), slice(trim, patch.ny + 1 - trim))
    return max(
        float(np.max(np.abs(mp[sl] - hp[sl]))),
        float(np.max(np.abs(mm[sl] - hm[sl]))),
    )
