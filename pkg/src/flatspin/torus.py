"""Flat tori in S^3: validation, product-formula build, Kitagawa data,
and the structure of the Gauss map image.

A torus is the quotient of the (s, t) plane by a lattice generated by
integer multiples (m_i S, n_i T) of the two angle periods.  The immersion
is F = bar(g1(s)) g2(t) in the real quaternions, with g1, g2 the two
horizontal-lift factors; everything else here is bookkeeping around that
formula: closure of the factors, the admissible range of theta2, spherical
curve diagnostics, and fundamental-domain integrals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .angle import AngleFunction
from .errors import (
    LatticeError,
    LatticeParity,
    NoAdmissibleAlpha,
    NotClosed,
    NotImmersed,
)
from .findiff import d1_periodic, d2_periodic
from .lift import ClosureClass, LiftPath, integrate_factor, integrate_lift, monodromy_class
from .quaternions import Spinor, hopf, qconj, qdot, qmul, qnorm
from .surface import FundForms, fund_forms_from_derivatives, measured_gauss

__all__ = [
    "TorusSpec",
    "TorusValidation",
    "TorusPatch",
    "SphereCurve",
    "KitagawaData",
    "GaussImageData",
    "validate_torus",
    "build_torus",
    "torus_metric_residual",
    "torus_fundamental_forms",
    "kitagawa_extract",
    "gauss_image",
    "sphere_curve",
    "gauss_pointwise_residual",
    "lattice_invariance_residual",
]


@dataclass(frozen=True)
class TorusSpec:
    """Angle data plus the integer lattice ((m1, n1), (m2, n2)).

    Generators are (m_i S, n_i T) in the characteristic coordinates; the
    gcd conditions make the two coordinate subgroups exactly S Z and T Z.
    """

    psi: AngleFunction
    lattice: tuple[tuple[int, int], tuple[int, int]]

    def __post_init__(self):
        (m1, n1), (m2, n2) = self.lattice
        for v in (m1, n1, m2, n2):
            if not isinstance(v, int):
                raise LatticeError("lattice entries must be integers")
        det = m1 * n2 - m2 * n1
        if det == 0:
            raise LatticeError("lattice generators are linearly dependent")
        if math.gcd(abs(m1), abs(m2)) != 1:
            raise LatticeError("gcd(m1, m2) must be 1")
        if math.gcd(abs(n1), abs(n2)) != 1:
            raise LatticeError("gcd(n1, n2) must be 1")

    @property
    def det(self) -> int:
        (m1, n1), (m2, n2) = self.lattice
        return m1 * n2 - m2 * n1

    def parity_compatible(self) -> bool:
        """m_i = n_i (mod 2) for both generators (antiperiodic condition)."""
        return all((m - n) % 2 == 0 for m, n in self.lattice)

    def to_dict(self) -> dict:
        return {"psi": self.psi.to_dict(), "lattice": [list(g) for g in self.lattice]}


@dataclass
class TorusValidation:
    psi1_range: tuple[float, float]
    psi2_range: tuple[float, float]
    theta2_range: tuple[float, float]
    k_interval: int
    alpha_interval: tuple[float, float]
    closure: ClosureClass
    lattice_det: int
    parity_required: bool

    def to_dict(self) -> dict:
        return {
            "psi1_range": list(self.psi1_range),
            "psi2_range": list(self.psi2_range),
            "theta2_range": list(self.theta2_range),
            "k_interval": self.k_interval,
            "alpha_interval": list(self.alpha_interval),
            "closure": self.closure.kind,
            "closure_defect": self.closure.defect,
            "lattice_det": self.lattice_det,
            "parity_required": self.parity_required,
        }


def _interval_k(lo: float, hi: float) -> int | None:
    """Integer k with (2k+1) pi < lo <= hi < (2k+2) pi, if one exists."""
    k0 = math.floor((lo / math.pi - 1.0) / 2.0)
    for k in (k0 - 1, k0, k0 + 1):
        if (2 * k + 1) * math.pi < lo and hi < (2 * k + 2) * math.pi:
            return k
    return None


def validate_torus(spec: TorusSpec, n_lift: int = 1024,
                   n_range: int = 4096) -> TorusValidation:
    """Run every admissibility check; raise the first failure.

    Order: the theta2 range condition (NotImmersed), then the closure of
    the lift factors (NotClosed), then the lattice parity in the
    antiperiodic case (LatticeParity).  Ranges are certified by sampled
    extrema padded with the Fourier Lipschitz constant.
    """
    r1 = spec.psi.psi1.range_bounds(n_range)
    r2 = spec.psi.psi2.range_bounds(n_range)
    lo = r1[0] - r2[1]
    hi = r1[1] - r2[0]
    k = _interval_k(lo, hi)
    if k is None:
        raise NotImmersed(
            f"psi1 - psi2 range ({lo:.6f}, {hi:.6f}) not inside an interval "
            f"((2k+1) pi, (2k+2) pi); theta2 meets a multiple of pi/2"
        )

    path = integrate_lift(spec.psi, n_lift, n_lift)
    closure = monodromy_class(path)
    if closure.kind == "open":
        raise NotClosed(
            f"lift monodromy is not +-1 (defect {closure.defect:.3e})",
            defect=closure.defect,
        )

    parity_required = closure.kind == "antiperiodic"
    if parity_required and not spec.parity_compatible():
        raise LatticeParity(
            "antiperiodic lift needs m_i = n_i (mod 2) for both generators"
        )

    alpha_interval = (r2[1] + (2 * k + 1) * math.pi, r1[0])
    return TorusValidation(
        psi1_range=r1,
        psi2_range=r2,
        theta2_range=(lo / 2.0, hi / 2.0),
        k_interval=k,
        alpha_interval=alpha_interval,
        closure=closure,
        lattice_det=spec.det,
        parity_required=parity_required,
    )


@dataclass
class TorusPatch:
    """F on the (s, t) rectangle [0, p S] x [0, p T], endpoints included.

    p is 1 for periodic factors and 2 for antiperiodic ones, so the stored
    grid is exactly doubly periodic and wrap-around stencils are valid.
    """

    s: np.ndarray
    t: np.ndarray
    F: np.ndarray  # (n1+1, n2+1, 4) real-quaternion values
    lift: LiftPath
    spec: TorusSpec
    p_cover: int
    spherical: bool = True
    diagnostics: dict = field(default_factory=dict)

    @property
    def hs(self) -> float:
        return float(self.s[1] - self.s[0])

    @property
    def ht(self) -> float:
        return float(self.t[1] - self.t[0])

    def periodic_core(self) -> np.ndarray:
        """Samples without the duplicated right/top edges."""
        return self.F[:-1, :-1]

    def unit_deviation(self) -> float:
        return float(np.max(np.abs(qnorm(self.F) - 1.0)))


def build_torus(spec: TorusSpec, n1: int, n2: int,
                force: bool = False) -> TorusPatch:
    """F(s_i, t_j) = bar(g1(s_i)) g2(t_j) over a doubly periodic rectangle."""
    if force:
        p = 1
        validation = None
    else:
        validation = validate_torus(spec)
        p = 1 if validation.closure.kind == "periodic" else 2
    S, T = spec.psi.period_s, spec.psi.period_t
    f1 = integrate_factor(spec.psi.psi1, 0.0, p * S, n1)
    f2 = integrate_factor(spec.psi.psi2, 0.0, p * T, n2)
    F = qmul(qconj(f1.samples)[:, None, :], f2.samples[None, :, :])
    patch = TorusPatch(f1.params, f2.params, F, LiftPath(f1, f2), spec, p)
    if validation is not None:
        patch.diagnostics["validation"] = validation.to_dict()
    patch.diagnostics["unit_deviation"] = patch.unit_deviation()
    return patch


def _xy_derivatives(patch: TorusPatch, order: int = 1):
    """Periodic (x, y) derivatives of F through d_x = d_s + d_t etc."""
    core = patch.periodic_core()
    Fs = d1_periodic(core, patch.hs, axis=0)
    Ft = d1_periodic(core, patch.ht, axis=1)
    Fx = Fs + Ft
    Fy = Fs - Ft
    if order == 1:
        return Fx, Fy
    Fss = d2_periodic(core, patch.hs, axis=0)
    Ftt = d2_periodic(core, patch.ht, axis=1)
    Fst = d1_periodic(Fs, patch.ht, axis=1)
    Fxx = Fss + 2.0 * Fst + Ftt
    Fyy = Fss - 2.0 * Fst + Ftt
    Fxy = Fss - Ftt
    return Fx, Fy, Fxx, Fxy, Fyy


def torus_metric_residual(patch: TorusPatch, spec: TorusSpec | None = None) -> float:
    """Deviation of the measured metric from 4(sin^2 t2 dx^2 + cos^2 t2 dy^2)."""
    if spec is None:
        spec = patch.spec
    Fx, Fy = _xy_derivatives(patch)
    s = patch.s[:-1][:, None]
    t = patch.t[:-1][None, :]
    th2 = spec.psi.theta2(s, t)
    return max(
        float(np.max(np.abs(qdot(Fx, Fx) - 4.0 * np.sin(th2) ** 2))),
        float(np.max(np.abs(qdot(Fy, Fy) - 4.0 * np.cos(th2) ** 2))),
        float(np.max(np.abs(qdot(Fx, Fy)))),
    )


def torus_fundamental_forms(patch: TorusPatch) -> FundForms:
    """Independent curvature estimate on the periodic grid."""
    Fx, Fy, Fxx, Fxy, Fyy = _xy_derivatives(patch, order=2)
    return fund_forms_from_derivatives(Fx, Fy, Fxx, Fxy, Fyy)


# ----------------------------------------------------------------------
# spherical curves
# ----------------------------------------------------------------------


@dataclass
class SphereCurve:
    """Closed curve on S^2 with measured speed and geodesic curvature.

    Curvature uses <c'', n x c'>/|c'|^3 with n the inner unit normal -c.
    """

    params: np.ndarray       # (n,) uniform, period implied, no endpoint
    points: np.ndarray       # (n, 3)
    period: float
    speed: np.ndarray
    arclength: np.ndarray    # cumulative, arclength[0] = 0
    curvature: np.ndarray

    def total_curvature(self) -> float:
        h = self.period / len(self.params)
        return float(np.sum(self.curvature * self.speed) * h)

    def curvature_window_range(self) -> float:
        """max - min of the cumulative curvature integral; the set of
        window integrals over all subintervals is [-(that), +(that)]."""
        h = self.period / len(self.params)
        c = np.concatenate([[0.0], np.cumsum(self.curvature * self.speed * h)])
        return float(np.max(c) - np.min(c))

    def unit_deviation(self) -> float:
        return float(np.max(np.abs(np.linalg.norm(self.points, axis=1) - 1.0)))


def sphere_curve(params: np.ndarray, quats: np.ndarray, axis,
                 period: float) -> SphereCurve:
    """Project a quaternion curve by q -> bar(q) axis q and measure it.

    quats cover one period without the duplicate endpoint; the projection
    is insensitive to the antiperiodic sign, so the image is periodic.
    """
    axis = np.asarray(axis, dtype=float)
    pts = qmul(qconj(quats), qmul(axis, quats))[:, 1:]
    h = period / len(params)
    d1 = d1_periodic(pts, h, axis=0)
    d2 = d2_periodic(pts, h, axis=0)
    speed = np.linalg.norm(d1, axis=1)
    inner_cross = -np.cross(pts, d1)
    curvature = np.sum(d2 * inner_cross, axis=1) / speed**3
    seg = 0.5 * (speed[1:] + speed[:-1]) * h
    arclength = np.concatenate([[0.0], np.cumsum(seg)])
    return SphereCurve(params, pts, period, speed, arclength, curvature)


@dataclass
class KitagawaData:
    alpha: float
    k_interval: int
    curve1: SphereCurve
    curve2: SphereCurve
    curvature_range1: tuple[float, float]
    curvature_range2: tuple[float, float]
    disjoint: bool
    sin_margins: tuple[float, float]
    curvature_residuals: tuple[float, float]
    asymptotic_residuals: tuple[float, float]

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "k_interval": self.k_interval,
            "curvature_range1": list(self.curvature_range1),
            "curvature_range2": list(self.curvature_range2),
            "disjoint": self.disjoint,
            "sin_margins": list(self.sin_margins),
            "curvature_residuals": list(self.curvature_residuals),
            "asymptotic_residuals": list(self.asymptotic_residuals),
        }


def kitagawa_extract(spec: TorusSpec, n: int = 1024,
                     alpha: float | None = None) -> KitagawaData:
    """Curves gamma_i = bar(g_i) J_alpha g_i with curvature diagnostics.

    alpha defaults to the midpoint of the admissible interval
    (max psi2 + (2k+1) pi, min psi1); the geodesic curvatures must then be
    cot(psi_i - alpha) with disjoint ranges, and g_i must be the
    asymptotic lift of gamma_i: p_alpha(g_i) = (gamma_i, gamma_i'/|.|).
    """
    validation = validate_torus(spec, n_lift=max(256, n // 2))
    lo, hi = validation.alpha_interval
    if not lo < hi:
        raise NoAdmissibleAlpha(f"empty admissible interval ({lo}, {hi})")
    if alpha is None:
        alpha = 0.5 * (lo + hi)

    S, T = spec.psi.period_s, spec.psi.period_t
    f1 = integrate_factor(spec.psi.psi1, 0.0, S, n)
    f2 = integrate_factor(spec.psi.psi2, 0.0, T, n)
    j_alpha = np.array([0.0, 0.0, math.cos(alpha), math.sin(alpha)])
    i_axis = np.array([0.0, 1.0, 0.0, 0.0])

    curves = []
    margins = []
    curv_res = []
    asym_res = []
    for f, series, period in ((f1, spec.psi.psi1, S), (f2, spec.psi.psi2, T)):
        params = f.params[:-1]
        quats = f.samples[:-1]
        psi_vals = series(params)
        margin = float(np.min(np.sin(psi_vals - alpha)))
        pad = series.lipschitz_bound() * (period / len(params)) / 2.0
        if margin - pad <= 0.0:
            raise NoAdmissibleAlpha(
                f"sin(psi - alpha) not positive for alpha = {alpha}"
            )
        margins.append(margin)
        curve = sphere_curve(params, quats, j_alpha, period)
        curves.append(curve)
        curv_res.append(
            float(np.max(np.abs(curve.curvature - 1.0 / np.tan(psi_vals - alpha))))
        )
        # asymptotic lift: p_alpha(g) = (gamma, gamma'/|gamma'|)
        tangent_alg = qmul(qconj(quats), qmul(i_axis, quats))[:, 1:]
        h = period / len(params)
        d1 = d1_periodic(curve.points, h, axis=0)
        tangent_meas = d1 / np.linalg.norm(d1, axis=1)[:, None]
        asym_res.append(float(np.max(np.abs(tangent_meas - tangent_alg))))

    rng1 = (float(np.min(curves[0].curvature)), float(np.max(curves[0].curvature)))
    rng2 = (float(np.min(curves[1].curvature)), float(np.max(curves[1].curvature)))
    disjoint = rng1[1] < rng2[0] or rng2[1] < rng1[0]

    return KitagawaData(
        alpha=alpha,
        k_interval=validation.k_interval,
        curve1=curves[0],
        curve2=curves[1],
        curvature_range1=rng1,
        curvature_range2=rng2,
        disjoint=disjoint,
        sin_margins=(margins[0], margins[1]),
        curvature_residuals=(curv_res[0], curv_res[1]),
        asymptotic_residuals=(asym_res[0], asym_res[1]),
    )


@dataclass
class GaussImageData:
    curve1: SphereCurve
    curve2: SphereCurve
    total_curvatures: tuple[float, float]
    window_statistic: float
    degrees: tuple[int, int]
    degree_integrals: tuple[float, float]
    gauss_bonnet: float   # integral of K over the quotient torus
    whitney: float        # integral of K_N over the quotient torus

    def to_dict(self) -> dict:
        return {
            "total_curvatures": list(self.total_curvatures),
            "window_statistic": self.window_statistic,
            "degrees": list(self.degrees),
            "degree_integrals": list(self.degree_integrals),
            "gauss_bonnet": self.gauss_bonnet,
            "whitney": self.whitney,
        }


def gauss_image(spec: TorusSpec, n: int = 1024, n_grid: int = 256) -> GaussImageData:
    """Gauss-image curves, their curvature integrals, degrees, and the
    Gauss-Bonnet / Whitney integrals measured on the built torus.

    The image curves are the classical Hopf projections q -> bar(q) I q of
    the factors; degrees come from the signed-spherical-area integral of
    the measured Gauss map over a fundamental domain, and the K / K_N
    integrals use the independent finite-difference estimator.
    """
    validate_torus(spec, n_lift=max(256, n // 2))
    S, T = spec.psi.period_s, spec.psi.period_t
    f1 = integrate_factor(spec.psi.psi1, 0.0, S, n)
    f2 = integrate_factor(spec.psi.psi2, 0.0, T, n)
    i_axis = np.array([0.0, 1.0, 0.0, 0.0])
    g1 = sphere_curve(f1.params[:-1], f1.samples[:-1], i_axis, S)
    g2 = sphere_curve(f2.params[:-1], f2.samples[:-1], i_axis, T)

    window = g1.curvature_window_range() + g2.curvature_window_range()

    patch = build_torus(spec, n_grid, n_grid)
    Fx, Fy = _xy_derivatives(patch)
    gp, gm = measured_gauss(Fx, Fy)

    # covering multiplicity of the grid over the quotient torus
    kappa = patch.p_cover**2 / abs(spec.det)
    cell = patch.hs * patch.ht

    def degree_integral(gcomp):
        gs = d1_periodic(gcomp, patch.hs, axis=0)
        gt = d1_periodic(gcomp, patch.ht, axis=1)
        integrand = np.sum(gcomp * np.cross(gs, gt), axis=-1)
        return float(-np.sum(integrand) * cell / (4.0 * math.pi) / kappa)

    d1_int = degree_integral(gp)
    d2_int = degree_integral(gm)

    forms = torus_fundamental_forms(patch)
    area = np.sqrt(forms.E * forms.G - forms.F**2)
    gb = float(np.sum(forms.K * area) * 0.5 * cell / kappa)
    wh = float(np.sum(forms.KN * area) * 0.5 * cell / kappa)

    return GaussImageData(
        curve1=g1,
        curve2=g2,
        total_curvatures=(g1.total_curvature(), g2.total_curvature()),
        window_statistic=window,
        degrees=(round(d1_int), round(d2_int)),
        degree_integrals=(d1_int, d2_int),
        gauss_bonnet=gb,
        whitney=wh,
    )


def torus_xy_patch(spec: TorusSpec, grid, lift: LiftPath | None = None):
    """The torus immersion evaluated on an (x, y) grid as a SurfacePatch.

    F is the plus component of sigma bar(g) hat(g), which is exactly the
    nu0 frame grid of the surface pipeline, so the same lift can feed both
    routes and their first fundamental forms can be compared node by node.
    """
    from .lift import lift_for_grid
    from .surface import SurfacePatch, frame_grids

    if lift is None:
        lift = lift_for_grid(spec.psi, grid)
    frames = frame_grids(lift, grid)
    return SurfacePatch(grid, frames["nu0"], frames=frames, spherical=True)


def gauss_pointwise_residual(patch: TorusPatch, n_sample: int = 48) -> float:
    """hopf(g) through the scalar split-quaternion algebra versus the
    recombined per-factor Hopf projections, on a subsampled grid."""
    f1, f2 = patch.lift.factor1, patch.lift.factor2
    i_axis = np.array([0.0, 1.0, 0.0, 0.0])
    c1 = qmul(qconj(f1.samples), qmul(i_axis, f1.samples))[:, 1:]
    c2 = qmul(qconj(f2.samples), qmul(i_axis, f2.samples))[:, 1:]
    idx1 = np.linspace(0, len(f1.params) - 1, n_sample).astype(int)
    idx2 = np.linspace(0, len(f2.params) - 1, n_sample).astype(int)
    res = 0.0
    for i in idx1:
        for j in idx2:
            g = Spinor.from_split(f1.samples[i], f2.samples[j])
            plus, minus = hopf(g).split()
            res = max(
                res,
                float(np.max(np.abs(plus - c1[i]))),
                float(np.max(np.abs(minus - c2[j]))),
            )
    return res


def lattice_invariance_residual(spec: TorusSpec, generator: tuple[int, int],
                                n_per_period: int = 2048) -> float:
    """max |F(a + gamma) - F(a)| over one period of samples, gamma the
    lattice generator (m S, n T).

    Uses independently integrated extended factors, so the residual
    reflects both the closure defect and the integrator error.
    """
    m, n = generator
    if m < 0:
        m, n = -m, -n
    S, T = spec.psi.period_s, spec.psi.period_t

    s_hi = (m + 1) * S
    f1 = integrate_factor(spec.psi.psi1, 0.0, s_hi, (m + 1) * n_per_period)
    base1 = f1.samples[: n_per_period + 1]
    shift1 = f1.samples[m * n_per_period:]

    t_lo = min(0.0, n * T)
    t_hi = max(T, (n + 1) * T)
    steps = int(round((t_hi - t_lo) / T)) * n_per_period
    f2 = integrate_factor(spec.psi.psi2, t_lo, t_hi, steps)
    off_base = int(round(-t_lo / T)) * n_per_period
    off_shift = off_base + n * n_per_period
    base2 = f2.samples[off_base: off_base + n_per_period + 1]
    shift2 = f2.samples[off_shift: off_shift + n_per_period + 1]

    F_base = qmul(qconj(base1)[:, None, :], base2[None, :, :])
    F_shift = qmul(qconj(shift1)[:, None, :], shift2[None, :, :])
    return float(np.max(np.abs(F_base - F_shift)))
