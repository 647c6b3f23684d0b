"""Quaternions with Lorentz-number coefficients and the Spin(4) machinery.

A SplitQuat is a0*1 + a1*I + a2*J + a3*K with a_i Lorentz numbers and the
usual I^2 = J^2 = K^2 = -1, IJ = -JI = K.  The ring splits along the
idempotents (1 +- sigma)/2 into two copies of the real quaternions; the
split pair is the fast path for multiplication and for every grid-sized
computation, so this module also carries plain-numpy kernels (qmul, qconj,
...) acting on arrays of shape (..., 4) in (1, I, J, K) component order.

Embeddings used throughout:
  * R^4  = {sigma*x0 + x1 I + x2 J + x3 K}; plus-component of an embedded
    vector is exactly the real quaternion x0 + x1 I + x2 J + x3 K.
  * Spin(4) = unit-norm elements; acts on R^4 by q xi hat(q)^{-1}.
  * Bivectors a I + b J + c K with a, b, c Lorentz; unit ones form the
    Grassmannian of oriented 2-planes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NotInvertible, NotUnit
from .lorentz import Lorentz, lz_inverse

__all__ = [
    "SplitQuat",
    "Vec4",
    "Spinor",
    "Bivector",
    "Q_ZERO",
    "Q_ONE",
    "Q_I",
    "Q_J",
    "Q_K",
    "sq_h",
    "sq_brack",
    "sq_inverse",
    "split_iso",
    "unsplit_iso",
    "cross",
    "mixed",
    "rotate_r4",
    "hopf",
    "qmul",
    "qconj",
    "qnorm",
    "qnormalize",
    "qdot",
]


def _lz(x):
    if isinstance(x, Lorentz):
        return x
    return Lorentz(float(x), 0.0)


@dataclass(frozen=True)
class SplitQuat:
    """Quaternion with Lorentz coefficients of (1, I, J, K)."""

    a0: Lorentz = Lorentz()
    a1: Lorentz = Lorentz()
    a2: Lorentz = Lorentz()
    a3: Lorentz = Lorentz()

    def __post_init__(self):
        object.__setattr__(self, "a0", _lz(self.a0))
        object.__setattr__(self, "a1", _lz(self.a1))
        object.__setattr__(self, "a2", _lz(self.a2))
        object.__setattr__(self, "a3", _lz(self.a3))

    @staticmethod
    def from_reals(w: float, x: float, y: float, z: float) -> "SplitQuat":
        return SplitQuat(Lorentz(w), Lorentz(x), Lorentz(y), Lorentz(z))

    @staticmethod
    def from_split(plus, minus) -> "SplitQuat":
        """Rebuild from the pair of real quaternions (length-4 sequences)."""
        return SplitQuat(
            Lorentz.from_split(plus[0], minus[0]),
            Lorentz.from_split(plus[1], minus[1]),
            Lorentz.from_split(plus[2], minus[2]),
            Lorentz.from_split(plus[3], minus[3]),
        )

    def coeffs(self) -> tuple[Lorentz, Lorentz, Lorentz, Lorentz]:
        return (self.a0, self.a1, self.a2, self.a3)

    def split(self) -> tuple[np.ndarray, np.ndarray]:
        """The two real-quaternion components of the splitting isomorphism."""
        pairs = [a.split() for a in self.coeffs()]
        plus = np.array([p for p, _ in pairs])
        minus = np.array([m for _, m in pairs])
        return plus, minus

    # -- linear structure ------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, SplitQuat):
            return NotImplemented
        return SplitQuat(*(a + b for a, b in zip(self.coeffs(), other.coeffs())))

    def __sub__(self, other):
        if not isinstance(other, SplitQuat):
            return NotImplemented
        return SplitQuat(*(a - b for a, b in zip(self.coeffs(), other.coeffs())))

    def __neg__(self):
        return SplitQuat(*(-a for a in self.coeffs()))

    def __mul__(self, other):
        if isinstance(other, SplitQuat):
            p1, m1 = self.split()
            p2, m2 = other.split()
            return SplitQuat.from_split(qmul(p1, p2), qmul(m1, m2))
        if isinstance(other, (int, float, Lorentz)):
            c = _lz(other)
            return SplitQuat(*(a * c for a in self.coeffs()))
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, float, Lorentz)):
            c = _lz(other)
            return SplitQuat(*(c * a for a in self.coeffs()))
        return NotImplemented

    # -- conjugations ----------------------------------------------------

    def bar(self) -> "SplitQuat":
        """Quaternionic conjugation (anti-automorphism)."""
        return SplitQuat(self.a0, -self.a1, -self.a2, -self.a3)

    def hat(self) -> "SplitQuat":
        """Lorentz conjugation of every coefficient (automorphism)."""
        return SplitQuat(*(a.conj() for a in self.coeffs()))

    # -- norms and inverse -------------------------------------------------

    def h_norm(self) -> Lorentz:
        """H(xi, xi) = sum of squared coefficients, a Lorentz number."""
        return sq_h(self, self)

    def scalar_part(self) -> Lorentz:
        return self.a0

    def imag_part(self) -> "SplitQuat":
        return SplitQuat(Lorentz(), self.a1, self.a2, self.a3)

    def inverse(self) -> "SplitQuat":
        return sq_inverse(self)

    def is_invertible(self) -> bool:
        return self.h_norm().is_invertible()

    def isclose(self, other, tol: float = 1e-12) -> bool:
        return all(
            a.isclose(b, tol) for a, b in zip(self.coeffs(), other.coeffs())
        )

    def max_abs(self) -> float:
        return max(max(abs(a.u), abs(a.v)) for a in self.coeffs())


Q_ZERO = SplitQuat()
Q_ONE = SplitQuat.from_reals(1, 0, 0, 0)
Q_I = SplitQuat.from_reals(0, 1, 0, 0)
Q_J = SplitQuat.from_reals(0, 0, 1, 0)
Q_K = SplitQuat.from_reals(0, 0, 0, 1)


def sq_h(x: SplitQuat, y: SplitQuat) -> Lorentz:
    """The A-bilinear inner product H(x, y) = sum a_i b_i."""
    s = Lorentz()
    for a, b in zip(x.coeffs(), y.coeffs()):
        s = s + a * b
    return s


def sq_brack(x: SplitQuat, y: SplitQuat) -> SplitQuat:
    """The quaternion-valued pairing << x, y >> = bar(y) * x."""
    return y.bar() * x


def sq_inverse(xi: SplitQuat) -> SplitQuat:
    """Inverse bar(xi)/H(xi,xi); fails exactly on (1 +- sigma)*H."""
    h = xi.h_norm()
    if not h.is_invertible():
        raise NotInvertible(
            "split quaternion lies in H_+ u H_- (sigma*xi = +-xi)"
        )
    return xi.bar() * lz_inverse(h)


def split_iso(xi: SplitQuat) -> tuple[np.ndarray, np.ndarray]:
    """xi -> (xi_+, xi_-), multiplication becoming componentwise."""
    return xi.split()


def unsplit_iso(plus, minus) -> SplitQuat:
    """Inverse of split_iso."""
    return SplitQuat.from_split(plus, minus)


def cross(x: SplitQuat, y: SplitQuat) -> SplitQuat:
    """Cross product (xy - yx)/2 of imaginary split quaternions.

    With H it reassembles the pairing: << x, y >> = H(x,y) + x X y.
    """
    return (x * y - y * x) * Lorentz(0.5)


def mixed(x: SplitQuat, y: SplitQuat, z: SplitQuat) -> Lorentz:
    """Mixed product H(x X y, z), the A-valued volume form."""
    return sq_h(cross(x, y), z)


@dataclass(frozen=True)
class Vec4:
    """A point of R^4, embedded in the quaternions as sigma*x0 + x1 I + x2 J + x3 K."""

    x0: float = 0.0
    x1: float = 0.0
    x2: float = 0.0
    x3: float = 0.0

    def embed(self) -> SplitQuat:
        return SplitQuat(
            Lorentz(0.0, self.x0), Lorentz(self.x1), Lorentz(self.x2), Lorentz(self.x3)
        )

    @staticmethod
    def from_embedding(xi: SplitQuat, tol: float = 1e-9) -> "Vec4":
        """Project an embedded vector back; checks hat(bar xi) = -xi."""
        res = (xi.bar().hat() + xi).max_abs()
        if res > tol:
            raise ValueError(f"not in embedded R^4 (residual {res:.3e})")
        return Vec4(xi.a0.v, xi.a1.u, xi.a2.u, xi.a3.u)

    def as_array(self) -> np.ndarray:
        return np.array([self.x0, self.x1, self.x2, self.x3])

    @staticmethod
    def from_array(a) -> "Vec4":
        return Vec4(float(a[0]), float(a[1]), float(a[2]), float(a[3]))

    def norm(self) -> float:
        return math.sqrt(self.x0**2 + self.x1**2 + self.x2**2 + self.x3**2)


class Spinor:
    """Unit-norm split quaternion, i.e. an element of Spin(4)."""

    __slots__ = ("value",)

    def __init__(self, value: SplitQuat, tol: float = 1e-9):
        dev = _unit_deviation(value)
        if dev > tol:
            raise NotUnit(f"|H(q,q) - 1| = {dev:.3e} exceeds {tol:.1e}")
        self.value = value

    @staticmethod
    def identity() -> "Spinor":
        return Spinor(Q_ONE)

    @staticmethod
    def from_split(plus, minus) -> "Spinor":
        return Spinor(SplitQuat.from_split(plus, minus))

    def split(self) -> tuple[np.ndarray, np.ndarray]:
        return self.value.split()

    def rotate(self, x: Vec4) -> Vec4:
        return rotate_r4(self, x)

    def hopf(self) -> "Bivector":
        return hopf(self)

    def __repr__(self):
        return f"Spinor({self.value!r})"


def _unit_deviation(q: SplitQuat) -> float:
    h = q.h_norm()
    return max(abs(h.u - 1.0), abs(h.v))


def rotate_r4(q: Spinor, x: Vec4) -> Vec4:
    """The SO(4) rotation q xi hat(q)^{-1} through the double cover.

    q and -q induce the same map.  Accepts a raw SplitQuat as well, in
    which case the unit norm is checked here.
    """
    if isinstance(q, Spinor):
        qq = q.value
    else:
        qq = q
        if _unit_deviation(qq) > 1e-9:
            raise NotUnit("rotation spinor is not unit")
    xi = x.embed()
    out = qq * xi * sq_inverse(qq.hat())
    return Vec4.from_embedding(out)


@dataclass(frozen=True)
class Bivector:
    """Element a I + b J + c K of the bivectors with Lorentz coefficients."""

    a: Lorentz
    b: Lorentz
    c: Lorentz

    def __post_init__(self):
        object.__setattr__(self, "a", _lz(self.a))
        object.__setattr__(self, "b", _lz(self.b))
        object.__setattr__(self, "c", _lz(self.c))

    def to_quat(self) -> SplitQuat:
        return SplitQuat(Lorentz(), self.a, self.b, self.c)

    @staticmethod
    def from_quat(xi: SplitQuat, tol: float = 1e-9) -> "Bivector":
        if xi.a0.magnitude() > tol:
            raise ValueError("quaternion has a scalar part; not a bivector")
        return Bivector(xi.a1, xi.a2, xi.a3)

    def h_norm(self) -> Lorentz:
        return self.a * self.a + self.b * self.b + self.c * self.c

    def is_unit(self, tol: float = 1e-9) -> bool:
        h = self.h_norm()
        return abs(h.u - 1.0) <= tol and abs(h.v) <= tol

    def split(self) -> tuple[np.ndarray, np.ndarray]:
        """The two S^2 points (for a unit bivector) of the product splitting."""
        pairs = [x.split() for x in (self.a, self.b, self.c)]
        return (
            np.array([p for p, _ in pairs]),
            np.array([m for _, m in pairs]),
        )


def hopf(g: Spinor) -> Bivector:
    """Hopf-type projection g -> g^{-1} I g onto the unit bivectors.

    Invariant under left multiplication of g by cos(theta) + sin(theta) I
    with theta any Lorentz number.
    """
    if isinstance(g, Spinor):
        gq = g.value
    else:
        gq = g
        if _unit_deviation(gq) > 1e-9:
            raise NotUnit("hopf projection needs a unit spinor")
    out = gq.bar() * Q_I * gq
    return Bivector.from_quat(out, tol=1e-9)


# ----------------------------------------------------------------------
# Vectorized real-quaternion kernels, components (1, I, J, K) last axis.
# ----------------------------------------------------------------------


def qmul(p, q):
    """Hamilton product of arrays of quaternions, shape (..., 4), broadcast."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    p0, p1, p2, p3 = p[..., 0], p[..., 1], p[..., 2], p[..., 3]
    q0, q1, q2, q3 = q[..., 0], q[..., 1], q[..., 2], q[..., 3]
    return np.stack(
        [
            p0 * q0 - p1 * q1 - p2 * q2 - p3 * q3,
            p0 * q1 + p1 * q0 + p2 * q3 - p3 * q2,
            p0 * q2 - p1 * q3 + p2 * q0 + p3 * q1,
            p0 * q3 + p1 * q2 - p2 * q1 + p3 * q0,
        ],
        axis=-1,
    )


def qconj(q):
    q = np.asarray(q, dtype=float)
    out = q.copy()
    out[..., 1:] *= -1.0
    return out


def qnorm(q):
    q = np.asarray(q, dtype=float)
    return np.sqrt(np.sum(q * q, axis=-1))


def qnormalize(q):
    q = np.asarray(q, dtype=float)
    return q / qnorm(q)[..., None]


def qdot(p, q):
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    return np.sum(p * q, axis=-1)
