"""Lorentz (split-complex) numbers u + sigma*v with sigma^2 = +1.

The ring has zero divisors along the two idempotent lines (1 +- sigma)R.
Multiplication, inversion and the trigonometric functions are cheapest in
the split coordinates (u+v, u-v), which diagonalize the ring; values are
stored in the (u, v) basis because that is how every formula downstream is
written.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import NotInCone, NotInvertible

__all__ = [
    "Lorentz",
    "ZERO",
    "ONE",
    "SIGMA",
    "lz_inverse",
    "lz_sqrt_all",
    "lz_sqrt_principal",
    "lz_cos_sin",
]


def _coerce(x):
    if isinstance(x, Lorentz):
        return x
    if isinstance(x, (int, float)):
        return Lorentz(float(x), 0.0)
    return None


@dataclass(frozen=True)
class Lorentz:
    """A split-complex scalar u + sigma*v with real u, v."""

    u: float = 0.0
    v: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "u", float(self.u))
        object.__setattr__(self, "v", float(self.v))
        if not (math.isfinite(self.u) and math.isfinite(self.v)):
            raise ValueError("Lorentz components must be finite")

    # -- ring structure -------------------------------------------------

    def __add__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return Lorentz(self.u + other.u, self.v + other.v)

    __radd__ = __add__

    def __sub__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return Lorentz(self.u - other.u, self.v - other.v)

    def __rsub__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return other - self

    def __mul__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return Lorentz(
            self.u * other.u + self.v * other.v,
            self.u * other.v + self.v * other.u,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return self * lz_inverse(other)

    def __rtruediv__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return other * lz_inverse(self)

    def __neg__(self):
        return Lorentz(-self.u, -self.v)

    def __pos__(self):
        return self

    # -- structure maps -------------------------------------------------

    def conj(self) -> "Lorentz":
        """Lorentz conjugation sigma -> -sigma."""
        return Lorentz(self.u, -self.v)

    def split(self) -> tuple[float, float]:
        """Coordinates (u+v, u-v) along the idempotents (1+sigma)/2, (1-sigma)/2."""
        return (self.u + self.v, self.u - self.v)

    @staticmethod
    def from_split(p: float, m: float) -> "Lorentz":
        """Inverse of :meth:`split`; exact for the roundtrip (halving is exact
        after the exact sums p+m, p-m of split())."""
        return Lorentz((p + m) / 2.0, (p - m) / 2.0)

    def is_invertible(self) -> bool:
        """False exactly on the zero-divisor lines u = +-v."""
        return self.u != self.v and self.u != -self.v

    def magnitude(self) -> float:
        """max(|u+v|, |u-v|); a ring-friendly size gauge."""
        p, m = self.split()
        return max(abs(p), abs(m))

    def isclose(self, other, tol: float = 1e-12) -> bool:
        other = _coerce(other)
        return abs(self.u - other.u) <= tol and abs(self.v - other.v) <= tol

    def __repr__(self):
        return f"Lorentz({self.u!r}, {self.v!r})"


ZERO = Lorentz(0.0, 0.0)
ONE = Lorentz(1.0, 0.0)
SIGMA = Lorentz(0.0, 1.0)


def lz_inverse(a: Lorentz) -> Lorentz:
    """Inverse of a, defined away from the lines (1 +- sigma)R.

    Raises NotInvertible on the zero-divisor lines u = +-v.
    """
    a = _coerce(a)
    p, m = a.split()
    if p == 0.0 or m == 0.0:
        raise NotInvertible(f"{a} lies on a zero-divisor line (u = +-v)")
    return Lorentz.from_split(1.0 / p, 1.0 / m)


def lz_sqrt_all(b: Lorentz) -> list[Lorentz]:
    """All square roots of b, ordered with the principal root first.

    Roots exist iff b lies in the closed cone {u >= 0, -u <= v <= u}: four
    distinct roots strictly inside, two on the boundary rays, one at the
    apex b = 0.  The principal root is the one with both split coordinates
    nonnegative.  Raises NotInCone outside the closed cone.
    """
    b = _coerce(b)
    p, m = b.split()
    if p < 0.0 or m < 0.0:
        raise NotInCone(f"{b} outside the cone u >= 0, |v| <= u")
    rp, rm = math.sqrt(p), math.sqrt(m)
    roots = []
    for e1 in (1.0, -1.0):
        for e2 in (1.0, -1.0):
            cand = Lorentz.from_split(e1 * rp, e2 * rm)
            if not any(cand == r for r in roots):
                roots.append(cand)
    return roots


def lz_sqrt_principal(b: Lorentz) -> Lorentz:
    """The root of b whose split coordinates are both nonnegative."""
    return lz_sqrt_all(b)[0]


def lz_cos_sin(theta: Lorentz) -> tuple[Lorentz, Lorentz]:
    """(cos theta, sin theta) through the split coordinates.

    cos(s,t-split) acts componentwise, so cos^2 + sin^2 = 1 holds exactly
    up to rounding and all usual trigonometric identities carry over.
    """
    theta = _coerce(theta)
    s, t = theta.split()
    return (
        Lorentz.from_split(math.cos(s), math.cos(t)),
        Lorentz.from_split(math.sin(s), math.sin(t)),
    )
