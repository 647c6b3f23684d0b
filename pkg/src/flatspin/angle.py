"""The conformal angle psi as a pair of one-variable periodic functions.

A conformal map into the Lorentz numbers is exactly a pair psi1(s), psi2(t)
in the characteristic coordinates s = x + y, t = x - y.  Each factor is
stored as a finite Fourier series, which gives smooth periodicity, exact
derivatives, and a certified range bound (sampled extrema padded with the
Lipschitz constant of the series).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import SchemaError

__all__ = ["FourierSeries", "AngleFunction"]

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class FourierSeries:
    """mean + sum_k (c_k cos(k w x) + s_k sin(k w x)), w = 2 pi / period."""

    period: float
    mean: float = 0.0
    harmonics: tuple[tuple[float, float], ...] = field(default_factory=tuple)

    def __post_init__(self):
        if not self.period > 0.0:
            raise ValueError("period must be positive")
        object.__setattr__(
            self,
            "harmonics",
            tuple((float(c), float(s)) for c, s in self.harmonics),
        )

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        w = TWO_PI / self.period
        out = np.full(x.shape, self.mean)
        for k, (c, s) in enumerate(self.harmonics, start=1):
            out += c * np.cos(k * w * x) + s * np.sin(k * w * x)
        return out if out.shape else float(out)

    def derivative(self, x):
        x = np.asarray(x, dtype=float)
        w = TWO_PI / self.period
        out = np.zeros(x.shape)
        for k, (c, s) in enumerate(self.harmonics, start=1):
            out += k * w * (-c * np.sin(k * w * x) + s * np.cos(k * w * x))
        return out if out.shape else float(out)

    def lipschitz_bound(self) -> float:
        """Upper bound on |f'| from the coefficients."""
        w = TWO_PI / self.period
        return sum(
            k * w * (abs(c) + abs(s))
            for k, (c, s) in enumerate(self.harmonics, start=1)
        )

    def range_bounds(self, n: int = 4096) -> tuple[float, float]:
        """Certified enclosure of the range over one period.

        Sampled extrema are padded by L*h/2 with L the Lipschitz bound, so
        the true range is contained in the returned interval.
        """
        x = np.linspace(0.0, self.period, n, endpoint=False)
        vals = self(x)
        pad = self.lipschitz_bound() * (self.period / n) / 2.0
        return float(np.min(vals) - pad), float(np.max(vals) + pad)

    def to_dict(self) -> dict:
        return {
            "period": self.period,
            "mean": self.mean,
            "harmonics": [list(h) for h in self.harmonics],
        }

    @staticmethod
    def from_dict(d: dict, path: str = "$") -> "FourierSeries":
        for key in ("period", "mean"):
            if key not in d:
                raise SchemaError(f"{path}.{key}", "missing required key")
            if not isinstance(d[key], (int, float)) or isinstance(d[key], bool):
                raise SchemaError(f"{path}.{key}", "expected a number")
        harmonics = d.get("harmonics", [])
        if not isinstance(harmonics, list):
            raise SchemaError(f"{path}.harmonics", "expected a list of [cos, sin] pairs")
        parsed = []
        for i, h in enumerate(harmonics):
            if (
                not isinstance(h, list)
                or len(h) != 2
                or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in h)
            ):
                raise SchemaError(f"{path}.harmonics[{i}]", "expected a [cos, sin] pair")
            parsed.append((float(h[0]), float(h[1])))
        if d["period"] <= 0:
            raise SchemaError(f"{path}.period", "period must be positive")
        return FourierSeries(float(d["period"]), float(d["mean"]), tuple(parsed))


@dataclass(frozen=True)
class AngleFunction:
    """psi(s, t) = (1+sigma)/2 psi1(s) + (1-sigma)/2 psi2(t)."""

    psi1: FourierSeries
    psi2: FourierSeries

    @property
    def period_s(self) -> float:
        return self.psi1.period

    @property
    def period_t(self) -> float:
        return self.psi2.period

    def theta1(self, s, t):
        """theta1 = (psi1 + psi2)/2, the real part of psi."""
        return 0.5 * (self.psi1(s) + self.psi2(t))

    def theta2(self, s, t):
        """theta2 = (psi1 - psi2)/2, the sigma part of psi."""
        return 0.5 * (self.psi1(s) - self.psi2(t))

    def theta2_range(self, n: int = 4096) -> tuple[float, float]:
        lo1, hi1 = self.psi1.range_bounds(n)
        lo2, hi2 = self.psi2.range_bounds(n)
        return 0.5 * (lo1 - hi2), 0.5 * (hi1 - lo2)

    @staticmethod
    def constant(psi1: float, psi2: float, period_s: float = TWO_PI,
                 period_t: float = TWO_PI) -> "AngleFunction":
        return AngleFunction(
            FourierSeries(period_s, psi1), FourierSeries(period_t, psi2)
        )

    def to_dict(self) -> dict:
        return {"psi1": self.psi1.to_dict(), "psi2": self.psi2.to_dict()}

    @staticmethod
    def from_dict(d: dict, path: str = "$") -> "AngleFunction":
        for key in ("psi1", "psi2"):
            if key not in d:
                raise SchemaError(f"{path}.{key}", "missing required key")
            if not isinstance(d[key], dict):
                raise SchemaError(f"{path}.{key}", "expected an object")
        return AngleFunction(
            FourierSeries.from_dict(d["psi1"], f"{path}.psi1"),
            FourierSeries.from_dict(d["psi2"], f"{path}.psi2"),
        )
