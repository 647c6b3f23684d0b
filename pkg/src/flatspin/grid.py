"""Uniform square grids on (x, y) rectangles and their characteristic lines.

A grid node (i, j) sits at (x0 + i h, y0 + j h); the characteristic
coordinates there are s = x + y and t = x - y, which land on uniform
1-D grids with the same spacing h.  Index bookkeeping:

    s(i, j) = s_min + (i + j) h,        s_min = x0 + y0
    t(i, j) = t_min + (i - j + ny) h,   t_min = x0 - y0 - ny h
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["GridXY"]


@dataclass(frozen=True)
class GridXY:
    x0: float
    y0: float
    nx: int
    ny: int
    h: float

    def __post_init__(self):
        if self.nx < 1 or self.ny < 1:
            raise ValueError("grid needs at least one cell per direction")
        if not self.h > 0.0:
            raise ValueError("grid spacing must be positive")

    @staticmethod
    def square(x_max: float, y_max: float, n: int, x0: float = 0.0,
               y0: float = 0.0) -> "GridXY":
        """n cells along x; y must be an integer number of the same cells."""
        h = (x_max - x0) / n
        ny = int(round((y_max - y0) / h))
        if abs(ny * h - (y_max - y0)) > 1e-9 * max(1.0, abs(y_max - y0)):
            raise ValueError("y extent is not an integer multiple of h")
        return GridXY(x0, y0, n, ny, h)

    @property
    def xs(self) -> np.ndarray:
        return self.x0 + self.h * np.arange(self.nx + 1)

    @property
    def ys(self) -> np.ndarray:
        return self.y0 + self.h * np.arange(self.ny + 1)

    @property
    def s_min(self) -> float:
        return self.x0 + self.y0

    @property
    def t_min(self) -> float:
        return self.x0 - self.y0 - self.ny * self.h

    @property
    def n_diag(self) -> int:
        """Number of characteristic steps spanned: both s and t ranges have
        n_diag + 1 grid values."""
        return self.nx + self.ny

    def s_values(self) -> np.ndarray:
        return self.s_min + self.h * np.arange(self.n_diag + 1)

    def t_values(self) -> np.ndarray:
        return self.t_min + self.h * np.arange(self.n_diag + 1)

    def s_index(self) -> np.ndarray:
        """(nx+1, ny+1) array of indices into s_values()."""
        i = np.arange(self.nx + 1)[:, None]
        j = np.arange(self.ny + 1)[None, :]
        return i + j

    def t_index(self) -> np.ndarray:
        """(nx+1, ny+1) array of indices into t_values()."""
        i = np.arange(self.nx + 1)[:, None]
        j = np.arange(self.ny + 1)[None, :]
        return i - j + self.ny

    def node_s(self) -> np.ndarray:
        return self.s_values()[self.s_index()]

    def node_t(self) -> np.ndarray:
        return self.t_values()[self.t_index()]

    def same_layout(self, other: "GridXY", tol: float = 1e-12) -> bool:
        return (
            self.nx == other.nx
            and self.ny == other.ny
            and abs(self.x0 - other.x0) <= tol
            and abs(self.y0 - other.y0) <= tol
            and abs(self.h - other.h) <= tol
        )
