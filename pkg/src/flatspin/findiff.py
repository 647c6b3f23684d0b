"""Finite-difference stencils shared by the lift and surface diagnostics.

Fourth-order first and second derivatives along one axis of a sampled
array, either with one-sided closures at the ends or with periodic wrap.
The measured-versus-formula checks in this package need O(h^4) truncation;
second-order residual definitions (PDE residual, plaquette closedness)
keep their own local stencils.
"""

from __future__ import annotations

import numpy as np

__all__ = ["d1_fourth", "d2_fourth", "d1_periodic", "d2_periodic"]

# one-sided fourth-order first-derivative rows (leftmost two samples)
_EDGE1_0 = np.array([-25.0, 48.0, -36.0, 16.0, -3.0]) / 12.0
_EDGE1_1 = np.array([-3.0, -10.0, 18.0, -6.0, 1.0]) / 12.0

# one-sided (fourth-order) second-derivative rows
_EDGE2_0 = np.array([45.0, -154.0, 214.0, -156.0, 61.0, -10.0]) / 12.0
_EDGE2_1 = np.array([10.0, -15.0, -4.0, 14.0, -6.0, 1.0]) / 12.0


def _move(a, axis):
    return np.moveaxis(np.asarray(a, dtype=float), axis, 0)


def d1_fourth(a, h: float, axis: int = 0) -> np.ndarray:
    """Fourth-order first derivative with one-sided ends (needs >= 6 samples)."""
    f = _move(a, axis)
    n = f.shape[0]
    if n < 6:
        raise ValueError("need at least 6 samples for the fourth-order stencil")
    out = np.empty_like(f)
    out[2:-2] = (-f[4:] + 8.0 * f[3:-1] - 8.0 * f[1:-3] + f[:-4]) / 12.0
    out[0] = sum(c * f[k] for k, c in enumerate(_EDGE1_0))
    out[1] = sum(c * f[k] for k, c in enumerate(_EDGE1_1))
    out[-1] = -sum(c * f[n - 1 - k] for k, c in enumerate(_EDGE1_0))
    out[-2] = -sum(c * f[n - 1 - k] for k, c in enumerate(_EDGE1_1))
    out /= h
    return np.moveaxis(out, 0, axis)


def d2_fourth(a, h: float, axis: int = 0) -> np.ndarray:
    """Fourth-order second derivative with one-sided ends (needs >= 7 samples)."""
    f = _move(a, axis)
    n = f.shape[0]
    if n < 7:
        raise ValueError("need at least 7 samples for the fourth-order stencil")
    out = np.empty_like(f)
    out[2:-2] = (
        -f[4:] + 16.0 * f[3:-1] - 30.0 * f[2:-2] + 16.0 * f[1:-3] - f[:-4]
    ) / 12.0
    out[0] = sum(c * f[k] for k, c in enumerate(_EDGE2_0))
    out[1] = sum(c * f[k] for k, c in enumerate(_EDGE2_1))
    out[-1] = sum(c * f[n - 1 - k] for k, c in enumerate(_EDGE2_0))
    out[-2] = sum(c * f[n - 1 - k] for k, c in enumerate(_EDGE2_1))
    out /= h * h
    return np.moveaxis(out, 0, axis)


def d1_periodic(a, h: float, axis: int = 0) -> np.ndarray:
    """Fourth-order first derivative of a periodically sampled array
    (no duplicated endpoint)."""
    f = _move(a, axis)
    out = (
        -np.roll(f, -2, axis=0)
        + 8.0 * np.roll(f, -1, axis=0)
        - 8.0 * np.roll(f, 1, axis=0)
        + np.roll(f, 2, axis=0)
    ) / (12.0 * h)
    return np.moveaxis(out, 0, axis)


def d2_periodic(a, h: float, axis: int = 0) -> np.ndarray:
    """Fourth-order second derivative, periodic samples."""
    f = _move(a, axis)
    out = (
        -np.roll(f, -2, axis=0)
        + 16.0 * np.roll(f, -1, axis=0)
        - 30.0 * f
        + 16.0 * np.roll(f, 1, axis=0)
        - np.roll(f, 2, axis=0)
    ) / (12.0 * h * h)
    return np.moveaxis(out, 0, axis)
