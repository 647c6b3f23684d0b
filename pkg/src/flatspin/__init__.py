"""Flat surfaces in R^4 and flat tori in S^3 synthesized from spinor data."""

from .angle import AngleFunction, FourierSeries
from .grid import GridXY
from .lorentz import Lorentz, lz_cos_sin, lz_inverse, lz_sqrt_all, lz_sqrt_principal
from .quaternions import (
    Bivector,
    SplitQuat,
    Spinor,
    Vec4,
    cross,
    hopf,
    mixed,
    rotate_r4,
    split_iso,
    sq_brack,
    sq_h,
    sq_inverse,
    unsplit_iso,
)

__all__ = [
    "AngleFunction",
    "FourierSeries",
    "GridXY",
    "Lorentz",
    "lz_cos_sin",
    "lz_inverse",
    "lz_sqrt_all",
    "lz_sqrt_principal",
    "Bivector",
    "SplitQuat",
    "Spinor",
    "Vec4",
    "cross",
    "hopf",
    "mixed",
    "rotate_r4",
    "split_iso",
    "sq_brack",
    "sq_h",
    "sq_inverse",
    "unsplit_iso",
]

__version__ = "0.1.0"
