"""Exception types shared across the package."""


class FlatspinError(Exception):
    """Base class for all package errors."""


class NotInvertible(FlatspinError):
    """Element has no inverse (zero divisor of the Lorentz ring or of the
    split quaternions)."""


class NotInCone(FlatspinError):
    """Square root requested outside the solvability cone {u >= 0, |v| <= u}."""


class NotUnit(FlatspinError):
    """A unit-norm element was required."""


class DegeneratePoint(FlatspinError):
    """Derivative vanished where an immersion was required."""


class NotImmersed(FlatspinError):
    """Immersion condition failed (stationary curve point, non-invertible
    speed, or angle range touching a multiple of pi/2)."""


class SignLoss(FlatspinError):
    """The product lambda*mu left the admissible positive region."""


class DomainError(FlatspinError):
    """Requested domain is not reachable from the Cauchy data footprint, or
    the grid is not aligned with the characteristic lattice."""


class GridMismatch(FlatspinError):
    """Grids of two fields do not line up."""


class DegenerateTangent(FlatspinError):
    """Tangent vectors linearly dependent at a grid node."""


class NotClosed(FlatspinError):
    """Lift monodromy is not +-1; carries the closure defect."""

    def __init__(self, message, defect=None):
        super().__init__(message)
        self.defect = defect


class LatticeError(FlatspinError):
    """Lattice matrix violates the determinant/gcd requirements."""


class LatticeParity(FlatspinError):
    """Antiperiodic lift paired with a lattice violating m = n (mod 2)."""


class NoAdmissibleAlpha(FlatspinError):
    """No angle alpha separates the two angle functions as required."""


class AtPole(FlatspinError):
    """Stereographic projection evaluated at (or too close to) its pole."""


class ProjectionRequired(FlatspinError):
    """Mesh export of a non-spherical patch needs an explicit 4D->3D
    projection."""


class SchemaError(FlatspinError):
    """Configuration document violates the schema; carries a JSON path."""

    def __init__(self, path, message):
        super().__init__(f"{path}: {message}")
        self.path = path
        self.reason = message


class UnknownKey(SchemaError):
    """Strict-mode parsing found a key not in the schema."""
