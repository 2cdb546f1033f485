"""Exception hierarchy.

Every exception carries a stable ``code`` string that the command line
front end copies into its machine-readable error objects.
"""


class GaussNetError(Exception):
    code = "error"


class InvalidArgumentError(GaussNetError, ValueError):
    code = "invalid-argument"


class PhysicalityError(GaussNetError, ValueError):
    """A matrix violates a physical constraint (symmetry, uncertainty, symplecticity)."""

    code = "physics-validity"


class NotSymmetricError(PhysicalityError):
    code = "not-symmetric"


class NotPhysicalError(PhysicalityError):
    code = "not-physical"

    def __init__(self, message, eigenvalue=None):
        super().__init__(message)
        self.eigenvalue = eigenvalue


class NotSymplecticError(PhysicalityError):
    code = "not-symplectic"


class CapacityError(GaussNetError):
    code = "capacity"


class ClassificationError(GaussNetError):
    code = "conditioning"


class BoundViolationError(GaussNetError, AssertionError):
    code = "bound-violation"


class ConfigError(GaussNetError):
    code = "config"

    def __init__(self, message, path=None, line=None, column=None):
        super().__init__(message)
        self.path = path
        self.line = line
        self.column = column
