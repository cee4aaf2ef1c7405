"""Exception types shared across the package."""


class TomoError(Exception):
    """Base class for all pntomo errors."""


class SingularMatrix(TomoError, ArithmeticError):
    pass


class NotHermitian(TomoError, ValueError):
    pass


class DimensionMismatch(TomoError, ValueError):
    pass


class DegreeCapExceeded(TomoError, ValueError):
    """Requested polynomial degree is beyond the configured cap."""

    def __init__(self, degree, cap, index=None):
        self.degree = degree
        self.cap = cap
        self.index = index
        msg = f"total degree {degree} exceeds cap {cap}"
        if index is not None:
            msg += f" (index {tuple(index)})"
        super().__init__(msg)


class InvalidSqueezeParams(TomoError, ValueError):
    pass


class GridTooCoarse(TomoError, ArithmeticError):
    pass


class ConfigInvalid(TomoError, ValueError):
    pass


class ComplexTomogram(TomoError, ArithmeticError):
    """Tomogram evaluation produced a non-negligible imaginary part."""


class TruncationRisk(UserWarning):
    """Fock cutoff is too small for the requested displacement."""
