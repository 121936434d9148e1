"""Exception hierarchy shared by every zeroloc module."""


class ZerolocError(Exception):
    """Base class for all library errors."""


class InvalidOrder(ZerolocError, ValueError):
    """A Bessel order outside the supported domain."""


class DomainError(ZerolocError, ValueError):
    """An argument outside the domain of the function (e.g. r = 0)."""


class NonConvergence(ZerolocError, ArithmeticError):
    """A series or adaptive scheme ran out of terms or subdivisions."""


class NonFinite(ZerolocError, ArithmeticError):
    """A NaN or infinity appeared where a finite value is required."""


class NonNormalizable(ZerolocError, ValueError):
    """The requested radial density integral diverges."""


class NotBound(ZerolocError, ValueError):
    """The radial order does not exceed 1, so no E=0 bound state exists.

    ``k`` is set when the failure comes from one component of a coherent
    superposition.
    """

    def __init__(self, message, *, l=None, order=None, k=None):
        super().__init__(message)
        self.l = l
        self.order = order
        self.k = k


class ComplexOrder(NotBound):
    """l^2 - lambda^2 <= 0 under V-: the shifted order is not a positive real."""


class DegenerateMode(ZerolocError, ValueError):
    """An angular mode whose normalization integral vanishes."""


class EmptyRow(ZerolocError, ValueError):
    """A polar density row with no mass above the detection floor."""


class ZeroMass(ZerolocError, ValueError):
    """A density grid with zero total mass."""


class ConfigError(ZerolocError, ValueError):
    """Invalid or inconsistent run configuration."""
