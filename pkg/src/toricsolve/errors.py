"""Exception hierarchy shared by all modules."""


class ToricError(Exception):
    """Base class for every error raised by toricsolve."""


class ZeroPolynomialError(ToricError, ValueError):
    def __init__(self, msg: str = "zero polynomial"):
        super().__init__(msg)


class DimensionMismatchError(ToricError, ValueError):
    pass


class NonGenericLiftingError(ToricError):
    """A lifting (or perturbation) did not induce a fine mixed subdivision."""


class ConstructionError(ToricError):
    """A resultant matrix could not be built."""


class SupportMismatchError(ConstructionError, ValueError):
    pass


class NumericError(ToricError):
    """Singular factorization, failed eigen-solve and similar."""


class SystemFileError(ToricError, ValueError):
    """Malformed system or matrix definition file."""
