"""Exception hierarchy shared by all modules."""


class EawmrError(Exception):
    """Base class for every error raised by this package."""


class DimensionError(EawmrError, ValueError):
    """Operand shapes do not conform."""


class SingularError(EawmrError, ArithmeticError):
    """Gaussian elimination met a pivot below the relative tolerance."""


class NotHermitian(EawmrError, ValueError):
    pass


class NotPsd(EawmrError, ValueError):
    pass


class NotUnitary(EawmrError, ValueError):
    pass


class NotInvertible(EawmrError, ValueError):
    """A Kraus operator has no inverse, so no reversal measurement exists."""


class ZeroProbability(EawmrError, ArithmeticError):
    pass


class ZeroCoefficient(EawmrError, ArithmeticError):
    pass


class ZeroGamma(EawmrError, ValueError):
    pass


class CptpError(EawmrError, ValueError):
    """Kraus operators violate sum_n K_n^dag K_n = I.

    The offending residual (max entrywise deviation) is kept on ``residual``.
    """

    def __init__(self, message: str, residual: float):
        super().__init__(message)
        self.residual = residual
