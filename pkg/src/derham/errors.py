"""Exception types shared across the package."""


class DerhamError(Exception):
    """Base class for all errors raised by this package."""


class AmbientMismatch(DerhamError):
    """Operands live in rings with different numbers of variables."""


class IndexOutOfRange(DerhamError):
    """A variable index is outside 0..n-1."""


class ZeroDivisor(DerhamError):
    """Division or localization by the zero polynomial."""


class ZeroInput(DerhamError):
    """An operation that requires a nonzero input received zero."""


class SingularChange(DerhamError):
    """The matrix of an affine change of variables is not invertible."""


class SingularMatrix(DerhamError):
    """Attempt to invert a singular matrix."""


class CompositeNotZero(DerhamError):
    """Two consecutive differentials of a chain complex do not compose to zero."""


class UnitIdeal(DerhamError):
    """The ideal is the whole ring where a proper ideal is required."""


class NotZeroDimensional(DerhamError):
    """The ideal does not have a finite staircase."""


class NotHomogeneous(DerhamError):
    """A homogeneous input was required."""


class WrongHeight(DerhamError):
    """The ideal does not have the height required by the verification."""


class NoGoodChangeFound(DerhamError):
    """No random change of variables satisfied the required gates within the retry budget."""


class NonCommuting(DerhamError):
    """Operator action matrices fail to commute on a truncation window."""


class UnknownClass(DerhamError):
    """Unknown module class tag for a closed-form dimension vector."""


class NoStabilization(DerhamError):
    """Homology dimensions kept changing after the cap budget was exhausted.

    Carries the window trace so the caller can report it.
    """

    def __init__(self, message, trace=()):
        super().__init__(message)
        self.trace = tuple(trace)


class ParseError(DerhamError):
    """Syntax error in a textual polynomial, with a character position."""

    def __init__(self, message, position):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class UnknownVariable(ParseError):
    """An identifier in a polynomial expression is not a declared variable."""
