"""Exception types shared across the package."""


class PolySystemError(ValueError):
    """Base class for invalid input (bad files, wrong dimensions, ...)."""


class ParseError(PolySystemError):
    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}"
            if column is not None:
                where += f", column {column}"
            where += ": "
        super().__init__(where + message)


class DimensionError(PolySystemError):
    pass


class ZeroPolynomialError(ValueError):
    """Raised when roots are requested for the identically zero polynomial."""


class NumericFailure(ArithmeticError):
    """Root finding or a linear solve produced unusable numbers."""


class FlatLineError(ArithmeticError):
    """The objective is constant along the probe (derivative identically zero)."""


class ZeroGradient(ArithmeticError):
    """The gradient of rss vanishes at the current point."""


class SingularDirection(ArithmeticError):
    """The damped normal matrix stayed singular after escalation."""


class DegenerateAxis(ArithmeticError):
    """The collapsed coefficient vector of an axis is zero."""


class NotQuasiLinear(PolySystemError):
    """Some variable appears with an exponent above one."""
