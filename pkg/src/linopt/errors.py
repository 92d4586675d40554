"""Exception hierarchy shared across the package."""


class LinoptError(Exception):
    """Base class for all errors raised by linopt."""


class InvalidParameterError(LinoptError, ValueError):
    """A numeric parameter is non-finite or outside its allowed domain."""


class DimensionError(LinoptError, ValueError):
    """Mode counts or array shapes do not agree."""


class NonUnitaryError(LinoptError, ValueError):
    """A transfer matrix failed the unitarity check."""

    def __init__(self, deviation, tol):
        super().__init__(f"matrix is not unitary: max |U^H U - I| = {deviation:.3e} > {tol:.1e}")
        self.deviation = deviation
        self.tol = tol


class BudgetExceededError(LinoptError, ValueError):
    """Photon number or matrix size is beyond what the routine supports."""


class UndefinedParameterError(LinoptError, ZeroDivisionError):
    """A ratio-type observable has a zero denominator."""


class CircuitError(LinoptError):
    """Problem with circuit text, carrying a source location."""

    def __init__(self, message, line=None, column=None, source=None):
        self.message = message
        self.line = line
        self.column = column
        self.source = source
        super().__init__(self._format())

    def _format(self):
        where = []
        if self.source:
            where.append(str(self.source))
        if self.line is not None:
            where.append(str(self.line))
            if self.column is not None:
                where.append(str(self.column))
        prefix = ":".join(where)
        return f"{prefix}: {self.message}" if prefix else self.message


class CircuitSyntaxError(CircuitError):
    pass


class CircuitSemanticError(CircuitError):
    pass
