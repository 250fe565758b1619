class SemIdError(Exception):
    """Base class for every error raised by this package."""


class DiagramError(SemIdError, ValueError):
    pass


class DuplicateName(DiagramError):
    pass


class UnknownVariable(DiagramError, KeyError):
    def __str__(self):
        return f"unknown variable {self.args[0]!r}" if self.args else "unknown variable"


class DirectedCycle(DiagramError):
    pass


class DuplicateEdge(DiagramError):
    pass


class DiagramTooLarge(DiagramError):
    pass


class VariableNotOnPath(SemIdError, ValueError):
    pass


class NotAnEndpoint(SemIdError, ValueError):
    pass


class MissingParameter(SemIdError, KeyError):
    pass


class NonPositiveDefinitePsi(SemIdError, ValueError):
    pass


class RetriesExhausted(SemIdError, RuntimeError):
    pass


class EmptyIncSet(SemIdError, ValueError):
    pass


class MalformedWitness(SemIdError, ValueError):
    pass


class IncompleteAssignment(SemIdError, ValueError):
    pass


class SingularSystem(SemIdError, ArithmeticError):
    def __init__(self, message, condition_number=float("inf")):
        super().__init__(message)
        self.condition_number = condition_number


class CoefficientUnavailable(SemIdError, LookupError):
    def __init__(self, params):
        self.params = tuple(params)
        super().__init__("coefficients need unsolved parameters: " + ", ".join(self.params))


class NotIdentified(SemIdError, ValueError):
    """Raised when an operation requires an identified model."""


class ModelFileError(SemIdError, ValueError):
    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = f"line {line}, column {column}: " if line is not None else ""
        super().__init__(where + message)
