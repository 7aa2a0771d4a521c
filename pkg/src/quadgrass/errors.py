"""Exception hierarchy. Everything derives from QuadGrassError so callers can catch broadly."""


class QuadGrassError(Exception):
    pass


class DimensionError(QuadGrassError, ValueError):
    pass


class ValidationError(QuadGrassError, ValueError):
    pass


class NumericalError(QuadGrassError, ArithmeticError):
    pass


class ContractViolation(QuadGrassError, ValueError):
    """An argument breaks an operation's precondition (e.g. a non-tangent direction)."""


class RetractionDegenerate(NumericalError):
    pass


class StepTooLarge(NumericalError):
    pass


class NotCommutingError(ValidationError):
    pass


class ExpansionInvalid(ValidationError):
    pass


class InvalidCertificateInput(ValidationError):
    pass


class ParseError(QuadGrassError, ValueError):
    def __init__(self, path, line, column, message):
        self.path, self.line, self.column = path, line, column
        super().__init__(f"{path}:{line}:{column}: {message}")
