class FamfftError(Exception):
    pass


class ConfigurationError(FamfftError):
    """A modulus, prime set or domain cannot support the requested computation."""


class CoefficientOverflowError(FamfftError):
    pass


class EncodingError(FamfftError):
    pass


class FamilySystemError(FamfftError):
    """Invalid system of families with infants."""


class InfantViolationError(FamfftError):
    """A monomial contains an infant but none of its relatives."""


class ParseError(FamfftError):
    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class BudgetExceeded(FamfftError):
    pass


class StructuralError(FamfftError):
    """A graph does not meet the structural bound it was declared to satisfy."""
