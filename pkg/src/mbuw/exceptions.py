"""Exception types raised by the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of the function or model."""


class HazardOverflowError(OverflowError):
    """The survival function underflowed, so the hazard rate is unbounded."""


class QuadratureError(RuntimeError):
    """An iterative numerical routine gave up; ``partial`` holds its last estimate."""

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class DataError(ValueError):
    """Input data could not be parsed or falls outside (0, 1)."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
