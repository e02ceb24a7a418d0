"""Exception hierarchy shared by all gtail modules."""


class GtailError(Exception):
    """Base class for all gtail errors."""


class DomainError(GtailError, ValueError):
    """An argument is outside the mathematical domain of the operation."""


class DegenerateSampleError(GtailError):
    """The sample makes the requested statistic undefined (ties, zero denominators)."""


class ParseError(GtailError):
    """Input data could not be parsed."""

    def __init__(self, message, line_number=None):
        super().__init__(message)
        self.line_number = line_number


class PipelineError(GtailError):
    """A step of the adaptive estimation pipeline failed.

    ``step`` names the failing stage (``rho``, ``beta``, ``k_classical``,
    ``classical``, ``r_star``, ``k_generalized``, ``generalized``).
    """

    def __init__(self, step, message):
        super().__init__(f"step '{step}': {message}")
        self.step = step
