"""Exception and warning types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ConfigError(ValueError):
    """A run configuration is malformed (unknown key, bad type, bad range)."""


class NumericalFailure(RuntimeError):
    """A numerical kernel failed to converge or produced unusable output.

    Carries optional context (the offending matrix, last iterate, time
    stamp) in ``context``.
    """

    def __init__(self, message, context=None):
        super().__init__(message)
        self.context = context or {}


class NoConvergence(NumericalFailure):
    """Iteration cap exceeded; ``context['last']`` holds the last iterate."""


class NotACycle(NumericalFailure):
    """The orbit never returned to the Poincare section."""


class NumericsWarning(UserWarning):
    """Non-fatal numerical degeneracy (near-multiple eigenvalue, etc.)."""
