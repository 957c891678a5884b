"""Exception types raised across the package."""


class ContractViolation(ValueError):
    """An argument does not satisfy a documented precondition."""


class InvalidStateError(ContractViolation):
    """A Bloch vector or matrix does not describe a physical qubit state."""


class NotPSDError(ContractViolation):
    """A matrix has an eigenvalue below the PSD clamping tolerance."""


class DivergentRelativeEntropyError(ArithmeticError):
    """The first state has weight outside the support of the second."""


class NumericalFailure(RuntimeError):
    """An adaptive integrator or quadrature gave up before reaching tolerance.

    ``achieved`` holds the best error estimate (quadrature) or the last time
    reached (integrator) so the caller can report how far it got.
    """

    def __init__(self, message, achieved=None):
        super().__init__(message)
        self.achieved = achieved


class ConfigError(ValueError):
    """Bad run configuration; ``key`` names the offending entry."""

    def __init__(self, key, message):
        super().__init__(f"{key}: {message}")
        self.key = key
