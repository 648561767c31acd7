"""Exception hierarchy shared by the compute modules and the CLI."""


class DomainError(ValueError):
    """An argument lies outside the domain where a quantity is defined."""


class NearOrthogonalPostSelection(DomainError):
    """Pre- and post-selected states are (numerically) orthogonal."""


class NonHermitianOperator(DomainError):
    pass


class GridTooNarrow(DomainError):
    pass


class DegenerateWavefunction(DomainError):
    pass


class StepTooLarge(DomainError):
    pass


class NormDriftExceeded(ArithmeticError):
    pass


class WindowOutOfRange(DomainError):
    pass


class AmplitudeUnderflow(DomainError):
    pass


class DegenerateDenominator(DomainError):
    pass


class QuadratureNonConvergence(ArithmeticError):
    pass


class DissipationlessCase(DomainError):
    """Raised when the decay rate vanishes (omega' == 2 omega).

    The dwell-time closed forms divide by gamma, so no report is produced.
    ``limit`` carries the gamma -> 0 value of the integrated survival
    probability, which is half the window.
    """

    def __init__(self, message, limit):
        super().__init__(message)
        self.limit = limit


class ConfigError(ValueError):
    """Invalid or incomplete run configuration; ``key`` names the culprit."""

    def __init__(self, message, key=None):
        super().__init__(message)
        self.key = key
