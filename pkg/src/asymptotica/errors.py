"""Exception hierarchy shared by all asymptotica modules."""


class AsymptoticaError(Exception):
    """Base class for all errors raised by this package."""


class DimensionError(AsymptoticaError, ValueError):
    """Operands have incompatible shapes."""


class NotHermitianError(AsymptoticaError, ValueError):
    """A matrix expected to be Hermitian is not, beyond tolerance."""


class SingularOperatorError(AsymptoticaError):
    """An operator that must be inverted is numerically singular."""


class ChainError(AsymptoticaError):
    """A backward chain could not be built within the residual tolerance.

    ``step`` is the index of the first element that has no admissible
    preimage and ``residual`` the size of the violation.
    """

    def __init__(self, msg, step=None, residual=None):
        super().__init__(msg)
        self.step = step
        self.residual = residual


class CrossValidationError(AsymptoticaError):
    """Two independent routes to the same quantity disagree.

    The offending vector is kept in ``vector``.
    """

    def __init__(self, msg, vector=None):
        super().__init__(msg)
        self.vector = vector


class ConfigError(AsymptoticaError):
    """Malformed experiment configuration; ``path`` locates the bad entry."""

    def __init__(self, msg, path="$"):
        super().__init__(f"{path}: {msg}")
        self.path = path
